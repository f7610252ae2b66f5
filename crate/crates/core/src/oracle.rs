//! Brute-force `N^2 x N^2` evolution operators.
//!
//! These are built from explicit `|psi_i(phi)>` vectors and an explicit swap
//! permutation, independently of the matrix-state kernel in
//! [`crate::walk`]. They exist to check that kernel on small graphs and must
//! not be used on production paths: memory grows as `N^4`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::graph::TransitionMatrix;
use crate::phases::PhaseConfig;
use crate::state::WalkState;

/// Largest graph the oracle accepts (64^4 complex entries, about 270 MB).
pub const MAX_ORACLE_NODES: usize = 64;

/// A dense operator on the walk space, indexed by `first * N + second`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
    n: usize,
}

impl DenseOperator {
    pub fn from_matrix(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != n * n || matrix.ncols() != n * n {
            return Err(WalkError::DimensionMismatch {
                expected: n * n,
                found: matrix.nrows(),
            });
        }
        Ok(Self { matrix, n })
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Flat index of `|first>_1 |second>_2`.
    pub fn index(&self, first: usize, second: usize) -> usize {
        first * self.n + second
    }

    /// Applies the operator to a state. The result is not renormalized.
    pub fn apply(&self, state: &WalkState) -> Result<WalkState> {
        if state.n_nodes() != self.n {
            return Err(WalkError::DimensionMismatch {
                expected: self.n,
                found: state.n_nodes(),
            });
        }
        let v = &self.matrix * state.to_vector();
        Ok(WalkState::from_matrix_unchecked(DMatrix::from_column_slice(
            self.n,
            self.n,
            v.as_slice(),
        )))
    }

    /// Image of the basis state `|first>_1 |second>_2`.
    pub fn column_state(&self, first: usize, second: usize) -> WalkState {
        let col = self.matrix.column(self.index(first, second));
        WalkState::from_matrix_unchecked(DMatrix::from_iterator(self.n, self.n, col.iter().copied()))
    }

    /// `self` after `first`: the product `self * first`.
    pub fn after(&self, first: &DenseOperator) -> Result<DenseOperator> {
        if first.n != self.n {
            return Err(WalkError::DimensionMismatch {
                expected: self.n,
                found: first.n,
            });
        }
        Ok(Self {
            matrix: &self.matrix * &first.matrix,
            n: self.n,
        })
    }

    /// `max |U^dag U - 1|` over all entries.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.matrix.nrows();
        let prod = self.matrix.adjoint() * &self.matrix;
        let id = DMatrix::<Complex64>::identity(d, d);
        max_entry_diff(&prod, &id)
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        max_entry_diff(&self.matrix, &other.matrix)
    }

    /// Submatrix on the given flat indices (rows and columns alike).
    pub fn restrict(&self, indices: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
            self.matrix[(indices[r], indices[c])]
        })
    }

    /// Largest amplitude that leaks out of the span of `indices` when the
    /// operator acts on any basis state inside it.
    pub fn leakage(&self, indices: &[usize]) -> f64 {
        let inside: std::collections::HashSet<usize> = indices.iter().copied().collect();
        let mut worst = 0.0f64;
        for &c in indices {
            for r in 0..self.matrix.nrows() {
                if !inside.contains(&r) {
                    worst = worst.max(self.matrix[(r, c)].norm());
                }
            }
        }
        worst
    }
}

fn max_entry_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn guard(g: &TransitionMatrix, phases: &PhaseConfig) -> Result<usize> {
    let n = g.n_nodes();
    if n > MAX_ORACLE_NODES {
        return Err(WalkError::TooLarge {
            n,
            max: MAX_ORACLE_NODES,
        });
    }
    if phases.n_nodes() != n {
        return Err(WalkError::DimensionMismatch {
            expected: n,
            found: phases.n_nodes(),
        });
    }
    Ok(n)
}

/// `|psi_i(phi)> = sum_k exp(i phi_ik) sqrt(G_ki) |i>_1 |k>_2` as an explicit
/// `N^2`-vector.
pub fn psi_vector(g: &TransitionMatrix, phases: &PhaseConfig, i: usize) -> DVector<Complex64> {
    let n = g.n_nodes();
    let mut v = DVector::zeros(n * n);
    for k in 0..n {
        let amp = g.prob(k, i).sqrt();
        v[i * n + k] = Complex64::new(amp * phases.link_phase(i, k).cos(), amp * phases.link_phase(i, k).sin());
    }
    v
}

/// `2 Sigma(theta, phi) = sum_i (1 - exp(i theta_i)) |psi_i><psi_i|`.
pub fn dense_sigma_doubled(g: &TransitionMatrix, phases: &PhaseConfig) -> Result<DenseOperator> {
    let n = guard(g, phases)?;
    let d = n * n;
    let mut sigma = DMatrix::zeros(d, d);
    for (i, &theta) in phases.apr().iter().enumerate() {
        let factor = Complex64::new(1.0 - theta.cos(), -theta.sin());
        let v = psi_vector(g, phases, i);
        sigma += (&v * v.adjoint()) * factor;
    }
    Ok(DenseOperator { matrix: sigma, n })
}

/// `R(theta, phi) = 2 Sigma - 1`.
pub fn dense_rotation(g: &TransitionMatrix, phases: &PhaseConfig) -> Result<DenseOperator> {
    let mut r = dense_sigma_doubled(g, phases)?;
    for k in 0..r.matrix.nrows() {
        r.matrix[(k, k)] -= Complex64::new(1.0, 0.0);
    }
    Ok(r)
}

/// The register swap `S_w = sum |i,j><j,i|` as a permutation matrix.
pub fn swap_operator(n: usize) -> DenseOperator {
    let d = n * n;
    let mut s = DMatrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            s[(i * n + j, j * n + i)] = Complex64::new(1.0, 0.0);
        }
    }
    DenseOperator { matrix: s, n }
}

/// `U_s(theta, phi) = S_w R(theta, phi)`.
pub fn dense_unitary(g: &TransitionMatrix, phases: &PhaseConfig) -> Result<DenseOperator> {
    let r = dense_rotation(g, phases)?;
    swap_operator(r.n).after(&r)
}

/// `W_s = U_s(theta_2, phi_2) U_s(theta_1, phi_1)`.
pub fn dense_double(
    g1: &TransitionMatrix,
    phases1: &PhaseConfig,
    g2: &TransitionMatrix,
    phases2: &PhaseConfig,
) -> Result<DenseOperator> {
    let u1 = dense_unitary(g1, phases1)?;
    let u2 = dense_unitary(g2, phases2)?;
    u2.after(&u1)
}
