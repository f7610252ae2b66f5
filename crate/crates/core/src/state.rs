//! The `N^2`-dimensional walk state stored as an `N x N` matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, WalkError};

/// Tolerance on the state norm at construction.
pub const NORM_TOL: f64 = 1e-10;

/// Norm deviation beyond which a measurement is refused.
pub const MEASURE_NORM_TOL: f64 = 1e-6;

/// Which register of `|i>_1 |j>_2` to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Register {
    First,
    Second,
}

/// A walk state `sum a_ij |i>_1 |j>_2`, held as the matrix `Phi` with
/// `Phi[(j, i)] = a_ij`.
///
/// Column `i` of `Phi` is the block of amplitudes whose first register is
/// `i`. Because `nalgebra` stores matrices column-major, the flat storage
/// order is exactly `i * N + j`, the natural order of `|i>_1 |j>_2`.
///
/// All accessors take `(first, second)` register indices; the matrix
/// layout is only visible through [`WalkState::matrix`].
pub struct WalkState {
    phi: DMatrix<Complex64>,
    // output buffer of the out-of-place step, reused across steps
    scratch: Vec<Complex64>,
}

impl Clone for WalkState {
    fn clone(&self) -> Self {
        Self::from_matrix_unchecked(self.phi.clone())
    }
}

impl PartialEq for WalkState {
    fn eq(&self, other: &Self) -> bool {
        self.phi == other.phi
    }
}

impl std::fmt::Debug for WalkState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WalkState").field("phi", &self.phi).finish()
    }
}

impl WalkState {
    /// Wraps a state matrix, requiring unit Frobenius norm within [`NORM_TOL`].
    pub fn from_matrix(phi: DMatrix<Complex64>) -> Result<Self> {
        if !phi.is_square() {
            return Err(WalkError::DimensionMismatch {
                expected: phi.nrows(),
                found: phi.ncols(),
            });
        }
        let norm = phi.norm();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(WalkError::UnnormalizedState { norm });
        }
        Ok(Self::from_matrix_unchecked(phi))
    }

    pub(crate) fn from_matrix_unchecked(phi: DMatrix<Complex64>) -> Self {
        Self { phi, scratch: Vec::new() }
    }

    /// Builds a state from `((first, second), amplitude)` entries.
    pub fn from_amplitudes(
        n: usize,
        amplitudes: impl IntoIterator<Item = ((usize, usize), Complex64)>,
    ) -> Result<Self> {
        let mut phi = DMatrix::zeros(n, n);
        for ((first, second), amp) in amplitudes {
            for node in [first, second] {
                if node >= n {
                    return Err(WalkError::InvalidNode { node, n });
                }
            }
            phi[(second, first)] += amp;
        }
        Self::from_matrix(phi)
    }

    /// The basis state `|first>_1 |second>_2`.
    pub fn basis(n: usize, first: usize, second: usize) -> Result<Self> {
        Self::from_amplitudes(n, [((first, second), Complex64::new(1.0, 0.0))])
    }

    /// Inverse of [`WalkState::to_vector`]; the vector must be normalized.
    pub fn from_vector(n: usize, v: &DVector<Complex64>) -> Result<Self> {
        if v.len() != n * n {
            return Err(WalkError::DimensionMismatch {
                expected: n * n,
                found: v.len(),
            });
        }
        Self::from_matrix(DMatrix::from_column_slice(n, n, v.as_slice()))
    }

    pub fn n_nodes(&self) -> usize {
        self.phi.nrows()
    }

    /// Amplitude of `|first>_1 |second>_2`.
    pub fn amplitude(&self, first: usize, second: usize) -> Complex64 {
        self.phi[(second, first)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.phi
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.phi
    }

    /// The current amplitudes and an output buffer of the same size.
    pub(crate) fn step_buffers(&mut self) -> (&[Complex64], &mut [Complex64]) {
        let len = self.phi.len();
        if self.scratch.len() != len {
            self.scratch = vec![Complex64::new(0.0, 0.0); len];
        }
        (self.phi.as_slice(), &mut self.scratch)
    }

    /// Makes the output buffer the state.
    pub(crate) fn commit_step(&mut self) {
        let n = self.n_nodes();
        let next = DMatrix::from_vec(n, n, std::mem::take(&mut self.scratch));
        self.scratch = std::mem::replace(&mut self.phi, next).data.into();
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.phi
    }

    /// Flattened amplitudes indexed by `first * N + second`.
    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(self.phi.as_slice())
    }

    pub fn norm(&self) -> f64 {
        self.phi.norm()
    }

    /// Rescales to unit norm. Only the CLI's optional drift control uses this.
    pub fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            self.phi.unscale_mut(norm);
        }
    }

    /// Exchanges the two registers: a transposition of `Phi`.
    pub fn swapped(&self) -> Self {
        Self::from_matrix_unchecked(self.phi.transpose())
    }

    /// In-place transposition in square tiles, so both sides of each swap
    /// stay cache resident for large `N`.
    pub fn swap_in_place(&mut self) {
        const TILE: usize = 8;
        let n = self.n_nodes();
        let a = self.phi.as_mut_slice();
        for bi in (0..n).step_by(TILE) {
            for bj in (bi..n).step_by(TILE) {
                for i in bi..(bi + TILE).min(n) {
                    let from = if bi == bj { i + 1 } else { bj };
                    for j in from..(bj + TILE).min(n) {
                        a.swap(i * n + j, j * n + i);
                    }
                }
            }
        }
    }

    /// Measurement probabilities of one register.
    ///
    /// The first register gives column sums of `|Phi|^2`, the second gives
    /// row sums.
    pub fn measure(&self, register: Register) -> Result<Vec<f64>> {
        let norm = self.norm();
        if !((norm - 1.0).abs() <= MEASURE_NORM_TOL) {
            return Err(WalkError::UnnormalizedState { norm });
        }
        let n = self.n_nodes();
        let probs = match register {
            Register::First => self
                .phi
                .column_iter()
                .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
                .collect(),
            Register::Second => {
                let mut p = vec![0.0; n];
                for col in self.phi.column_iter() {
                    for (pj, a) in p.iter_mut().zip(col.iter()) {
                        *pj += a.norm_sqr();
                    }
                }
                p
            }
        };
        Ok(probs)
    }

    /// Largest amplitude-wise modulus of the difference.
    pub fn max_abs_diff(&self, other: &WalkState) -> f64 {
        max_abs_diff(&self.phi, &other.phi)
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
