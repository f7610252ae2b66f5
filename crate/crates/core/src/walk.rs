//! The O(N^2) evolution kernel.
//!
//! A walk is fully described by two objects of size at most `N x N`:
//!
//! * `Psi[(k, i)] = exp(i phi_ik) sqrt(G_ki)`, whose column `i` holds the
//!   nonzero amplitudes of `|psi_i(phi)> = |i>_1 (sum_k Psi[(k, i)] |k>_2)`;
//! * the APR factors `1 - exp(i theta_i)`.
//!
//! Applying `2 Sigma` to a state `Phi` takes three elementwise passes: the
//! overlaps `C_i = <psi_i(phi)|Phi>` are column sums of `Phi .* conj(Psi)`,
//! they are scaled by the APR factors, and the scaled coefficients multiply
//! the columns of `Psi`. The phase rotation subtracts the input, and the
//! register swap is a transposition. No `N^2 x N^2` operator is formed.
//!
//! [`SzegedyWalk::step_in_place`] fuses all of this into one out-of-place
//! sweep over blocks of columns: the overlaps of a block are taken while the
//! block is cache resident, and the rotated block is written straight to its
//! transposed position in a second buffer.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Result, WalkError};
use crate::graph::TransitionMatrix;
use crate::phases::PhaseConfig;
use crate::state::WalkState;

/// Below this many nodes the column passes run serially.
const PARALLEL_MIN_NODES: usize = 256;

/// Columns per block of the fused step.
const BLOCK: usize = 32;

/// A walk ready for evolution. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SzegedyWalk {
    psi: DMatrix<Complex64>,
    apr_factors: Vec<Complex64>,
}

impl SzegedyWalk {
    pub fn new(g: &TransitionMatrix, phases: &PhaseConfig) -> Result<Self> {
        let n = g.n_nodes();
        if phases.n_nodes() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: phases.n_nodes(),
            });
        }
        let gm = g.matrix();
        let link = phases.link();
        let mut inert = 0usize;
        let psi = DMatrix::from_fn(n, n, |k, i| {
            let w = gm[(k, i)];
            let phase = link[(i, k)];
            if w == 0.0 && phase != 0.0 {
                inert += 1;
            }
            Complex64::from_polar(w.sqrt(), phase)
        });
        if inert > 0 {
            log::warn!("{inert} link phase(s) sit on zero-probability edges and have no effect");
        }
        let apr_factors = phases.apr().iter().map(|&t| apr_factor(t)).collect();
        Ok(Self { psi, apr_factors })
    }

    /// The standard walk on `g` (`theta_i = pi`, no link phases).
    pub fn standard(g: &TransitionMatrix) -> Self {
        Self::new(g, &PhaseConfig::standard(g.n_nodes())).expect("dimensions agree")
    }

    pub fn n_nodes(&self) -> usize {
        self.psi.nrows()
    }

    pub fn psi(&self) -> &DMatrix<Complex64> {
        &self.psi
    }

    pub fn apr_factors(&self) -> &[Complex64] {
        &self.apr_factors
    }

    fn check(&self, state: &WalkState) -> Result<()> {
        if state.n_nodes() != self.n_nodes() {
            return Err(WalkError::DimensionMismatch {
                expected: self.n_nodes(),
                found: state.n_nodes(),
            });
        }
        Ok(())
    }

    /// Overlaps `C_i = <psi_i(phi)|state>`, one per node.
    pub fn overlaps(&self, state: &WalkState) -> Result<Vec<Complex64>> {
        self.check(state)?;
        let n = self.n_nodes();
        Ok(state
            .matrix()
            .as_slice()
            .chunks_exact(n)
            .zip(self.psi.as_slice().chunks_exact(n))
            .map(|(phi, psi)| column_overlap(phi, psi))
            .collect())
    }

    /// `2 Sigma(theta, phi)` applied to `state`, as an unnormalized matrix.
    pub fn sigma_doubled(&self, state: &WalkState) -> Result<DMatrix<Complex64>> {
        let coeffs: Vec<Complex64> = self
            .overlaps(state)?
            .into_iter()
            .zip(&self.apr_factors)
            .map(|(c, f)| c * f)
            .collect();
        let mut out = self.psi.clone();
        for (mut col, c) in out.column_iter_mut().zip(coeffs) {
            col *= c;
        }
        Ok(out)
    }

    /// `R(theta, phi) = 2 Sigma - 1` applied to `state`.
    pub fn phase_rotation(&self, state: &WalkState) -> Result<WalkState> {
        let sigma = self.sigma_doubled(state)?;
        Ok(WalkState::from_matrix_unchecked(sigma - state.matrix()))
    }

    /// In-place phase rotation, fusing the three passes column by column.
    pub fn phase_rotation_in_place(&self, state: &mut WalkState) -> Result<()> {
        self.check(state)?;
        let n = self.n_nodes();
        let phi = state.matrix_mut().as_mut_slice();
        let psi = self.psi.as_slice();
        let rotate = |((phi_col, psi_col), f): ((&mut [Complex64], &[Complex64]), &Complex64)| {
            let c = column_overlap(phi_col, psi_col) * f;
            for (a, p) in phi_col.iter_mut().zip(psi_col) {
                *a = c * p - *a;
            }
        };
        if n >= PARALLEL_MIN_NODES {
            phi.par_chunks_exact_mut(n)
                .zip(psi.par_chunks_exact(n))
                .zip(self.apr_factors.par_iter())
                .with_min_len(16)
                .for_each(rotate);
        } else {
            phi.chunks_exact_mut(n)
                .zip(psi.chunks_exact(n))
                .zip(self.apr_factors.iter())
                .for_each(rotate);
        }
        Ok(())
    }

    /// One step of `U_s(theta, phi) = S_w R(theta, phi)`.
    pub fn step(&self, state: &WalkState) -> Result<WalkState> {
        let mut next = state.clone();
        self.step_in_place(&mut next)?;
        Ok(next)
    }

    /// One step, reusing a buffer held by `state`. Results do not depend on
    /// the number of threads.
    pub fn step_in_place(&self, state: &mut WalkState) -> Result<()> {
        self.check(state)?;
        let n = self.n_nodes();
        let (phi, out) = state.step_buffers();
        if n >= PARALLEL_MIN_NODES && rayon::current_num_threads() > 1 {
            self.step_parallel(phi, out);
        } else {
            self.step_blocked(phi, out);
        }
        state.commit_step();
        Ok(())
    }

    // out[r * n + i] = (c_i psi_i - phi_i)[r]: column i of the rotated state
    // lands in row i of the output.
    fn step_blocked(&self, phi: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_nodes();
        let psi = self.psi.as_slice();
        let mut coef = [Complex64::new(0.0, 0.0); BLOCK];
        for i0 in (0..n).step_by(BLOCK) {
            let i1 = (i0 + BLOCK).min(n);
            for i in i0..i1 {
                let col = i * n..(i + 1) * n;
                coef[i - i0] = column_overlap(&phi[col.clone()], &psi[col]) * self.apr_factors[i];
            }
            for r in 0..n {
                for (k, o) in out[r * n + i0..r * n + i1].iter_mut().enumerate() {
                    let idx = (i0 + k) * n + r;
                    *o = coef[k] * psi[idx] - phi[idx];
                }
            }
        }
    }

    // Same entries as `step_blocked`: all overlaps first, then output columns
    // in parallel.
    fn step_parallel(&self, phi: &[Complex64], out: &mut [Complex64]) {
        let n = self.n_nodes();
        let psi = self.psi.as_slice();
        let coef: Vec<Complex64> = phi
            .par_chunks_exact(n)
            .zip(psi.par_chunks_exact(n))
            .zip(self.apr_factors.par_iter())
            .map(|((p, q), f)| column_overlap(p, q) * f)
            .collect();
        out.par_chunks_mut(BLOCK * n).enumerate().for_each(|(b, cols)| {
            let r0 = b * BLOCK;
            for (i, c) in coef.iter().enumerate() {
                let base = i * n + r0;
                for (k, (p, q)) in phi[base..].iter().zip(&psi[base..]).take(cols.len() / n).enumerate() {
                    cols[k * n + i] = c * q - p;
                }
            }
        });
    }

    /// `(1/sqrt N) sum_i |psi_i(phi)>`, the usual initial state.
    pub fn uniform_superposition(&self) -> WalkState {
        let scale = 1.0 / (self.n_nodes() as f64).sqrt();
        WalkState::from_matrix_unchecked(self.psi.map(|p| p * scale))
    }
}

/// `W_s = U_s(second) U_s(first)`.
pub fn step_double(state: &WalkState, first: &SzegedyWalk, second: &SzegedyWalk) -> Result<WalkState> {
    let mut next = first.step(state)?;
    second.step_in_place(&mut next)?;
    Ok(next)
}

/// `1 - exp(i theta)`, exact at `theta = pi` and `theta = 0`.
fn apr_factor(theta: f64) -> Complex64 {
    if theta == PI {
        Complex64::new(2.0, 0.0)
    } else if theta == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(1.0, 0.0) - Complex64::cis(theta)
    }
}

#[inline]
fn column_overlap(phi: &[Complex64], psi: &[Complex64]) -> Complex64 {
    phi.iter().zip(psi).map(|(a, p)| a * p.conj()).sum()
}
