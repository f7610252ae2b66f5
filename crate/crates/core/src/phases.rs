//! Phase extensions of the walk: one APR phase per node and one link phase
//! per edge state.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Result, WalkError};

/// APR phases `theta` (one per node) and link phases `phi` (one per edge state).
///
/// `link[(i, j)]` is the phase attached to the edge state `|i>_1 |j>_2`, i.e.
/// to the transition `i -> j`, whose probability is `G[(j, i)]`.
///
/// APR phases are reduced to `[0, 2pi)` on construction. Link phases are kept
/// as given since they only enter through `exp(i phi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    apr: Vec<f64>,
    link: DMatrix<f64>,
}

impl PhaseConfig {
    pub fn new(apr: Vec<f64>, link: DMatrix<f64>) -> Result<Self> {
        let n = apr.len();
        if link.nrows() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: link.nrows(),
            });
        }
        if link.ncols() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: link.ncols(),
            });
        }
        let apr = apr.into_iter().map(reduce_angle).collect();
        Ok(Self { apr, link })
    }

    /// The standard walk: `theta_i = pi` and no link phases.
    pub fn standard(n: usize) -> Self {
        Self::global(n, PI)
    }

    /// A single APR phase shared by every node, no link phases.
    pub fn global(n: usize, theta: f64) -> Self {
        Self {
            apr: vec![reduce_angle(theta); n],
            link: DMatrix::zeros(n, n),
        }
    }

    /// Local APR phases without link phases (vertex-phased walk).
    pub fn vertex_phased(apr: Vec<f64>) -> Self {
        let n = apr.len();
        Self {
            apr: apr.into_iter().map(reduce_angle).collect(),
            link: DMatrix::zeros(n, n),
        }
    }

    /// Link phases with the standard reflection (link-phased walk).
    pub fn link_phased(link: DMatrix<f64>) -> Result<Self> {
        Self::new(vec![PI; link.nrows()], link)
    }

    pub fn n_nodes(&self) -> usize {
        self.apr.len()
    }

    pub fn apr(&self) -> &[f64] {
        &self.apr
    }

    pub fn link(&self) -> &DMatrix<f64> {
        &self.link
    }

    /// Phase of the edge state `|from>_1 |to>_2`.
    pub fn link_phase(&self, from: usize, to: usize) -> f64 {
        self.link[(from, to)]
    }

    pub fn set_apr(&mut self, node: usize, theta: f64) {
        self.apr[node] = reduce_angle(theta);
    }

    pub fn set_link_phase(&mut self, from: usize, to: usize, phase: f64) {
        self.link[(from, to)] = phase;
    }

    pub fn into_parts(self) -> (Vec<f64>, DMatrix<f64>) {
        (self.apr, self.link)
    }
}

/// Reduces an angle to `[0, 2pi)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apr_is_reduced_modulo_two_pi() {
        let p = PhaseConfig::vertex_phased(vec![-PI / 2.0, 5.0 * PI, TAU]);
        assert!((p.apr()[0] - 1.5 * PI).abs() < 1e-12);
        assert!((p.apr()[1] - PI).abs() < 1e-12);
        assert_eq!(p.apr()[2], 0.0);
        assert_eq!(reduce_angle(-1e-20), 0.0);
    }

    #[test]
    fn rejects_mismatched_link_matrix() {
        let err = PhaseConfig::new(vec![PI; 3], DMatrix::zeros(2, 3)).unwrap_err();
        assert_eq!(
            err,
            WalkError::DimensionMismatch {
                expected: 3,
                found: 2
            }
        );
        assert!(PhaseConfig::new(vec![PI; 3], DMatrix::zeros(3, 4)).is_err());
    }

    #[test]
    fn standard_is_pi_without_links() {
        let p = PhaseConfig::standard(4);
        assert!(p.apr().iter().all(|&t| t == PI));
        assert!(p.link().iter().all(|&x| x == 0.0));
    }
}
