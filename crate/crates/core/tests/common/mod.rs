#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;
use szegedy::{Complex64, PhaseConfig, TransitionMatrix, WalkState};

/// Random column-stochastic matrix. With `sparsity > 0` some entries are
/// zeroed, but every column keeps at least one nonzero.
pub fn random_stochastic(rng: &mut impl Rng, n: usize, sparsity: f64) -> TransitionMatrix {
    let mut g = DMatrix::from_fn(n, n, |_, _| {
        if rng.gen::<f64>() < sparsity {
            0.0
        } else {
            rng.gen::<f64>() + 1e-3
        }
    });
    for mut col in g.column_iter_mut() {
        if col.iter().all(|&x| x == 0.0) {
            let k = rng.gen_range(0..n);
            col[k] = 1.0;
        }
        let s: f64 = col.iter().sum();
        col /= s;
        // push the rounding residue onto the largest entry
        let s: f64 = col.iter().sum();
        let k = col.iamax();
        col[k] += 1.0 - s;
    }
    TransitionMatrix::new(g).expect("normalized columns")
}

pub fn random_phases(rng: &mut impl Rng, n: usize) -> PhaseConfig {
    let apr = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
    let link = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * TAU);
    PhaseConfig::new(apr, link).unwrap()
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> WalkState {
    let mut m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let norm = m.norm();
    m.unscale_mut(norm);
    WalkState::from_matrix(m).unwrap()
}

pub fn g4() -> TransitionMatrix {
    TransitionMatrix::new(DMatrix::from_row_slice(
        4,
        4,
        &[0.7, 0.3, 0.4, 0.0, 0.0, 0.0, 0.6, 0.0, 0.3, 0.7, 0.0, 0.7, 0.0, 0.0, 0.0, 0.3],
    ))
    .unwrap()
}
