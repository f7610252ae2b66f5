use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Result, SimError};

/// Tolerance on the total of every emitted distribution.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub scenario: String,
    pub library_version: String,
    pub config: ExperimentConfig,
    /// Scenario-specific facts: cycle size, step axis, predictions.
    pub notes: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub step: usize,
    /// First-register probabilities, aligned with the record's `nodes`.
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunResult {
    Distributions {
        /// Node labels; signed line coordinates for line walks.
        nodes: Vec<i64>,
        steps: Vec<Distribution>,
    },
    MarkedProbability {
        marked: Vec<usize>,
        /// Entry `t` is the marked probability after `t` double steps.
        probability: Vec<f64>,
        t_max_predicted: Option<usize>,
        first_local_max: Option<usize>,
    },
    Scaling {
        sizes: Vec<usize>,
        seconds: Vec<f64>,
        /// Least-squares slope of `ln seconds` against `ln size`.
        slope: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub metadata: Metadata,
    pub result: RunResult,
    /// Wall-clock seconds per recorded step.
    pub step_seconds: Vec<f64>,
}

impl RunRecord {
    /// First-register distribution after `step`, if recorded.
    pub fn distribution(&self, step: usize) -> Option<&[f64]> {
        match &self.result {
            RunResult::Distributions { steps, .. } => steps
                .iter()
                .find(|d| d.step == step)
                .map(|d| d.probabilities.as_slice()),
            _ => None,
        }
    }

    /// Probability of `node` after `step`.
    pub fn probability(&self, step: usize, node: i64) -> Option<f64> {
        let RunResult::Distributions { nodes, .. } = &self.result else {
            return None;
        };
        let pos = nodes.iter().position(|&x| x == node)?;
        self.distribution(step).map(|p| p[pos])
    }

    pub fn nodes(&self) -> Option<&[i64]> {
        match &self.result {
            RunResult::Distributions { nodes, .. } => Some(nodes),
            _ => None,
        }
    }

    pub fn marked_probability(&self) -> Option<&[f64]> {
        match &self.result {
            RunResult::MarkedProbability { probability, .. } => Some(probability),
            _ => None,
        }
    }

    /// Checks that every distribution sums to one.
    pub fn check_distributions(&self) -> Result<()> {
        if let RunResult::Distributions { steps, .. } = &self.result {
            for d in steps {
                let total: f64 = d.probabilities.iter().sum();
                if !((total - 1.0).abs() <= DISTRIBUTION_TOL) {
                    return Err(SimError::Numerical(format!(
                        "distribution at step {} sums to {total}",
                        d.step
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Total variation distance `sum |p - q| / 2`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
}

/// First interior index whose value rises above its predecessor and is not
/// exceeded by its successor.
pub fn first_local_max(values: &[f64]) -> Option<usize> {
    (1..values.len().saturating_sub(1)).find(|&t| values[t] > values[t - 1] && values[t] >= values[t + 1])
}

/// Least-squares slope of `ln y` against `ln x`; `None` below two points.
pub fn log_log_slope(x: &[usize], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|&v| (v as f64).ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}
