//! Experiments on graph-phased Szegedy walks.
//!
//! Each [`Scenario`] turns an [`ExperimentConfig`] into a [`RunRecord`]:
//! per-step first-register distributions for the line walks and custom
//! walks, the marked-node probability per double step for search, and
//! per-size step timings for the scaling benchmark. Records are written as
//! CSV or JSON by [`output::write_record`].
//!
//! ```
//! use szsim::{run, ExperimentConfig, Scenario};
//!
//! let record = run(&ExperimentConfig::new(Scenario::LineX).with_steps(10)).unwrap();
//! assert!((record.probability(10, 10).unwrap() - 0.5).abs() < 1e-12);
//! assert!((record.probability(10, -10).unwrap() - 0.5).abs() < 1e-12);
//! ```

pub mod config;
pub mod error;
pub mod experiments;
pub mod input;
pub mod output;
pub mod record;

pub use config::{ExperimentConfig, OutputFormat, Scenario, SearchMode};
pub use error::{Result, SimError};
pub use experiments::{run, run_classical_check, run_custom, run_line, run_scaling, run_search};
pub use record::{RunRecord, RunResult};

// The book's code blocks, run by `cargo test --doc`.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/walk-model.md")]
    mod walk_model {}
    #[doc = include_str!("../../../book/src/kernel.md")]
    mod kernel {}
    #[doc = include_str!("../../../book/src/coins.md")]
    mod coins {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "SZSIM_THREADS";

/// Sizes the global thread pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| SimError::Validation(format!("{THREADS_ENV}={value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| SimError::Validation(e.to_string()))?;
    Ok(Some(threads))
}
