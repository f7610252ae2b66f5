use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Standard walk on the cycle (Pauli-X coin): ballistic spreading.
    LineX,
    /// Biased line equivalent to the Hadamard coin.
    LineHadamard,
    /// Uniform line with leftward link phase pi/2 and APR phase pi/2.
    LineNtilde,
    /// Hadamard parameters on even nodes, N-tilde parameters on odd nodes.
    LineMixed,
    /// Marked-node search on the complete graph with the double operator.
    SearchComplete,
    /// Classical chain evolution `p(t) = G^t p(0)`.
    ClassicalCheck,
    /// Wall-clock of one step on random dense chains of several sizes.
    ScalingBench,
    /// Walk loaded from a graph or coin JSON file.
    Custom,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::LineX => "line-x",
            Scenario::LineHadamard => "line-hadamard",
            Scenario::LineNtilde => "line-ntilde",
            Scenario::LineMixed => "line-mixed",
            Scenario::SearchComplete => "search-complete",
            Scenario::ClassicalCheck => "classical-check",
            Scenario::ScalingBench => "scaling-bench",
            Scenario::Custom => "custom",
        }
    }

    pub fn is_line(self) -> bool {
        matches!(
            self,
            Scenario::LineX | Scenario::LineHadamard | Scenario::LineNtilde | Scenario::LineMixed
        )
    }
}

/// How marked nodes enter the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    /// APR phase 0 on marked nodes, `pi` elsewhere.
    #[default]
    Apr,
    /// Marked columns of `G` replaced by self-loops.
    Absorb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub const DEFAULT_LINE_STEPS: usize = 100;
pub const DEFAULT_SEARCH_STEPS: usize = 30;
pub const DEFAULT_STEPS: usize = 10;
pub const DEFAULT_SEARCH_NODES: usize = 1000;
pub const DEFAULT_CLASSICAL_NODES: usize = 4;
pub const DEFAULT_SIZES: [usize; 3] = [256, 512, 1024];
pub const DEFAULT_REPEATS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Single steps for line, classical and custom runs; double steps for
    /// search. Scenario default when absent.
    pub steps: Option<usize>,
    pub n_nodes: Option<usize>,
    pub marked: Vec<usize>,
    pub mode: SearchMode,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub repeats: usize,
    /// Starting node for classical and custom runs.
    pub start: usize,
    pub input: Option<PathBuf>,
    /// Renormalize every `k` steps instead of only checking the norm.
    pub renorm_every: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            steps: None,
            n_nodes: None,
            marked: Vec::new(),
            mode: SearchMode::default(),
            seed: 0,
            sizes: Vec::new(),
            repeats: DEFAULT_REPEATS,
            start: 0,
            input: None,
            renorm_every: None,
            out: None,
            format: OutputFormat::default(),
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = Some(steps);
        self
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.n_nodes = Some(n);
        self
    }

    pub fn with_marked(mut self, marked: impl IntoIterator<Item = usize>) -> Self {
        self.marked = marked.into_iter().collect();
        self
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_sizes(mut self, sizes: impl IntoIterator<Item = usize>) -> Self {
        self.sizes = sizes.into_iter().collect();
        self
    }

    pub fn with_input(mut self, path: impl Into<PathBuf>) -> Self {
        self.input = Some(path.into());
        self
    }

    pub fn steps(&self) -> usize {
        self.steps.unwrap_or(match self.scenario {
            s if s.is_line() => DEFAULT_LINE_STEPS,
            Scenario::SearchComplete => DEFAULT_SEARCH_STEPS,
            _ => DEFAULT_STEPS,
        })
    }

    pub fn sizes(&self) -> Vec<usize> {
        if self.sizes.is_empty() {
            DEFAULT_SIZES.to_vec()
        } else {
            self.sizes.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(SimError::Validation(msg));
        let name = self.scenario.name();
        if self.renorm_every == Some(0) {
            return fail("--renorm must be at least 1".into());
        }
        if self.repeats == 0 {
            return fail("--repeats must be at least 1".into());
        }
        if !self.marked.is_empty() && self.scenario != Scenario::SearchComplete {
            return fail(format!("{name} does not take marked nodes"));
        }
        if !self.sizes.is_empty() && self.scenario != Scenario::ScalingBench {
            return fail(format!("{name} does not take --sizes"));
        }
        if self.input.is_some() && !matches!(self.scenario, Scenario::Custom | Scenario::ClassicalCheck) {
            return fail(format!("{name} does not read an input file"));
        }
        match self.scenario {
            s if s.is_line() => {
                if self.steps() == 0 {
                    return fail("line walks need at least one step".into());
                }
                if self.n_nodes.is_some() {
                    return fail("line walks size their cycle from --steps; drop --n".into());
                }
            }
            Scenario::SearchComplete => {
                let n = self.n_nodes.unwrap_or(DEFAULT_SEARCH_NODES);
                if n < 2 {
                    return fail(format!("search needs at least 2 nodes, got {n}"));
                }
                if self.marked.is_empty() {
                    return fail("search needs at least one --marked node".into());
                }
                if let Some(&k) = self.marked.iter().find(|&&k| k >= n) {
                    return fail(format!("marked node {k} is outside 0..{n}"));
                }
            }
            Scenario::ClassicalCheck => {
                if self.input.is_none() {
                    let n = self.n_nodes.unwrap_or(DEFAULT_CLASSICAL_NODES);
                    if n < 2 {
                        return fail(format!("complete graph needs at least 2 nodes, got {n}"));
                    }
                    if self.start >= n {
                        return fail(format!("start node {} is outside 0..{n}", self.start));
                    }
                } else if self.n_nodes.is_some() {
                    return fail("--n conflicts with --input".into());
                }
            }
            Scenario::ScalingBench => {
                let sizes = self.sizes();
                if sizes.iter().any(|&n| n < 2) {
                    return fail("benchmark sizes must be at least 2".into());
                }
                if sizes.windows(2).any(|w| w[0] >= w[1]) {
                    return fail("benchmark sizes must be strictly ascending".into());
                }
            }
            Scenario::Custom => {
                if self.input.is_none() {
                    return fail("custom runs need --input".into());
                }
                if self.n_nodes.is_some() {
                    return fail("--n conflicts with --input".into());
                }
            }
            _ => unreachable!("line scenarios handled above"),
        }
        Ok(())
    }
}
