use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by walk construction, evolution and coin casting.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("column {column} is not stochastic (sum {sum}, min entry {min})")]
    NotStochastic { column: usize, sum: f64, min: f64 },

    #[error("not a probability distribution (sum {sum}, min entry {min})")]
    NotDistribution { sum: f64, min: f64 },

    #[error("node {node} has no edges")]
    IsolatedNode { node: usize },

    #[error("graph needs at least {min} nodes, got {n}")]
    TooSmall { n: usize, min: usize },

    #[error("node {node} is out of range for {n} nodes")]
    InvalidNode { node: usize, n: usize },

    #[error("marked set is empty")]
    EmptyMarkedSet,

    #[error("state norm {norm} deviates from 1")]
    UnnormalizedState { norm: f64 },

    #[error("coin at node {node} is not unitary (max |C^dag C - 1| = {deviation:e})")]
    NotUnitary { node: usize, deviation: f64 },

    #[error("coin at node {node} is not castable (eigenvalues {eigenvalues:?})")]
    NotCastable {
        node: usize,
        eigenvalues: Vec<Complex64>,
    },

    #[error("transition {from} -> {to} carries probability outside the adjacency")]
    IncompatibleSupport { from: usize, to: usize },

    #[error("invalid coin set: {0}")]
    InvalidCoinSet(String),

    #[error("dense operator for {n} nodes exceeds the {max}-node guard")]
    TooLarge { n: usize, max: usize },

    #[error("edge space of dimension {dim} exceeds the dense-check limit {max}")]
    DimensionLimit { dim: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, WalkError>;
