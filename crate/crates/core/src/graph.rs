//! The classical side of the walk: transition matrices, adjacency
//! normalization, graph families and node marking.
//!
//! Transition matrices are column-stochastic: `G[(j, i)]` is the probability
//! of jumping from node `i` to node `j`, and every column sums to one.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, WalkError};
use crate::phases::PhaseConfig;

/// Tolerance on column sums of a transition matrix.
pub const STOCHASTIC_TOL: f64 = 1e-10;

/// A column-stochastic, nonnegative `N x N` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    g: DMatrix<f64>,
}

impl TransitionMatrix {
    /// Validates `g` and wraps it. Columns are never renormalized.
    pub fn new(g: DMatrix<f64>) -> Result<Self> {
        if !g.is_square() {
            return Err(WalkError::DimensionMismatch {
                expected: g.nrows(),
                found: g.ncols(),
            });
        }
        if g.nrows() == 0 {
            return Err(WalkError::TooSmall { n: 0, min: 1 });
        }
        for (i, col) in g.column_iter().enumerate() {
            let sum: f64 = col.iter().sum();
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            if !(min >= 0.0) || !((sum - 1.0).abs() <= STOCHASTIC_TOL) {
                return Err(WalkError::NotStochastic {
                    column: i,
                    sum,
                    min,
                });
            }
        }
        Ok(Self { g })
    }

    /// Builds `G[(to, from)] = f(to, from)` and validates it.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, f))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            g: DMatrix::identity(n, n),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.g.nrows()
    }

    /// Probability of the jump `from -> to`.
    pub fn prob(&self, to: usize, from: usize) -> f64 {
        self.g[(to, from)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.g
    }

    /// Outgoing distribution of node `from`.
    pub fn column(&self, from: usize) -> &[f64] {
        let n = self.n_nodes();
        &self.g.as_slice()[from * n..(from + 1) * n]
    }

    /// `p(t) = G^t p(0)`.
    pub fn classical_evolve(&self, p0: &[f64], t: usize) -> Result<Vec<f64>> {
        let n = self.n_nodes();
        if p0.len() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: p0.len(),
            });
        }
        check_distribution(p0)?;
        let mut p = DVector::from_column_slice(p0);
        for _ in 0..t {
            p = &self.g * p;
        }
        Ok(p.as_slice().to_vec())
    }

    /// Turns every marked node into a sink: its column becomes `e_i`.
    pub fn absorb(&self, marked: &MarkedSet) -> Result<Self> {
        if marked.is_empty() {
            return Err(WalkError::EmptyMarkedSet);
        }
        let n = self.n_nodes();
        marked.validate(n)?;
        let mut g = self.g.clone();
        for &m in marked.nodes() {
            let mut col = g.column_mut(m);
            col.fill(0.0);
            col[m] = 1.0;
        }
        Ok(Self { g })
    }
}

/// Checks that `p` is a probability vector within [`STOCHASTIC_TOL`].
pub fn check_distribution(p: &[f64]) -> Result<()> {
    let sum: f64 = p.iter().sum();
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min >= 0.0) || !((sum - 1.0).abs() <= STOCHASTIC_TOL) {
        return Err(WalkError::NotDistribution { sum, min });
    }
    Ok(())
}

/// 0/1 adjacency matrix of a graph. Self-loops are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    a: DMatrix<u8>,
    symmetric: bool,
}

impl AdjacencyMatrix {
    pub fn new(a: DMatrix<u8>) -> Result<Self> {
        if !a.is_square() {
            return Err(WalkError::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        if let Some(bad) = a.iter().find(|&&x| x > 1) {
            return Err(WalkError::InvalidCoinSet(format!(
                "adjacency entries must be 0 or 1, found {bad}"
            )));
        }
        let symmetric = a == a.transpose();
        Ok(Self { a, symmetric })
    }

    /// Undirected graph from a list of edges; `(i, i)` adds a self-loop.
    pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = DMatrix::zeros(n, n);
        for &(i, j) in edges {
            for node in [i, j] {
                if node >= n {
                    return Err(WalkError::InvalidNode { node, n });
                }
            }
            a[(i, j)] = 1;
            a[(j, i)] = 1;
        }
        Ok(Self { a, symmetric: true })
    }

    /// Undirected backbone of a weighted graph: an edge wherever either
    /// direction has nonzero probability.
    pub fn backbone(g: &TransitionMatrix) -> Self {
        let m = g.matrix();
        let n = g.n_nodes();
        let a = DMatrix::from_fn(n, n, |i, j| u8::from(m[(i, j)] > 0.0 || m[(j, i)] > 0.0));
        Self { a, symmetric: true }
    }

    pub fn n_nodes(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.a[(i, j)] == 1
    }

    pub fn matrix(&self) -> &DMatrix<u8> {
        &self.a
    }

    /// Column sum; equals the row sum for undirected graphs.
    pub fn degree(&self, i: usize) -> usize {
        self.a.column(i).iter().map(|&x| x as usize).sum()
    }

    /// Neighbors of `i` (nodes `k` with `A[(i, k)] = 1`) in ascending order.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n_nodes()).filter(|&k| self.has_edge(i, k)).collect()
    }

    /// `G[(j, i)] = A[(j, i)] / d_i`.
    pub fn normalize(&self) -> Result<TransitionMatrix> {
        let n = self.n_nodes();
        let degrees: Vec<usize> = (0..n).map(|i| self.degree(i)).collect();
        if let Some(node) = degrees.iter().position(|&d| d == 0) {
            return Err(WalkError::IsolatedNode { node });
        }
        TransitionMatrix::from_fn(n, |j, i| f64::from(self.a[(j, i)]) / degrees[i] as f64)
    }
}

/// A set of marked nodes and the APR phase they evolve with.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedSet {
    nodes: BTreeSet<usize>,
    mark_phase: f64,
}

impl MarkedSet {
    /// Marked nodes with `theta_k = 0`, the phase that reproduces the `-1` coin.
    pub fn new(nodes: impl IntoIterator<Item = usize>) -> Self {
        Self::with_phase(nodes, 0.0)
    }

    pub fn with_phase(nodes: impl IntoIterator<Item = usize>, mark_phase: f64) -> Self {
        Self {
            nodes: nodes.into_iter().collect(),
            mark_phase,
        }
    }

    pub fn nodes(&self) -> &BTreeSet<usize> {
        &self.nodes
    }

    pub fn contains(&self, node: usize) -> bool {
        self.nodes.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mark_phase(&self) -> f64 {
        self.mark_phase
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.nodes.iter().find(|&&k| k >= n) {
            Some(&node) => Err(WalkError::InvalidNode { node, n }),
            None => Ok(()),
        }
    }
}

/// APR vector with `base_phase` everywhere and the mark phase on marked nodes.
pub fn mark_apr(n: usize, marked: &MarkedSet, base_phase: f64) -> Result<Vec<f64>> {
    marked.validate(n)?;
    Ok((0..n)
        .map(|i| {
            if marked.contains(i) {
                marked.mark_phase()
            } else {
                base_phase
            }
        })
        .collect())
}

/// Complete graph without loops, `G[(j, i)] = (1 - delta_ji) / (N - 1)`.
pub fn complete_graph(n: usize) -> Result<TransitionMatrix> {
    if n < 2 {
        return Err(WalkError::TooSmall { n, min: 2 });
    }
    let w = 1.0 / (n - 1) as f64;
    TransitionMatrix::from_fn(n, |j, i| if i == j { 0.0 } else { w })
}

/// Unbiased walk on a cycle: half to each neighbor, with wraparound.
pub fn cycle_graph(n: usize) -> Result<TransitionMatrix> {
    if n < 2 {
        return Err(WalkError::TooSmall { n, min: 2 });
    }
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        g[((i + 1) % n, i)] += 0.5;
        g[((i + n - 1) % n, i)] += 0.5;
    }
    TransitionMatrix::new(g)
}

/// Maps signed line coordinates onto the indices of a finite cycle.
///
/// Node 0 sits at index 0; negative nodes wrap down from `N - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LineEmbedding {
    n: usize,
}

impl LineEmbedding {
    /// Smallest power of two strictly greater than `2 t + 2`, so a wavefront
    /// moving one node per step never wraps around within `t` steps.
    pub fn for_steps(t_steps: usize) -> Self {
        let min = 2 * t_steps + 2;
        let mut n = 1usize;
        while n <= min {
            n <<= 1;
        }
        Self { n }
    }

    pub fn n_nodes(&self) -> usize {
        self.n
    }

    pub fn index_of(&self, coordinate: i64) -> usize {
        coordinate.rem_euclid(self.n as i64) as usize
    }

    pub fn coordinate_of(&self, index: usize) -> i64 {
        if index < self.n / 2 {
            index as i64
        } else {
            index as i64 - self.n as i64
        }
    }

    /// Signed coordinates of every cycle index, in index order.
    pub fn coordinates(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.coordinate_of(i)).collect()
    }
}

/// Cycle large enough to host a `t_steps` line walk, with its coordinate map.
pub fn line_embedding(t_steps: usize) -> (TransitionMatrix, LineEmbedding) {
    let emb = LineEmbedding::for_steps(t_steps);
    let g = cycle_graph(emb.n_nodes()).expect("embedding has at least 4 nodes");
    (g, emb)
}

/// Walk on an `n`-cycle jumping right with `p_right` and left with `p_left`,
/// with link phase `phase_left` on every leftward edge state `|i>_1 |i-1>_2`.
/// APR phases are `pi` everywhere.
pub fn biased_line(
    n: usize,
    p_right: f64,
    p_left: f64,
    phase_left: f64,
) -> Result<(TransitionMatrix, PhaseConfig)> {
    if n < 3 {
        return Err(WalkError::TooSmall { n, min: 3 });
    }
    let mut g = DMatrix::zeros(n, n);
    let mut link = DMatrix::zeros(n, n);
    for i in 0..n {
        let right = (i + 1) % n;
        let left = (i + n - 1) % n;
        g[(right, i)] = p_right;
        g[(left, i)] = p_left;
        link[(i, left)] = phase_left;
    }
    let g = TransitionMatrix::new(g)?;
    let phases = PhaseConfig::new(vec![PI; n], link)?;
    Ok((g, phases))
}

/// Combines two walks on the same node set by node parity: even nodes take
/// their transition column, link-phase row and APR phase from `even`, odd
/// nodes from `odd`.
pub fn mixed_parity_walk(
    even: (&TransitionMatrix, &PhaseConfig),
    odd: (&TransitionMatrix, &PhaseConfig),
) -> Result<(TransitionMatrix, PhaseConfig)> {
    let n = even.0.n_nodes();
    for found in [even.1.n_nodes(), odd.0.n_nodes(), odd.1.n_nodes()] {
        if found != n {
            return Err(WalkError::DimensionMismatch { expected: n, found });
        }
    }
    let pick = |i: usize| if i % 2 == 0 { even } else { odd };
    let g = DMatrix::from_fn(n, n, |j, i| pick(i).0.prob(j, i));
    let link = DMatrix::from_fn(n, n, |i, k| pick(i).1.link_phase(i, k));
    let apr = (0..n).map(|i| pick(i).1.apr()[i]).collect();
    Ok((TransitionMatrix::new(g)?, PhaseConfig::new(apr, link)?))
}
