//! Conversion between coined walks (flip-flop shift) and Szegedy walks.
//!
//! A coin `C_i` acting on the `d_i` outgoing edges of node `i` matches a
//! Szegedy walk exactly when it has the phase-rotation form
//! `C_i = (1 - exp(i theta_i)) |w_i><w_i| - 1`, with
//! `w_i = sum_k exp(i phi_ik) sqrt(G_ki) |k>`. Spectrally: `d_i - 1`
//! eigenvalues equal `-1` and one eigenvalue equals `-exp(i theta_i)`, whose
//! eigenvector carries the transition amplitudes and the link phases.
//!
//! The four castable classes nest as
//!
//! | class          | APR phases        | link phases        |
//! |----------------|-------------------|--------------------|
//! | `Standard`     | all `pi`          | none               |
//! | `LinkPhased`   | all `pi`          | any                |
//! | `VertexPhased` | any, per node     | none               |
//! | `GraphPhased`  | any, per node     | any                |

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::graph::{AdjacencyMatrix, TransitionMatrix};
use crate::oracle::{dense_double, dense_unitary, MAX_ORACLE_NODES};
use crate::phases::{reduce_angle, PhaseConfig};

/// Tolerance on `C^dag C = 1` for coins.
pub const UNITARY_TOL: f64 = 1e-10;

/// Default tolerance for deciding that an eigenvalue equals `-1`.
pub const DEFAULT_CAST_TOL: f64 = 1e-8;

/// Largest coined edge space [`check_double_castability`] will build densely.
pub const MAX_EDGE_DIMENSION: usize = 10_000;

/// Tolerance of the operator comparisons in [`check_double_castability`].
pub const OPERATOR_TOL: f64 = 1e-10;

/// Amplitudes below this are treated as exact zeros (ghost edges).
const AMPLITUDE_EPS: f64 = 1e-12;

/// One unitary coin per node, each acting on the node's outgoing edges.
///
/// `neighbor_order[i][a]` is the node reached through basis vector `a` of
/// coin `i`. The order is explicit: [`CoinSet::with_adjacency`] uses
/// ascending neighbor indices, [`CoinSet::on_cycle`] puts the right
/// neighbor first.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinSet {
    coins: Vec<DMatrix<Complex64>>,
    neighbor_order: Vec<Vec<usize>>,
}

impl CoinSet {
    pub fn new(coins: Vec<DMatrix<Complex64>>, neighbor_order: Vec<Vec<usize>>) -> Result<Self> {
        let n = coins.len();
        if neighbor_order.len() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: neighbor_order.len(),
            });
        }
        for (i, (coin, order)) in coins.iter().zip(&neighbor_order).enumerate() {
            if !coin.is_square() || coin.nrows() != order.len() {
                return Err(WalkError::InvalidCoinSet(format!(
                    "coin {i} is {}x{} but node {i} lists {} neighbors",
                    coin.nrows(),
                    coin.ncols(),
                    order.len()
                )));
            }
            if order.is_empty() {
                return Err(WalkError::IsolatedNode { node: i });
            }
            let mut seen = order.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != order.len() {
                return Err(WalkError::InvalidCoinSet(format!("node {i} lists a neighbor twice")));
            }
            if let Some(&node) = order.iter().find(|&&k| k >= n) {
                return Err(WalkError::InvalidNode { node, n });
            }
            let deviation = unitarity_defect(coin);
            if !(deviation <= UNITARY_TOL) {
                return Err(WalkError::NotUnitary { node: i, deviation });
            }
        }
        for (i, order) in neighbor_order.iter().enumerate() {
            for &k in order {
                if !neighbor_order[k].contains(&i) {
                    return Err(WalkError::InvalidCoinSet(format!(
                        "edge {i} -> {k} has no reverse edge; coined walks live on undirected graphs"
                    )));
                }
            }
        }
        Ok(Self {
            coins,
            neighbor_order,
        })
    }

    /// Coins whose bases follow ascending neighbor order of `adjacency`.
    pub fn with_adjacency(coins: Vec<DMatrix<Complex64>>, adjacency: &AdjacencyMatrix) -> Result<Self> {
        let orders = (0..adjacency.n_nodes()).map(|i| adjacency.neighbors(i)).collect();
        Self::new(coins, orders)
    }

    /// Coins on an `n`-cycle, each given in the (right, left) basis:
    /// basis vector 0 points to `i + 1`, basis vector 1 to `i - 1`.
    pub fn on_cycle(n: usize, mut coin: impl FnMut(usize) -> DMatrix<Complex64>) -> Result<Self> {
        if n < 3 {
            return Err(WalkError::TooSmall { n, min: 3 });
        }
        let orders = (0..n).map(|i| vec![(i + 1) % n, (i + n - 1) % n]).collect();
        Self::new((0..n).map(&mut coin).collect(), orders)
    }

    pub fn n_nodes(&self) -> usize {
        self.coins.len()
    }

    pub fn coin(&self, node: usize) -> &DMatrix<Complex64> {
        &self.coins[node]
    }

    pub fn coins(&self) -> &[DMatrix<Complex64>] {
        &self.coins
    }

    pub fn neighbor_order(&self, node: usize) -> &[usize] {
        &self.neighbor_order[node]
    }

    pub fn neighbor_orders(&self) -> &[Vec<usize>] {
        &self.neighbor_order
    }

    /// Undirected graph spanned by the coins' neighbor lists.
    pub fn adjacency(&self) -> AdjacencyMatrix {
        let n = self.n_nodes();
        let edges: Vec<(usize, usize)> = self
            .neighbor_order
            .iter()
            .enumerate()
            .flat_map(|(i, ks)| ks.iter().map(move |&k| (i, k)))
            .collect();
        AdjacencyMatrix::undirected(n, &edges).expect("validated indices")
    }

    /// Dimension of the coined walk space (number of directed edges).
    pub fn edge_dimension(&self) -> usize {
        self.neighbor_order.iter().map(Vec::len).sum()
    }

    /// Checks that the coins act on exactly the edges of `adjacency`.
    pub fn check_adjacency(&self, adjacency: &AdjacencyMatrix) -> Result<()> {
        let n = self.n_nodes();
        if adjacency.n_nodes() != n {
            return Err(WalkError::DimensionMismatch {
                expected: n,
                found: adjacency.n_nodes(),
            });
        }
        for i in 0..n {
            let mut order = self.neighbor_order[i].clone();
            order.sort_unstable();
            if order != adjacency.neighbors(i) {
                return Err(WalkError::InvalidCoinSet(format!(
                    "coin {i} acts on neighbors {:?} but the adjacency lists {:?}",
                    self.neighbor_order[i],
                    adjacency.neighbors(i)
                )));
            }
        }
        Ok(())
    }
}

/// Which Szegedy model a coin set can be cast into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LemmaClass {
    /// Reflections about real nonnegative vectors.
    Standard,
    /// Reflections about arbitrary complex vectors.
    LinkPhased,
    /// Phase rotations about real nonnegative vectors.
    VertexPhased,
    /// Phase rotations about arbitrary complex vectors.
    GraphPhased,
}

/// Szegedy parameterization of a castable coin set.
#[derive(Debug, Clone, PartialEq)]
pub struct CastResult {
    pub g: TransitionMatrix,
    pub phases: PhaseConfig,
    pub lemma_class: LemmaClass,
}

/// Spectral data of one castable coin.
#[derive(Debug, Clone)]
struct NodeCast {
    theta: f64,
    /// `(neighbor, probability, link phase)` in the coin's basis order.
    edges: Vec<(usize, f64, f64)>,
    reflection: bool,
    real_amplitudes: bool,
}

fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let d = m.nrows();
    let prod = m.adjoint() * m;
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in 0..d {
            let id = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((prod[(r, c)] - Complex64::new(id, 0.0)).norm());
        }
    }
    worst
}

/// Eigendecomposition of a unitary matrix.
///
/// `cos a (C + C^dag) + sin a i(C - C^dag)` is Hermitian, commutes with `C`
/// and maps the eigenvalue `exp(i b)` of `C` to `2 cos(b - a)`. Distinct
/// eigenvalues of `C` only collide when their angles are symmetric about
/// `a`, so a few irrational angles are tried until every eigenvector passes
/// a residual check.
fn unitary_eigen(c: &DMatrix<Complex64>) -> (Vec<Complex64>, DMatrix<Complex64>) {
    const ANGLES: [f64; 4] = [0.618_033_988_749_895, 1.324_717_957_244_746, 2.236_067_977_499_79, 0.414_213_562_373_095];
    let adj = c.adjoint();
    let sum = c + &adj;
    let diff = (c - &adj) * Complex64::new(0.0, 1.0);
    let mut best: Option<(f64, Vec<Complex64>, DMatrix<Complex64>)> = None;
    for a in ANGLES {
        let h = &sum * Complex64::new(a.cos(), 0.0) + &diff * Complex64::new(a.sin(), 0.0);
        let eig = h.symmetric_eigen();
        let vecs = eig.eigenvectors;
        let mut values = Vec::with_capacity(c.nrows());
        let mut residual = 0.0f64;
        for k in 0..c.ncols() {
            let v = vecs.column(k);
            let cv = c * v;
            let lambda = v.dotc(&cv);
            residual = residual.max((cv - v * lambda).norm());
            values.push(lambda);
        }
        let better = best.as_ref().map_or(true, |(r, _, _)| residual < *r);
        if better {
            best = Some((residual, values, vecs));
        }
        if residual < 1e-12 {
            break;
        }
    }
    let (_, values, vecs) = best.expect("at least one angle tried");
    (values, vecs)
}

fn cast_coin(node: usize, coin: &DMatrix<Complex64>, order: &[usize], tol: f64) -> Result<NodeCast> {
    let d = coin.nrows();
    let minus_one = Complex64::new(-1.0, 0.0);

    let (eigenvalues, q) = unitary_eigen(coin);
    let distinguished: Vec<usize> = (0..d).filter(|&k| (eigenvalues[k] - minus_one).norm() >= tol).collect();
    if distinguished.len() != 1 {
        return Err(WalkError::NotCastable { node, eigenvalues });
    }
    let idx = distinguished[0];
    let lambda = eigenvalues[idx];

    // C + 1 = (lambda + 1) |w><w|, so one application cleans the eigenvector
    // of any residual -1 eigenspace component.
    let mut shifted = coin.clone();
    for k in 0..d {
        shifted[(k, k)] += Complex64::new(1.0, 0.0);
    }
    let mut v: DVector<Complex64> = &shifted * q.column(idx);
    let norm = v.norm();
    v.unscale_mut(norm);

    // gauge: first nonzero amplitude real positive
    if let Some(first) = v.iter().position(|a| a.norm() > AMPLITUDE_EPS) {
        let g = v[first].conj() / v[first].norm();
        v *= g;
    }

    let reflection = (lambda - Complex64::new(1.0, 0.0)).norm() < tol;
    let theta = if reflection { PI } else { reduce_angle((-lambda).arg()) };

    let total: f64 = v.iter().filter(|a| a.norm() > AMPLITUDE_EPS).map(|a| a.norm_sqr()).sum();
    let mut real_amplitudes = true;
    let edges = order
        .iter()
        .zip(v.iter())
        .map(|(&k, a)| {
            if a.norm() <= AMPLITUDE_EPS {
                return (k, 0.0, 0.0);
            }
            let phase = if (a - Complex64::new(a.norm(), 0.0)).norm() < tol {
                0.0
            } else {
                real_amplitudes = false;
                a.arg()
            };
            (k, a.norm_sqr() / total, phase)
        })
        .collect();

    Ok(NodeCast {
        theta,
        edges,
        reflection,
        real_amplitudes,
    })
}

/// Casts a coin set into a Szegedy walk.
///
/// Every coin must have exactly `d_i - 1` eigenvalues within `tol` of `-1`.
/// The remaining eigenvalue `lambda` gives `theta_i = arg(-lambda)` in
/// `[0, 2pi)`; its eigenvector `v`, with the first nonzero amplitude made
/// real positive, gives `G[(k, i)] = |v_k|^2` and `phi[(i, k)] = arg v_k`.
pub fn cast_to_szegedy(coins: &CoinSet, adjacency: &AdjacencyMatrix, tol: f64) -> Result<CastResult> {
    coins.check_adjacency(adjacency)?;
    let n = coins.n_nodes();
    let mut g = DMatrix::zeros(n, n);
    let mut link = DMatrix::zeros(n, n);
    let mut apr = Vec::with_capacity(n);
    let (mut all_reflections, mut all_real) = (true, true);
    for i in 0..n {
        let cast = cast_coin(i, coins.coin(i), coins.neighbor_order(i), tol)?;
        for &(k, p, phase) in &cast.edges {
            g[(k, i)] = p;
            link[(i, k)] = phase;
        }
        apr.push(cast.theta);
        all_reflections &= cast.reflection;
        all_real &= cast.real_amplitudes;
    }
    let lemma_class = match (all_reflections, all_real) {
        (true, true) => LemmaClass::Standard,
        (true, false) => LemmaClass::LinkPhased,
        (false, true) => LemmaClass::VertexPhased,
        (false, false) => LemmaClass::GraphPhased,
    };
    Ok(CastResult {
        g: TransitionMatrix::new(g)?,
        phases: PhaseConfig::new(apr, link)?,
        lemma_class,
    })
}

/// Coins `(1 - exp(i theta_i)) |w_i><w_i| - 1` of a Szegedy walk, with
/// bases in ascending neighbor order of `adjacency`.
///
/// Transitions of zero probability along existing undirected edges stay in
/// the coin space as ghost edges.
pub fn szegedy_to_coins(g: &TransitionMatrix, phases: &PhaseConfig, adjacency: &AdjacencyMatrix) -> Result<CoinSet> {
    let n = g.n_nodes();
    for found in [phases.n_nodes(), adjacency.n_nodes()] {
        if found != n {
            return Err(WalkError::DimensionMismatch { expected: n, found });
        }
    }
    for i in 0..n {
        for k in 0..n {
            if g.prob(k, i) > 0.0 && !(adjacency.has_edge(i, k) && adjacency.has_edge(k, i)) {
                return Err(WalkError::IncompatibleSupport { from: i, to: k });
            }
        }
    }
    let orders: Vec<Vec<usize>> = (0..n).map(|i| adjacency.neighbors(i)).collect();
    szegedy_to_coins_ordered(g, phases, &orders)
}

/// Like [`szegedy_to_coins`] with an explicit basis order per node.
pub fn szegedy_to_coins_ordered(g: &TransitionMatrix, phases: &PhaseConfig, orders: &[Vec<usize>]) -> Result<CoinSet> {
    let n = g.n_nodes();
    if orders.len() != n {
        return Err(WalkError::DimensionMismatch {
            expected: n,
            found: orders.len(),
        });
    }
    let coins = orders
        .iter()
        .enumerate()
        .map(|(i, order)| {
            let mut w = DVector::from_iterator(
                order.len(),
                order
                    .iter()
                    .map(|&k| Complex64::from_polar(g.prob(k, i).sqrt(), phases.link_phase(i, k))),
            );
            let norm = w.norm();
            if (norm * norm - 1.0).abs() > crate::graph::STOCHASTIC_TOL {
                let to = (0..n).find(|k| g.prob(*k, i) > 0.0 && !order.contains(k)).unwrap_or(i);
                return Err(WalkError::IncompatibleSupport { from: i, to });
            }
            w.unscale_mut(norm);
            let factor = Complex64::new(1.0, 0.0) - Complex64::cis(phases.apr()[i]);
            let mut coin = (&w * w.adjoint()) * factor;
            for a in 0..order.len() {
                coin[(a, a)] -= Complex64::new(1.0, 0.0);
            }
            Ok(coin)
        })
        .collect::<Result<Vec<_>>>()?;
    CoinSet::new(coins, orders.to_vec())
}

/// Outcome of [`check_double_castability`].
#[derive(Debug, Clone, PartialEq)]
pub enum DoubleCastStatus {
    /// Two coined steps equal one double Szegedy step with absorbing marks.
    Equivalent,
    NotEquivalent,
    /// The coins are outside the `{phase rotation, -1}` family.
    Undetermined(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleCastReport {
    pub status: DoubleCastStatus,
    /// Nodes carrying the `-1` coin.
    pub marked: Vec<usize>,
    /// `max |U_c^2 - W'_s|` on the coined edge space, plus any leakage of
    /// `W'_s` out of it.
    pub double_step_max_diff: Option<f64>,
    /// `max |U_c - U'_s|` on the coined edge space.
    pub single_step_max_diff: Option<f64>,
    /// Marked nodes whose self-loop state picks up a `-1` under the
    /// APR-marked single step relative to the absorbing one.
    pub self_loop_sign_flips: Vec<usize>,
    /// Whether `U_s(theta)` equals `U'_s` up to a sign on exactly the marked
    /// self-loop states.
    pub single_step_relation_holds: Option<bool>,
}

/// Checks whether a coin set built from phase-rotation coins and `-1` coins
/// is reproduced by the double Szegedy operator with absorbing vertices.
///
/// Nodes with the `-1` coin are treated as marked. The coined operator
/// `U_c = S_c C` is built densely on the directed-edge space and squared,
/// then compared with `W'_s = U'_s^2` of the absorbing walk (marked columns
/// replaced by self-loops) from the dense oracle. Any coin that is neither
/// `-1` nor of phase-rotation form makes the result
/// [`DoubleCastStatus::Undetermined`].
pub fn check_double_castability(coins: &CoinSet, adjacency: &AdjacencyMatrix) -> Result<DoubleCastReport> {
    coins.check_adjacency(adjacency)?;
    let n = coins.n_nodes();
    let dim = coins.edge_dimension();
    if dim > MAX_EDGE_DIMENSION {
        return Err(WalkError::DimensionLimit {
            dim,
            max: MAX_EDGE_DIMENSION,
        });
    }
    if n > MAX_ORACLE_NODES {
        return Err(WalkError::DimensionLimit {
            dim: n * n,
            max: MAX_ORACLE_NODES * MAX_ORACLE_NODES,
        });
    }

    let mut marked = Vec::new();
    let mut g = DMatrix::zeros(n, n);
    let mut link = DMatrix::zeros(n, n);
    let mut apr = vec![PI; n];
    for i in 0..n {
        let coin = coins.coin(i);
        let minus_identity = (0..coin.nrows())
            .flat_map(|r| (0..coin.ncols()).map(move |c| (r, c)))
            .all(|(r, c)| {
                let want = if r == c { -1.0 } else { 0.0 };
                (coin[(r, c)] - Complex64::new(want, 0.0)).norm() < DEFAULT_CAST_TOL
            });
        if minus_identity {
            marked.push(i);
            g[(i, i)] = 1.0;
            continue;
        }
        match cast_coin(i, coin, coins.neighbor_order(i), DEFAULT_CAST_TOL) {
            Ok(cast) => {
                for &(k, p, phase) in &cast.edges {
                    g[(k, i)] = p;
                    link[(i, k)] = phase;
                }
                apr[i] = cast.theta;
            }
            Err(_) => {
                return Ok(DoubleCastReport {
                    status: DoubleCastStatus::Undetermined(format!(
                        "coin {i} is neither -1 nor a phase rotation"
                    )),
                    marked,
                    double_step_max_diff: None,
                    single_step_max_diff: None,
                    self_loop_sign_flips: Vec::new(),
                    single_step_relation_holds: None,
                })
            }
        }
    }

    let g_abs = TransitionMatrix::new(g)?;
    let phases_abs = PhaseConfig::new(apr.clone(), link.clone())?;
    let mut apr_marked = apr;
    for &m in &marked {
        apr_marked[m] = 0.0;
    }
    let phases_marked = PhaseConfig::new(apr_marked, link)?;

    // coined operator on the directed-edge basis
    let arcs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| coins.neighbor_order(i).iter().map(move |&k| (i, k)))
        .collect();
    let arc_index: HashMap<(usize, usize), usize> = arcs.iter().enumerate().map(|(a, &e)| (e, a)).collect();
    let mut coin_op = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..n {
        let order = coins.neighbor_order(i);
        let coin = coins.coin(i);
        for (a, &ka) in order.iter().enumerate() {
            for (b, &kb) in order.iter().enumerate() {
                coin_op[(arc_index[&(i, kb)], arc_index[&(i, ka)])] = coin[(b, a)];
            }
        }
    }
    let mut shift = DMatrix::<Complex64>::zeros(dim, dim);
    for (a, &(i, k)) in arcs.iter().enumerate() {
        shift[(arc_index[&(k, i)], a)] = Complex64::new(1.0, 0.0);
    }
    let coined = shift * coin_op;
    let coined_sq = &coined * &coined;

    let flat: Vec<usize> = arcs.iter().map(|&(i, k)| i * n + k).collect();
    let single_abs = dense_unitary(&g_abs, &phases_abs)?;
    let double_abs = dense_double(&g_abs, &phases_abs, &g_abs, &phases_abs)?;
    let double_diff = (double_abs.restrict(&flat) - &coined_sq)
        .iter()
        .map(|z| z.norm())
        .fold(double_abs.leakage(&flat), f64::max);
    let single_diff = (single_abs.restrict(&flat) - &coined)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);

    // single-step relation on the full N^2 space
    let single_marked = dense_unitary(&g_abs, &phases_marked)?;
    let (a, b) = (single_marked.matrix(), single_abs.matrix());
    let mut flips = Vec::new();
    let mut relation = true;
    for x in 0..n * n {
        let (ca, cb) = (a.column(x), b.column(x));
        let plus = (ca - cb).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let minus = (ca + cb).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let (i, j) = (x / n, x % n);
        let marked_loop = i == j && marked.contains(&i);
        if minus < OPERATOR_TOL && plus >= OPERATOR_TOL {
            flips.push(i);
            relation &= marked_loop;
        } else if plus < OPERATOR_TOL {
            relation &= !marked_loop;
        } else {
            relation = false;
        }
    }

    let status = if double_diff < OPERATOR_TOL {
        DoubleCastStatus::Equivalent
    } else {
        DoubleCastStatus::NotEquivalent
    };
    Ok(DoubleCastReport {
        status,
        marked,
        double_step_max_diff: Some(double_diff),
        single_step_max_diff: Some(single_diff),
        self_loop_sign_flips: flips,
        single_step_relation_holds: Some(relation),
    })
}

/// Common coins.
pub mod standard_coins {
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn pauli_x() -> DMatrix<Complex64> {
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    pub fn hadamard() -> DMatrix<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
    }

    /// `-(1 + i)/2 [[1, 1], [-1, 1]]`: eigenvalue `-i` on `(1, i)/sqrt 2`.
    pub fn n_tilde() -> DMatrix<Complex64> {
        let f = c(-0.5, -0.5);
        DMatrix::from_row_slice(2, 2, &[f, f, -f, f])
    }

    /// Grover diffusion `(C)_ab = 2/d - delta_ab`.
    pub fn grover(d: usize) -> DMatrix<Complex64> {
        let w = 2.0 / d as f64;
        DMatrix::from_fn(d, d, |a, b| c(if a == b { w - 1.0 } else { w }, 0.0))
    }

    pub fn minus_identity(d: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(d, d, |a, b| c(if a == b { -1.0 } else { 0.0 }, 0.0))
    }
}
