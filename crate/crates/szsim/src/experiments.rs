use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use szegedy::graph::{
    biased_line, complete_graph, cycle_graph, mark_apr, mixed_parity_walk, LineEmbedding, MarkedSet,
};
use szegedy::state::NORM_TOL;
use szegedy::{Complex64, PhaseConfig, Register, SzegedyWalk, TransitionMatrix, WalkState};

use crate::config::{ExperimentConfig, Scenario, SearchMode, DEFAULT_CLASSICAL_NODES, DEFAULT_SEARCH_NODES};
use crate::error::{Result, SimError};
use crate::input::load_walk;
use crate::record::{first_local_max, log_log_slope, Distribution, Metadata, RunRecord, RunResult};

/// Right-jump probability of the Hadamard-coin line, `1 / (4 - 2 sqrt 2)`.
pub fn hadamard_p_right() -> f64 {
    1.0 / (4.0 - 2.0 * 2f64.sqrt())
}

/// Runs the configured experiment after validating it.
pub fn run(config: &ExperimentConfig) -> Result<RunRecord> {
    config.validate()?;
    let record = match config.scenario {
        s if s.is_line() => run_line(config),
        Scenario::SearchComplete => run_search(config),
        Scenario::ClassicalCheck => run_classical_check(config),
        Scenario::ScalingBench => run_scaling(config),
        Scenario::Custom => run_custom(config),
        _ => unreachable!(),
    }?;
    record.check_distributions()?;
    Ok(record)
}

fn metadata(config: &ExperimentConfig, notes: BTreeMap<String, serde_json::Value>) -> Metadata {
    Metadata {
        scenario: config.scenario.name().to_string(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        notes,
    }
}

/// Norm bookkeeping between steps: check against [`NORM_TOL`] and optionally
/// renormalize every `k` steps.
struct NormGuard {
    renorm_every: Option<usize>,
}

impl NormGuard {
    fn after_step(&self, state: &mut WalkState, step: usize) -> Result<()> {
        let norm = state.norm();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(SimError::Numerical(format!(
                "state norm {norm} after step {step} is off by more than {NORM_TOL:e}"
            )));
        }
        if let Some(k) = self.renorm_every {
            if step % k == 0 {
                state.renormalize();
            }
        }
        Ok(())
    }
}

/// The walk behind a line scenario on a cycle of `emb.n_nodes()` nodes.
pub fn line_walk(scenario: Scenario, emb: &LineEmbedding) -> Result<(TransitionMatrix, PhaseConfig)> {
    let n = emb.n_nodes();
    let hadamard = || {
        let p = hadamard_p_right();
        biased_line(n, p, 1.0 - p, 0.0)
    };
    let ntilde = || -> szegedy::Result<_> {
        let (g, phases) = biased_line(n, 0.5, 0.5, FRAC_PI_2)?;
        let (_, link) = phases.into_parts();
        Ok((g, PhaseConfig::new(vec![FRAC_PI_2; n], link)?))
    };
    let walk = match scenario {
        Scenario::LineX => (cycle_graph(n)?, PhaseConfig::standard(n)),
        Scenario::LineHadamard => hadamard()?,
        Scenario::LineNtilde => ntilde()?,
        Scenario::LineMixed => {
            let (gh, ph) = hadamard()?;
            let (gn, pn) = ntilde()?;
            mixed_parity_walk((&gh, &ph), (&gn, &pn))?
        }
        other => {
            return Err(SimError::Validation(format!("{} is not a line walk", other.name())));
        }
    };
    Ok(walk)
}

/// `(|0>_1 |1>_2 + |0>_1 |-1>_2) / sqrt 2` on the cycle.
pub fn line_initial_state(emb: &LineEmbedding) -> Result<WalkState> {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(WalkState::from_amplitudes(
        emb.n_nodes(),
        [((0, emb.index_of(1)), a), ((0, emb.index_of(-1)), a)],
    )?)
}

fn distributions_by_coordinate(emb: &LineEmbedding) -> (Vec<i64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..emb.n_nodes()).collect();
    order.sort_by_key(|&i| emb.coordinate_of(i));
    let nodes = order.iter().map(|&i| emb.coordinate_of(i)).collect();
    (nodes, order)
}

pub fn run_line(config: &ExperimentConfig) -> Result<RunRecord> {
    let steps = config.steps();
    let emb = LineEmbedding::for_steps(steps);
    let (g, phases) = line_walk(config.scenario, &emb)?;
    let walk = SzegedyWalk::new(&g, &phases)?;
    let mut state = line_initial_state(&emb)?;
    let guard = NormGuard {
        renorm_every: config.renorm_every,
    };
    let (nodes, order) = distributions_by_coordinate(&emb);
    let snapshot = |state: &WalkState, step: usize| -> Result<Distribution> {
        let p = state.measure(Register::First)?;
        Ok(Distribution {
            step,
            probabilities: order.iter().map(|&i| p[i]).collect(),
        })
    };

    let mut dists = vec![snapshot(&state, 0)?];
    let mut seconds = Vec::with_capacity(steps);
    for t in 1..=steps {
        let start = Instant::now();
        walk.step_in_place(&mut state)?;
        seconds.push(start.elapsed().as_secs_f64());
        guard.after_step(&mut state, t)?;
        dists.push(snapshot(&state, t)?);
    }

    let mut notes = BTreeMap::new();
    notes.insert("cycle_nodes".into(), json!(emb.n_nodes()));
    notes.insert("step_axis".into(), json!("single"));
    notes.insert("register".into(), json!("first"));
    Ok(RunRecord {
        metadata: metadata(config, notes),
        result: RunResult::Distributions { nodes, steps: dists },
        step_seconds: seconds,
    })
}

/// `(pi/4) sqrt(N / 2M) - 1/4`, rounded; only meaningful for `N > 2M`.
pub fn predicted_t_max(n: usize, m: usize) -> Option<usize> {
    if m == 0 || n <= 2 * m {
        return None;
    }
    let t = PI / 4.0 * (n as f64 / (2.0 * m as f64)).sqrt() - 0.25;
    Some(t.round() as usize)
}

/// Marked-node search on the complete graph.
///
/// The initial state is the uniform superposition of the unmarked walk's
/// `psi_i` states. Each recorded step is one double step `W_s`; the marked
/// probability is read on the first register.
pub fn run_search(config: &ExperimentConfig) -> Result<RunRecord> {
    let n = config.n_nodes.unwrap_or(DEFAULT_SEARCH_NODES);
    let steps = config.steps();
    let marked = MarkedSet::new(config.marked.iter().copied());
    marked.validate(n)?;
    let g = complete_graph(n)?;
    let mut state = SzegedyWalk::standard(&g).uniform_superposition();
    let walk = match config.mode {
        SearchMode::Apr => SzegedyWalk::new(&g, &PhaseConfig::vertex_phased(mark_apr(n, &marked, PI)?))?,
        SearchMode::Absorb => SzegedyWalk::standard(&g.absorb(&marked)?),
    };
    let guard = NormGuard {
        renorm_every: config.renorm_every,
    };
    let on_marked = |state: &WalkState| -> Result<f64> {
        let p = state.measure(Register::First)?;
        Ok(marked.nodes().iter().map(|&k| p[k]).sum())
    };

    let mut probability = vec![on_marked(&state)?];
    let mut seconds = Vec::with_capacity(steps);
    for t in 1..=steps {
        let start = Instant::now();
        walk.step_in_place(&mut state)?;
        walk.step_in_place(&mut state)?;
        seconds.push(start.elapsed().as_secs_f64());
        guard.after_step(&mut state, t)?;
        probability.push(on_marked(&state)?);
    }
    if let Some((t, p)) = probability
        .iter()
        .enumerate()
        .find(|(_, &p)| !(-1e-12..=1.0 + 1e-9).contains(&p))
    {
        return Err(SimError::Numerical(format!("marked probability {p} at step {t}")));
    }

    let t_max_predicted = predicted_t_max(n, marked.len());
    let mut notes = BTreeMap::new();
    notes.insert("n_nodes".into(), json!(n));
    notes.insert("step_axis".into(), json!("double"));
    notes.insert("register".into(), json!("first"));
    Ok(RunRecord {
        metadata: metadata(config, notes),
        result: RunResult::MarkedProbability {
            marked: marked.nodes().iter().copied().collect(),
            first_local_max: first_local_max(&probability),
            probability,
            t_max_predicted,
        },
        step_seconds: seconds,
    })
}

/// Dense random chain and phases for the benchmark; fixed by `seed` and `n`.
pub fn random_walk(n: usize, seed: u64) -> Result<(TransitionMatrix, PhaseConfig)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).rotate_left(32));
    let mut g = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() + 1e-3);
    for mut col in g.column_iter_mut() {
        let s = col.sum();
        col /= s;
        let k = col.iamax();
        let s = col.sum();
        col[k] += 1.0 - s;
    }
    let apr = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
    let link = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() * TAU);
    Ok((TransitionMatrix::new(g)?, PhaseConfig::new(apr, link)?))
}

/// Bytes streamed before each benchmark timing to push the walk out of
/// cache; larger than the last-level cache of common desktop and server
/// parts.
pub const EVICTION_BYTES: usize = 256 << 20;

/// Walk and initial state timed by the scaling benchmark.
pub fn bench_walk(n: usize, seed: u64) -> Result<(SzegedyWalk, WalkState)> {
    let (g, phases) = random_walk(n, seed)?;
    let walk = SzegedyWalk::new(&g, &phases)?;
    let state = walk.uniform_superposition();
    Ok((walk, state))
}

fn evict(buffer: &mut [u64]) {
    for x in buffer.iter_mut() {
        *x = x.wrapping_add(1);
    }
    std::hint::black_box(buffer);
}

/// Smallest wall-clock time of one single step over `repeats` timings, each
/// taken right after the caches have been flushed by streaming `eviction`.
///
/// Warm timings would compare an `N = 256` state sitting in L2 with an
/// `N = 1024` state in main memory; cold timings put every size on the same
/// footing.
pub fn time_step(n: usize, seed: u64, repeats: usize, eviction: &mut [u64]) -> Result<f64> {
    let (walk, mut state) = bench_walk(n, seed)?;
    let mut best = f64::INFINITY;
    for _ in 0..repeats {
        evict(eviction);
        let start = Instant::now();
        walk.step_in_place(&mut state)?;
        best = best.min(start.elapsed().as_secs_f64());
    }
    let norm = state.norm();
    if !((norm - 1.0).abs() <= NORM_TOL) {
        return Err(SimError::Numerical(format!("benchmark state norm drifted to {norm}")));
    }
    Ok(best)
}

pub fn run_scaling(config: &ExperimentConfig) -> Result<RunRecord> {
    let sizes = config.sizes();
    let mut eviction = vec![0u64; EVICTION_BYTES / 8];
    let seconds = sizes
        .iter()
        .map(|&n| time_step(n, config.seed, config.repeats, &mut eviction))
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&sizes, &seconds);
    let mut notes = BTreeMap::new();
    notes.insert("timing".into(), json!("minimum over repeats of one cold-cache single step"));
    notes.insert("threads".into(), json!(rayon::current_num_threads()));
    Ok(RunRecord {
        metadata: metadata(config, notes),
        step_seconds: seconds.clone(),
        result: RunResult::Scaling { sizes, seconds, slope },
    })
}

pub fn run_classical_check(config: &ExperimentConfig) -> Result<RunRecord> {
    let g = match &config.input {
        Some(path) => load_walk(path)?.g,
        None => complete_graph(config.n_nodes.unwrap_or(DEFAULT_CLASSICAL_NODES))?,
    };
    let n = g.n_nodes();
    if config.start >= n {
        return Err(SimError::Validation(format!("start node {} is outside 0..{n}", config.start)));
    }
    let mut p = vec![0.0; n];
    p[config.start] = 1.0;
    let mut dists = vec![Distribution {
        step: 0,
        probabilities: p.clone(),
    }];
    let mut seconds = Vec::new();
    for t in 1..=config.steps() {
        let start = Instant::now();
        p = g.classical_evolve(&p, 1)?;
        seconds.push(start.elapsed().as_secs_f64());
        dists.push(Distribution {
            step: t,
            probabilities: p.clone(),
        });
    }
    let mut notes = BTreeMap::new();
    notes.insert("n_nodes".into(), json!(n));
    Ok(RunRecord {
        metadata: metadata(config, notes),
        result: RunResult::Distributions {
            nodes: (0..n as i64).collect(),
            steps: dists,
        },
        step_seconds: seconds,
    })
}

/// Walk from a graph or coin file, started in `psi_start`.
pub fn run_custom(config: &ExperimentConfig) -> Result<RunRecord> {
    let path = config
        .input
        .as_ref()
        .ok_or_else(|| SimError::Validation("custom runs need --input".into()))?;
    let loaded = load_walk(path)?;
    let n = loaded.g.n_nodes();
    if config.start >= n {
        return Err(SimError::Validation(format!("start node {} is outside 0..{n}", config.start)));
    }
    let walk = SzegedyWalk::new(&loaded.g, &loaded.phases)?;
    let start_node = config.start;
    let mut state = WalkState::from_amplitudes(
        n,
        (0..n).map(|k| ((start_node, k), walk.psi()[(k, start_node)])),
    )?;
    let guard = NormGuard {
        renorm_every: config.renorm_every,
    };
    let mut dists = vec![Distribution {
        step: 0,
        probabilities: state.measure(Register::First)?,
    }];
    let mut seconds = Vec::new();
    for t in 1..=config.steps() {
        let start = Instant::now();
        walk.step_in_place(&mut state)?;
        seconds.push(start.elapsed().as_secs_f64());
        guard.after_step(&mut state, t)?;
        dists.push(Distribution {
            step: t,
            probabilities: state.measure(Register::First)?,
        });
    }
    let mut notes = BTreeMap::new();
    notes.insert("n_nodes".into(), json!(n));
    notes.insert("step_axis".into(), json!("single"));
    if let Some(class) = loaded.lemma_class {
        notes.insert("lemma_class".into(), json!(format!("{class:?}")));
    }
    Ok(RunRecord {
        metadata: metadata(config, notes),
        result: RunResult::Distributions {
            nodes: (0..n as i64).collect(),
            steps: dists,
        },
        step_seconds: seconds,
    })
}
