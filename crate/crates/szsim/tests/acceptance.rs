//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that the criteria execute
//! sequentially and the allocation counter sees only the scaling run.

mod support;

use std::alloc::{GlobalAlloc, Layout, System};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::*;
use szegedy::coin::{check_double_castability, standard_coins, DoubleCastStatus, DEFAULT_CAST_TOL};
use szegedy::graph::{complete_graph, cycle_graph, mark_apr, MarkedSet};
use szegedy::oracle::dense_unitary;
use szegedy::{
    cast_to_szegedy, szegedy_to_coins, AdjacencyMatrix, CoinSet, LemmaClass, PhaseConfig, Register, SzegedyWalk,
    WalkError,
};
use szsim::experiments::bench_walk;
use szsim::record::total_variation;
use szsim::{run, ExperimentConfig, RunResult, Scenario, SearchMode};

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = System.alloc(layout);
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        System.dealloc(ptr, layout);
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = System.realloc(ptr, layout, new_size);
        if !p.is_null() {
            if new_size >= layout.size() {
                let now = CURRENT.fetch_add(new_size - layout.size(), Ordering::Relaxed) + new_size - layout.size();
                PEAK.fetch_max(now, Ordering::Relaxed);
            } else {
                CURRENT.fetch_sub(layout.size() - new_size, Ordering::Relaxed);
            }
        }
        p
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut worst = 0.0f64;
    let mut states = 0;
    for n in 2..=8 {
        for _ in 0..20 {
            let g = random_stochastic(&mut rng, n, 0.3);
            let phases = random_phases(&mut rng, n);
            let walk = SzegedyWalk::new(&g, &phases).unwrap();
            let dense = dense_unitary(&g, &phases).unwrap();
            for _ in 0..10 {
                let s = random_state(&mut rng, n);
                let fast = walk.step(&s).unwrap();
                worst = worst.max(fast.max_abs_diff(&dense.apply(&s).unwrap()));
                states += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    check(
        worst < 1e-12 && elapsed < Duration::from_secs(60),
        format!("max amplitude error {worst:.2e} over {states} states in {elapsed:.2?}"),
    )
}

fn ballistic_x() -> Outcome {
    let rec = run(&ExperimentConfig::new(Scenario::LineX).with_steps(100)).unwrap();
    let p = rec.distribution(100).unwrap();
    let nodes = rec.nodes().unwrap();
    let mut edge_err = 0.0f64;
    let mut elsewhere = 0.0f64;
    for (&x, &px) in nodes.iter().zip(p) {
        if x.abs() == 100 {
            edge_err = edge_err.max((px - 0.5).abs());
        } else {
            elsewhere = elsewhere.max(px);
        }
    }
    check(
        edge_err < 1e-10 && elsewhere < 1e-12,
        format!("|P(+-100) - 1/2| = {edge_err:.1e}, max mass elsewhere {elsewhere:.1e}"),
    )
}

fn hadamard_ntilde() -> Outcome {
    let line = |s| run(&ExperimentConfig::new(s).with_steps(100)).unwrap();
    let (h, nt, mixed) = (line(Scenario::LineHadamard), line(Scenario::LineNtilde), line(Scenario::LineMixed));
    let (h, nt, mixed) = (h.distribution(100).unwrap(), nt.distribution(100).unwrap(), mixed.distribution(100).unwrap());
    let pointwise = h.iter().zip(nt).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let tv_h = total_variation(mixed, h);
    let tv_n = total_variation(mixed, nt);
    check(
        pointwise < 1e-10 && tv_h > MIXED_TV_FLOOR && tv_n > MIXED_TV_FLOOR,
        format!("H vs N-tilde max diff {pointwise:.1e}; mixed TV {tv_h:.6} / {tv_n:.6} (floor {MIXED_TV_FLOOR})"),
    )
}

fn coin_casting() -> Outcome {
    let n = 16;
    let adj = AdjacencyMatrix::backbone(&cycle_graph(n).unwrap());
    let cast = |c: fn() -> nalgebra::DMatrix<szegedy::Complex64>| {
        cast_to_szegedy(&CoinSet::on_cycle(n, |_| c()).unwrap(), &adj, DEFAULT_CAST_TOL)
    };
    let mut failures = Vec::new();

    let x = cast(standard_coins::pauli_x).unwrap();
    let gu = cycle_graph(n).unwrap();
    if x.lemma_class != LemmaClass::Standard || (x.g.matrix() - gu.matrix()).abs().max() > 1e-10 {
        failures.push("X");
    }

    let h = cast(standard_coins::hadamard).unwrap();
    let hr2 = 1.0 / (4.0 - 2.0 * 2f64.sqrt());
    if h.lemma_class != LemmaClass::Standard || (h.g.prob(1, 0) - hr2).abs() > 1e-10 || (h.g.prob(n - 1, 0) - (1.0 - hr2)).abs() > 1e-10 {
        failures.push("Hadamard");
    }

    let nt = cast(standard_coins::n_tilde).unwrap();
    let nt_ok = nt.lemma_class == LemmaClass::GraphPhased
        && (0..n).all(|i| {
            let left = (i + n - 1) % n;
            (nt.phases.apr()[i] - FRAC_PI_2).abs() < 1e-10
                && (nt.phases.link_phase(i, left) - FRAC_PI_2).abs() < 1e-10
                && nt.phases.link_phase(i, (i + 1) % n).abs() < 1e-10
                && (nt.g.prob(left, i) - 0.5).abs() < 1e-10
        });
    if !nt_ok {
        failures.push("N-tilde");
    }

    if !matches!(
        cast(|| standard_coins::minus_identity(2)),
        Err(WalkError::NotCastable { .. })
    ) {
        failures.push("-1");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (adj, g, phases) = random_castable(&mut rng);
        let coins = szegedy_to_coins(&g, &phases, &adj).unwrap();
        let Ok(back) = cast_to_szegedy(&coins, &adj, DEFAULT_CAST_TOL) else {
            worst = f64::INFINITY;
            continue;
        };
        let again = szegedy_to_coins(&back.g, &back.phases, &adj).unwrap();
        for (a, b) in coins.coins().iter().zip(again.coins()) {
            worst = worst.max(max_entry_diff(a, b));
        }
        worst = worst.max((back.g.matrix() - g.matrix()).abs().max());
        for (a, b) in back.phases.apr().iter().zip(phases.apr()) {
            let d = (a - b).rem_euclid(TAU);
            worst = worst.max(d.min(TAU - d));
        }
    }
    if !(worst < 1e-8) {
        failures.push("round trip");
    }
    check(
        failures.is_empty(),
        format!("X/H/N-tilde/-1 classes checked, round-trip error {worst:.1e} on 100 instances; failed: {failures:?}"),
    )
}

fn search() -> Outcome {
    let start = Instant::now();
    let cfg = |mode| {
        ExperimentConfig::new(Scenario::SearchComplete)
            .with_nodes(1000)
            .with_marked([10, 500])
            .with_steps(20)
            .with_mode(mode)
    };
    let apr = run(&cfg(SearchMode::Apr)).unwrap();
    let abs = run(&cfg(SearchMode::Absorb)).unwrap();
    let (pa, pb) = (apr.marked_probability().unwrap(), abs.marked_probability().unwrap());
    let diff = pa.iter().zip(pb).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let RunResult::MarkedProbability {
        first_local_max,
        t_max_predicted,
        ..
    } = apr.result
    else {
        unreachable!()
    };
    let elapsed = start.elapsed();
    check(
        diff < 1e-9 && first_local_max == Some(12) && t_max_predicted == Some(12) && elapsed < Duration::from_secs(120),
        format!(
            "max curve diff {diff:.1e}, first local max {first_local_max:?}, predicted {t_max_predicted:?}, both modes in {elapsed:.2?}"
        ),
    )
}

fn single_vs_double() -> Outcome {
    let n = 6;
    let m = 2;
    let g = complete_graph(n).unwrap();
    let marked = MarkedSet::new([m]);
    let apr = PhaseConfig::vertex_phased(mark_apr(n, &marked, PI).unwrap());
    let u = dense_unitary(&g, &apr).unwrap();
    let u_abs = dense_unitary(&g.absorb(&marked).unwrap(), &PhaseConfig::standard(n)).unwrap();
    let self_loop = u.index(m, m);
    let mut sign_err = 0.0f64;
    let mut self_loop_gap = 0.0f64;
    for col in 0..n * n {
        let (a, b) = (u.matrix().column(col), u_abs.matrix().column(col));
        if col == self_loop {
            sign_err = sign_err.max((a + b).iter().map(|z| z.norm()).fold(0.0, f64::max));
            self_loop_gap = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        } else {
            sign_err = sign_err.max((a - b).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    let squares = u.after(&u).unwrap().max_abs_diff(&u_abs.after(&u_abs).unwrap());

    // the same statement from the coined side: -1 coin on the marked node
    let adj = AdjacencyMatrix::backbone(&g);
    let coins = CoinSet::with_adjacency(
        (0..n)
            .map(|i| {
                if i == m {
                    standard_coins::minus_identity(n - 1)
                } else {
                    standard_coins::grover(n - 1)
                }
            })
            .collect(),
        &adj,
    )
    .unwrap();
    let report = check_double_castability(&coins, &adj).unwrap();
    check(
        sign_err < 1e-12 && self_loop_gap > 0.1 && squares < 1e-12 && report.status == DoubleCastStatus::Equivalent,
        format!(
            "sign relation error {sign_err:.1e}, self-loop column gap {self_loop_gap:.2}, |U^2 - U'^2| {squares:.1e}, coined report {:?}",
            report.status
        ),
    )
}

fn complexity() -> Outcome {
    let rec = run(&ExperimentConfig::new(Scenario::ScalingBench).with_sizes([256, 512, 1024])).unwrap();
    let RunResult::Scaling { seconds, slope, .. } = rec.result else {
        unreachable!()
    };
    let slope = slope.unwrap_or(f64::NAN);

    // memory of building and stepping the largest benchmark walk
    let n = 1024usize;
    let baseline = CURRENT.load(Ordering::Relaxed);
    PEAK.store(baseline, Ordering::Relaxed);
    {
        let (walk, mut state) = bench_walk(n, 0).unwrap();
        walk.step_in_place(&mut state).unwrap();
        std::hint::black_box(&state);
    }
    let peak = PEAK.load(Ordering::Relaxed) - baseline;
    let unit = n * n * std::mem::size_of::<szegedy::Complex64>();
    let multiple = peak as f64 / unit as f64;
    check(
        (1.7..=2.3).contains(&slope) && multiple <= 8.0,
        format!(
            "step seconds {seconds:?}, slope {slope:.3}, peak {:.1} MiB = {multiple:.2} x N^2 complex entries",
            peak as f64 / (1 << 20) as f64
        ),
    )
}

fn property_suites() -> Outcome {
    let trials = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut violations = [0usize; 4];
    for t in 0..trials {
        let n = 2 + t % 15;
        let g = random_stochastic(&mut rng, n, 0.3);
        let s = random_state(&mut rng, n);

        let walk = SzegedyWalk::new(&g, &random_phases(&mut rng, n)).unwrap();
        let stepped = walk.step(&s).unwrap();
        if !((stepped.norm() - 1.0).abs() < 1e-10) {
            violations[0] += 1;
        }

        let std = SzegedyWalk::standard(&g);
        let back = std.phase_rotation(&std.phase_rotation(&s).unwrap()).unwrap();
        if !(back.max_abs_diff(&s) < 1e-12) {
            violations[1] += 1;
        }

        if s.swapped().swapped() != s {
            violations[2] += 1;
        }

        for state in [&s, &stepped] {
            let complete = |reg| {
                let p = state.measure(reg).unwrap();
                (p.iter().sum::<f64>() - 1.0).abs() < 1e-10 && p.iter().all(|&x| (0.0..=1.0).contains(&x))
            };
            if !(complete(Register::First) && complete(Register::Second)) {
                violations[3] += 1;
            }
        }
    }
    check(
        violations.iter().all(|&v| v == 0),
        format!("{trials} trials each; violations (norm, R^2, swap, measurement) = {violations:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("oracle-equivalence", oracle_equivalence),
        ("ballistic-x-line", ballistic_x),
        ("hadamard-ntilde-coincidence", hadamard_ntilde),
        ("coin-casting", coin_casting),
        ("search-equivalence-and-peak", search),
        ("single-vs-double-relation", single_vs_double),
        ("complexity", complexity),
        ("property-suites", property_suites),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            check(false, format!("panicked: {msg}"))
        });
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!("{tag} {name}: {}", outcome.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
