//! Experiment runs checked against the dense oracle and frozen values.

mod support;

use szegedy::graph::{LineEmbedding, MarkedSet};
use szegedy::oracle::dense_unitary;
use szegedy::{SzegedyWalk, WalkState};
use szsim::experiments::{line_initial_state, line_walk, predicted_t_max};
use szsim::output::render;
use szsim::record::{first_local_max, total_variation};
use szsim::{run, ExperimentConfig, OutputFormat, RunResult, Scenario, SearchMode};

use support::{MIXED_TV_FLOOR, MIXED_TV_MEASURED};

fn last_distribution(scenario: Scenario, steps: usize) -> Vec<f64> {
    let rec = run(&ExperimentConfig::new(scenario).with_steps(steps)).unwrap();
    rec.distribution(steps).unwrap().to_vec()
}

#[test]
fn mixed_walk_distance_is_frozen() {
    let mixed = last_distribution(Scenario::LineMixed, 100);
    let hadamard = last_distribution(Scenario::LineHadamard, 100);
    let ntilde = last_distribution(Scenario::LineNtilde, 100);
    let tv = total_variation(&mixed, &hadamard);
    assert!((tv - MIXED_TV_MEASURED).abs() < 1e-9, "tv {tv}");
    assert!(tv >= MIXED_TV_FLOOR);
    assert!((total_variation(&mixed, &ntilde) - MIXED_TV_MEASURED).abs() < 1e-9);
}

#[test]
fn line_walks_match_the_dense_oracle() {
    let emb = LineEmbedding::for_steps(3);
    for scenario in [Scenario::LineX, Scenario::LineHadamard, Scenario::LineNtilde, Scenario::LineMixed] {
        let (g, phases) = line_walk(scenario, &emb).unwrap();
        let walk = SzegedyWalk::new(&g, &phases).unwrap();
        let u = dense_unitary(&g, &phases).unwrap();
        let mut fast = line_initial_state(&emb).unwrap();
        let mut slow = fast.clone();
        for _ in 0..3 {
            walk.step_in_place(&mut fast).unwrap();
            slow = u.apply(&slow).unwrap();
            assert!(fast.max_abs_diff(&slow) < 1e-12, "{}", scenario.name());
        }
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let configs = [
        ExperimentConfig::new(Scenario::LineMixed).with_steps(20),
        ExperimentConfig::new(Scenario::SearchComplete).with_nodes(40).with_marked([3]).with_steps(8),
        ExperimentConfig::new(Scenario::ClassicalCheck).with_steps(5),
    ];
    for config in configs {
        let a = render(&run(&config).unwrap(), OutputFormat::Csv).unwrap();
        let b = render(&run(&config).unwrap(), OutputFormat::Csv).unwrap();
        assert_eq!(a, b);
    }
}

fn search_curve(n: usize, marked: &[usize], mode: SearchMode, steps: usize) -> Vec<f64> {
    let config = ExperimentConfig::new(Scenario::SearchComplete)
        .with_nodes(n)
        .with_marked(marked.iter().copied())
        .with_mode(mode)
        .with_steps(steps);
    run(&config).unwrap().marked_probability().unwrap().to_vec()
}

#[test]
fn search_modes_agree_and_peak_near_prediction() {
    for (n, marked) in [(50, vec![7]), (120, vec![1, 60]), (400, vec![0, 5, 399])] {
        let apr = search_curve(n, &marked, SearchMode::Apr, 20);
        let absorb = search_curve(n, &marked, SearchMode::Absorb, 20);
        for (a, b) in apr.iter().zip(&absorb) {
            assert!((a - b).abs() < 1e-10);
        }
        let peak = first_local_max(&apr).unwrap();
        let predicted = predicted_t_max(n, marked.len()).unwrap();
        assert!(peak.abs_diff(predicted) <= 1, "n {n}: peak {peak}, predicted {predicted}");
    }
}

#[test]
fn search_starts_from_the_marked_fraction() {
    let curve = search_curve(64, &[2, 9], SearchMode::Apr, 1);
    assert!((curve[0] - 2.0 / 64.0).abs() < 1e-14);
    assert!(MarkedSet::new([2, 9]).validate(64).is_ok());
}

#[test]
fn custom_graph_starts_in_psi_start() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(
        &path,
        r#"{"n": 3, "edges": [[0, 1, 0.5], [0, 2, 0.5], [1, 0, 1.0], [2, 0, 1.0]], "apr": [1.0, 3.141592653589793, 2.0]}"#,
    )
    .unwrap();
    let config = ExperimentConfig::new(Scenario::Custom).with_input(&path).with_steps(4);
    let rec = run(&config).unwrap();
    let p0 = rec.distribution(0).unwrap();
    assert!((p0[0] - 1.0).abs() < 1e-15 && p0[1] == 0.0 && p0[2] == 0.0);
    let loaded = szsim::input::load_walk(&path).unwrap();
    let walk = SzegedyWalk::new(&loaded.g, &loaded.phases).unwrap();
    let u = dense_unitary(&loaded.g, &loaded.phases).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut s = WalkState::from_amplitudes(3, [((0, 1), h.into()), ((0, 2), h.into())]).unwrap();
    for t in 1..=4 {
        s = u.apply(&s).unwrap();
        let p = s.measure(szegedy::Register::First).unwrap();
        for (a, b) in p.iter().zip(rec.distribution(t).unwrap()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    assert_eq!(walk.n_nodes(), 3);
}

#[test]
fn scaling_record_has_one_time_per_size() {
    let config = ExperimentConfig::new(Scenario::ScalingBench).with_sizes([16, 32, 64]);
    let rec = run(&config).unwrap();
    match rec.result {
        RunResult::Scaling { sizes, seconds, slope } => {
            assert_eq!(sizes, vec![16, 32, 64]);
            assert!(seconds.iter().all(|&s| s > 0.0));
            assert!(slope.is_some());
        }
        other => panic!("unexpected result {other:?}"),
    }
}
