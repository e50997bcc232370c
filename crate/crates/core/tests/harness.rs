// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

use robqaoa::bench::{
    compare_table, landscape_scan, run_experiment, ExperimentConfig, OptimizerKind, RunReport,
};
use robqaoa::qaoa::fidelity;
use robqaoa::uncertainty::{sample_grid, UncertaintyBox};

fn cfg(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(text).unwrap()
}

fn chain_two_n5(optimizer: &str, lower: f64, upper: f64) -> ExperimentConfig {
    cfg(&format!(
        "system = \"chain_two\"\nn = 5\noptimizer = \"{optimizer}\"\nseed = 1\n[uncertainty]\nlower = [{lower}]\nupper = [{upper}]\n"
    ))
}

#[test]
fn collapsed_box_keeps_warm_start_quality() {
    let rep = run_experiment(&chain_two_n5("scp", 0.0, 0.0)).unwrap();
    assert!(rep.eval_worst_infidelity <= 1e-3, "{}", rep.eval_worst_infidelity);
    assert!(rep.eval_grid.iter().all(|d| d == &vec![0.0]));
}

#[test]
fn report_round_trips_through_json() {
    let rep = run_experiment(&chain_two_n5("agrape", -0.05, 0.05)).unwrap();
    let back = RunReport::from_json(&rep.to_json()).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn same_seed_gives_identical_reports_modulo_timing() {
    let c = cfg(
        "system = \"chain_two_init_error\"\nn = 4\noptimizer = \"bgrape\"\nseed = 11\n[grape]\niterations = 2000\n",
    );
    let a = run_experiment(&c).unwrap().without_timing();
    let b = run_experiment(&c).unwrap().without_timing();
    assert_eq!(a.to_json(), b.to_json());
    let mut other = c.clone();
    other.seed = 12;
    assert_ne!(run_experiment(&other).unwrap().without_timing().theta, a.theta);
}

#[test]
fn reported_statistics_match_stored_grid() {
    let rep = run_experiment(&chain_two_n5("scp", -0.1, 0.1)).unwrap();
    let inst = rep.config.build_instance().unwrap();
    let n = rep.eval_fidelities.len() as f64;
    let avg = 1.0 - rep.eval_fidelities.iter().sum::<f64>() / n;
    assert!((avg - rep.eval_avg_infidelity).abs() < 1e-12);
    for (d, f) in rep.eval_grid.iter().zip(&rep.eval_fidelities) {
        assert_eq!(*f, fidelity(&inst, &rep.theta, d).unwrap());
    }
    assert!(rep.eval_worst_infidelity >= rep.eval_avg_infidelity);
    // 9 evaluation points contain the 5 training points per axis.
    let mut c = rep.config.clone();
    c.sampler.points_per_axis = Some(5);
    let rep = run_experiment(&c).unwrap();
    assert!(rep.eval_worst_infidelity >= rep.train_worst_infidelity);
}

#[test]
fn nominal_point_scan_meets_warm_start_level() {
    let rep = run_experiment(&chain_two_n5("grape_nominal", -0.15, 0.15)).unwrap();
    let inst = rep.config.build_instance().unwrap();
    let point = UncertaintyBox::point(vec![0.0]).unwrap();
    let recs = landscape_scan(&inst, &rep.theta, &point, 1).unwrap();
    assert_eq!(recs.len(), 1);
    assert!(recs[0].fidelity >= 0.999);
}

#[test]
fn robust_solution_has_higher_scan_minimum() {
    let b = UncertaintyBox::new(vec![-0.15], vec![0.15]).unwrap();
    let nominal = run_experiment(&chain_two_n5("grape_nominal", -0.15, 0.15)).unwrap();
    let robust = run_experiment(&chain_two_n5("scp", -0.15, 0.15)).unwrap();
    let inst = robust.config.build_instance().unwrap();
    let min = |theta: &[f64]| {
        landscape_scan(&inst, theta, &b, 61)
            .unwrap()
            .iter()
            .map(|r| r.fidelity)
            .fold(f64::INFINITY, f64::min)
    };
    assert!(min(&nominal.theta) < min(&robust.theta));
    let grid = sample_grid(&b, 61).unwrap();
    assert_eq!(grid.len(), 61);
}

#[test]
fn table_scp_within_order_of_bgrape_on_largest_box() {
    let make = |opt: &str| {
        cfg(&format!(
            "system = \"chain_two_init_error\"\nn = 7\noptimizer = \"{opt}\"\nseed = 1\n[uncertainty]\nlower = [0.0, 0.0]\nupper = [0.1, 0.1]\n"
        ))
    };
    let (table, results) = compare_table(&[make("scp"), make("bgrape")]);
    assert_eq!(table.rows.len(), 1);
    let e = &table.rows[0].entries;
    assert_eq!((e[0].optimizer, e[1].optimizer), (OptimizerKind::Scp, OptimizerKind::Bgrape));
    assert!(e[0].worst_infidelity.unwrap() <= 10.0 * e[1].worst_infidelity.unwrap());
    assert!(results.iter().all(|(_, r)| r.is_ok()));
}

#[test]
fn single_config_table_is_trivially_best() {
    let (table, _) = compare_table(&[chain_two_n5("grape_nominal", -0.1, 0.1)]);
    assert_eq!(table.rows.len(), 1);
    assert!(table.rows[0].entries[0].best_accuracy && table.rows[0].entries[0].best_time);
}

#[test]
fn failing_cell_does_not_abort_table() {
    let mut bad = chain_two_n5("scp", -0.1, 0.1);
    bad.n = Some(9);
    let good = chain_two_n5("grape_nominal", -0.1, 0.1);
    let (table, _) = compare_table(&[bad, good]);
    let errors: Vec<_> = table.rows.iter().flat_map(|r| &r.entries).filter(|e| e.error.is_some()).collect();
    assert_eq!(errors.len(), 1);
    assert_eq!(table.rows.iter().map(|r| r.entries.len()).sum::<usize>(), 2);
}
