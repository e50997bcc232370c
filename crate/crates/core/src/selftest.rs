// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Built-in correctness checks, run by `robqaoa selftest`.
//!
//! Each check compares a production routine against an independent oracle
//! from [`crate::oracles`] or against an exact property.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bench::{run_experiment, ExperimentConfig, RunReport};
use crate::densela::{unitary_from_hamiltonian, CMatrix};
use crate::error::Result;
use crate::lp::{solve, LinearProgram};
use crate::optimizers::{
    agrape_optimize, bgrape_optimize, scp_maximize, scp_optimize, trust_region_update, AGrapeConfig, GrapeConfig,
    MaxMinObjective, ScpConfig,
};
use crate::oracles::{dense_fidelity, fd_gradient, lp_vertex_enumeration};
use crate::qaoa::{fidelity, fidelity_gradient, propagate, ControlVector, FidelityEval, ThetaBox};
use crate::spinmodel::{
    build_chain_one, build_chain_two, build_chain_two_init_error, build_single_qubit, QaoaInstance,
};
use crate::subproblem::{build_epigraph, solve_lp, LinearSurrogate, TrustRegion};
use crate::uncertainty::{sample_grid, worst_and_average, UncertaintyBox};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({:.2}s): {}", self.name, self.seconds, self.detail)
    }
}

fn check(name: &str, body: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => (false, format!("error: {e}")),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("panicked: {msg}"))
        }
    };
    Check {
        name: name.into(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// One representative instance per benchmark family with N ≤ 5, paired with
/// a box to draw δ from.
pub fn benchmark_instances() -> Result<Vec<(QaoaInstance, UncertaintyBox)>> {
    Ok(vec![
        (
            build_single_qubit(4.0, -4.0)?,
            UncertaintyBox::new(vec![3.5, -4.5], vec![4.5, -3.5])?,
        ),
        (build_chain_one(4, 4.0, -4.0)?, UncertaintyBox::cube(2, -0.1, 0.1)?),
        (build_chain_two(5)?, UncertaintyBox::new(vec![-0.15], vec![0.15])?),
        (build_chain_two_init_error(5)?, UncertaintyBox::cube(2, 0.0, 0.1)?),
    ])
}

fn random_theta(inst: &QaoaInstance, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..inst.n_controls()).map(|_| rng.random_range(0.0..inst.theta_max())).collect()
}

fn l2(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest relative ℓ₂ gap between the adjoint gradient and central
/// differences with step `1e-5`, over 20 random points per system.
pub fn gradient_vs_finite_differences(seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for (inst, b) in benchmark_instances()? {
        for _ in 0..20 {
            let theta = random_theta(&inst, &mut rng);
            let delta = b.sample_uniform(&mut rng);
            let g = fidelity_gradient(&inst, &theta, &delta)?.gradient;
            let fd = fd_gradient(|t| fidelity(&inst, t, &delta).expect("fidelity"), &theta, 1e-5);
            let err = l2(g.iter().zip(&fd).map(|(a, b)| a - b)) / l2(fd.iter().copied());
            worst = worst.max(err);
        }
    }
    Ok(worst)
}

/// Largest `|‖ψ‖ − 1|` over 100 propagations per system, and largest
/// entry of `UU† − I` over 50 random Hermitian `H` and angles.
pub fn unitarity_defects(seed: u64) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut norm_defect = 0.0f64;
    for (inst, b) in benchmark_instances()? {
        for _ in 0..100 {
            let theta = random_theta(&inst, &mut rng);
            let psi = propagate(&inst, &theta, &b.sample_uniform(&mut rng))?;
            norm_defect = norm_defect.max((psi.norm() - 1.0).abs());
        }
    }
    let mut unitary_defect = 0.0f64;
    for _ in 0..50 {
        let dim = 1 << rng.random_range(1..=5);
        let mut h = CMatrix::from_fn(dim, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        h = h.add(&h.adjoint()).scale(Complex64::new(0.5, 0.0));
        let u = unitary_from_hamiltonian(&h, rng.random_range(-5.0..5.0))?;
        unitary_defect = unitary_defect.max(u.unitarity_defect());
    }
    Ok((norm_defect, unitary_defect))
}

/// Random epigraph LPs with at most 3 step variables plus the epigraph
/// variable and at most 6 cuts. Returns the number of cases and the largest
/// objective gap to brute-force vertex enumeration.
pub fn epigraph_lps_vs_vertex_enumeration(seed: u64, cases: usize) -> Result<(usize, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gap = 0.0f64;
    for _ in 0..cases {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(1..=6);
        let theta: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let surrogates: Vec<LinearSurrogate> = (0..m)
            .map(|_| LinearSurrogate {
                base_value: rng.random_range(0.0..1.0),
                gradient: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
            })
            .collect();
        let trust = TrustRegion::new(rng.random_range(0.01..1.0))?;
        let problem = build_epigraph(surrogates, &theta, &ThetaBox::uniform(n, 0.0, 2.0), trust)?;
        let got = solve_lp(&problem)?;

        // Same LP in (s, f₀) form with f₀ boxed wide enough to be inactive.
        let mut objective = vec![0.0; n];
        objective.push(1.0);
        let rows = problem
            .surrogates
            .iter()
            .map(|s| {
                let mut a: Vec<f64> = s.gradient.iter().map(|g| -g).collect();
                a.push(1.0);
                (a, s.base_value)
            })
            .collect();
        let mut lower = problem.lower.clone();
        lower.push(-100.0);
        let mut upper = problem.upper.clone();
        upper.push(100.0);
        let lp = LinearProgram {
            objective,
            rows,
            lower,
            upper,
        };
        let (_, best) = lp_vertex_enumeration(&lp).expect("epigraph LPs are feasible");
        let direct = solve(&lp)?;
        worst_gap = worst_gap
            .max((got.predicted - best).abs())
            .max((direct.objective - best).abs());
    }
    Ok((cases, worst_gap))
}

/// `min_i (bᵢ + gᵢᵀθ)`: linear in every term, so the surrogate is exact.
pub struct LinearMaxMin {
    pub terms: Vec<(f64, Vec<f64>)>,
}

impl MaxMinObjective for LinearMaxMin {
    fn n_terms(&self) -> usize {
        self.terms.len()
    }

    fn evaluate(&self, theta: &[f64], _: bool) -> Result<Vec<FidelityEval>> {
        Ok(self
            .terms
            .iter()
            .map(|(b, g)| FidelityEval {
                value: b + g.iter().zip(theta).map(|(x, y)| x * y).sum::<f64>(),
                gradient: g.clone(),
                hess_minus: None,
            })
            .collect())
    }
}

/// Runs SCP on an exactly linear objective for `steps` iterations and
/// returns the largest `|σ − 1|` and the largest deviation of `d` from
/// `d₀·2ᵏ`.
pub fn scp_linear_mechanics(steps: usize) -> Result<(f64, f64, bool)> {
    let obj = LinearMaxMin {
        terms: vec![(0.0, vec![1.0, 0.5, -0.2]), (0.1, vec![0.5, 1.0, 0.3]), (0.3, vec![0.2, 0.1, 1.0])],
    };
    let d0 = 0.01;
    let cfg = ScpConfig {
        t_max: steps,
        initial_d: d0,
        eta1: 0.5,
        gamma1: 2.0,
        ..ScpConfig::default()
    };
    let trace = scp_maximize(&obj, &[0.0; 3], &ThetaBox::uniform(3, 0.0, 1e4), &cfg)?;
    let mut sigma_gap = 0.0f64;
    let mut d_gap = 0.0f64;
    let mut all_accepted = trace.iterations.len() == steps;
    for (k, it) in trace.iterations.iter().enumerate() {
        sigma_gap = sigma_gap.max((it.sigma - 1.0).abs());
        d_gap = d_gap.max((it.d - d0 * 2f64.powi(k as i32)).abs() / it.d);
        all_accepted &= it.accepted;
    }
    Ok((sigma_gap, d_gap, all_accepted))
}

fn quick_report() -> Result<RunReport> {
    let cfg = ExperimentConfig::from_toml_str(
        r#"
system = "single_qubit"
optimizer = "scp"
restarts = 2
seed = 5
[warm_start]
iterations = 500
attempts = 2
[scp]
t_max = 30
"#,
    )?;
    run_experiment(&cfg)
}

/// Every check, in a fixed order.
pub fn run_all() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(check("gradient matches finite differences", || {
        let err = gradient_vs_finite_differences(1)?;
        Ok((err < 1e-6, format!("max relative l2 error {err:.3e} (limit 1e-6)")))
    }));
    out.push(check("propagation preserves norm and unitarity", || {
        let (n, u) = unitarity_defects(2)?;
        Ok((n <= 1e-10 && u <= 1e-10, format!("norm defect {n:.3e}, UU^+ defect {u:.3e} (limit 1e-10)")))
    }));
    out.push(check("epigraph LP matches vertex enumeration", || {
        let (cases, gap) = epigraph_lps_vs_vertex_enumeration(3, 200)?;
        Ok((gap <= 1e-9, format!("{cases} LPs, max objective gap {gap:.3e} (limit 1e-9)")))
    }));
    out.push(check("SCP on an exactly linear objective", || {
        let (s, d, acc) = scp_linear_mechanics(12)?;
        Ok((
            s < 1e-9 && d < 1e-12 && acc,
            format!("max |sigma-1| {s:.3e}, max relative d deviation {d:.3e}, all accepted {acc}"),
        ))
    }));
    out.push(check("SCP accepted worst case is monotone on a benchmark", || {
        let inst = build_single_qubit(4.0, -4.0)?;
        let set = sample_grid(&crate::bench::single_qubit_box(2), 5)?;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let theta0 = ControlVector::for_instance(&inst, random_theta(&inst, &mut rng))?;
        let (_, trace) = scp_optimize(&inst, &theta0, &set, &ScpConfig { t_max: 200, ..Default::default() })?;
        trace.assert_monotone();
        Ok((
            trace.best_worst >= trace.initial_worst,
            format!(
                "{} accepted of {}, worst {:.6} -> {:.6}",
                trace.accepted_count(),
                trace.iterations.len(),
                trace.initial_worst,
                trace.best_worst
            ),
        ))
    }));
    out.push(check("fast fidelity matches dense Taylor propagation", || {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut gap = 0.0f64;
        for (inst, b) in benchmark_instances()? {
            for _ in 0..5 {
                let theta = random_theta(&inst, &mut rng);
                let delta = b.sample_uniform(&mut rng);
                gap = gap.max((fidelity(&inst, &theta, &delta)? - dense_fidelity(&inst, &theta, &delta)?).abs());
            }
        }
        Ok((gap < 1e-10, format!("max gap {gap:.3e}")))
    }));
    out.push(check("trust-region update rule", || {
        let cfg = ScpConfig::default();
        let ok = trust_region_update(0.1, 0.9, &cfg) == 0.2
            && trust_region_update(0.1, 0.3, &cfg) == 0.1
            && (trust_region_update(0.1, -1.0, &cfg) - 0.02).abs() < 1e-15;
        Ok((ok, "expand / keep / shrink branches".into()))
    }));
    out.push(check("worst case never exceeds average", || {
        let inst = build_chain_two(4)?;
        let set = sample_grid(&UncertaintyBox::new(vec![-0.15], vec![0.15])?, 9)?;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ok = true;
        for _ in 0..10 {
            let wa = worst_and_average(&inst, &random_theta(&inst, &mut rng), &set)?;
            ok &= wa.worst <= wa.average && (0.0..=1.0 + 1e-12).contains(&wa.average);
        }
        Ok((ok, "10 random controls".into()))
    }));
    out.push(check("b-GRAPE is reproducible under a fixed seed", || {
        let inst = build_chain_two_init_error(3)?;
        let b = UncertaintyBox::cube(2, 0.0, 0.1)?;
        let theta0 = ControlVector::for_instance(&inst, vec![0.5; inst.n_controls()])?;
        let cfg = GrapeConfig { iterations: 100, batch_size: 3, ..Default::default() };
        let (a, _) = bgrape_optimize(&inst, &theta0, &b, &cfg, 9)?;
        let (c, _) = bgrape_optimize(&inst, &theta0, &b, &cfg, 9)?;
        Ok((a == c, "two identical runs".into()))
    }));
    out.push(check("a-GRAPE memory stays bounded", || {
        let inst = build_chain_two_init_error(3)?;
        let b = UncertaintyBox::cube(2, 0.0, 0.1)?;
        let theta0 = ControlVector::for_instance(&inst, vec![0.5; inst.n_controls()])?;
        let cfg = AGrapeConfig {
            rounds: 5,
            memory: 2,
            refine_iters: 1,
            inner: GrapeConfig { iterations: 30, ..Default::default() },
        };
        let (_, trace) = agrape_optimize(&inst, &theta0, &b, &cfg)?;
        let ok = trace.rounds.iter().all(|r| r.memory_size <= 2 && b.contains(&r.adversary));
        Ok((ok, format!("{} rounds, final memory {}", trace.rounds.len(), trace.memory.len())))
    }));
    out.push(check("run report round-trips and is deterministic", || {
        let a = quick_report()?;
        let back = RunReport::from_json(&a.to_json())?;
        let b = quick_report()?;
        let ok = back == a && a.without_timing().to_json() == b.without_timing().to_json();
        Ok((ok, format!("eval worst-case infidelity {:.3e}", a.eval_worst_infidelity)))
    }));
    out
}
