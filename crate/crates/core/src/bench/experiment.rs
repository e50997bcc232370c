// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! The two-stage protocol: a nominal GRAPE warm start followed by one robust
//! optimizer over a sampled uncertainty box.

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OptimizerKind, Resolved, WarmStart};
use crate::error::{Error, Result};
use crate::optimizers::{
    agrape_optimize, bgrape_optimize, grape_optimize, scp_optimize, AGrapeTrace, GrapeObjective, GrapeTrace,
    ScpTrace,
};
use crate::qaoa::{fidelities, fidelity, ControlVector};
use crate::spinmodel::QaoaInstance;
use crate::uncertainty::{sample_grid, summarize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStartRecord {
    /// GRAPE attempts consumed; 0 when the angles came from the config.
    pub attempts: usize,
    pub nominal_fidelity: f64,
    pub theta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OptimizerTrace {
    Scp(ScpTrace),
    Bgrape(GrapeTrace),
    Agrape(AGrapeTrace),
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub seed: u64,
    pub warm_start: WarmStartRecord,
    pub trace: OptimizerTrace,
    pub theta: Vec<f64>,
    pub train_worst_infidelity: f64,
    pub train_avg_infidelity: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub restarts: Vec<RestartRecord>,
    pub best_restart: usize,
    pub theta: Vec<f64>,
    pub nominal_fidelity: f64,
    pub train_points: usize,
    pub train_worst_infidelity: f64,
    pub train_avg_infidelity: f64,
    pub eval_grid: Vec<Vec<f64>>,
    pub eval_fidelities: Vec<f64>,
    pub eval_worst_infidelity: f64,
    pub eval_avg_infidelity: f64,
    pub wall_seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad report: {e}")))
    }

    /// Copy with every wall-clock field zeroed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.wall_seconds = 0.0;
        for rec in &mut r.restarts {
            rec.wall_seconds = 0.0;
            if let OptimizerTrace::Scp(t) = &mut rec.trace {
                t.wall_seconds = 0.0;
            }
        }
        r
    }
}

fn random_theta(inst: &QaoaInstance, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let hi = inst.theta_max();
    (0..inst.n_controls()).map(|_| rng.random_range(0.0..=hi)).collect()
}

/// Seeded GRAPE attempts on the nominal fidelity until one reaches the
/// acceptance level; the best attempt is kept otherwise.
pub fn warm_start(inst: &QaoaInstance, ws: &WarmStart, seed: u64) -> Result<WarmStartRecord> {
    let nominal = inst.nominal_delta().to_vec();
    if let Some(init) = &ws.initial_theta {
        let mut theta = init.clone();
        theta.resize(inst.n_controls(), 0.0);
        let nominal_fidelity = fidelity(inst, &theta, &nominal)?;
        return Ok(WarmStartRecord {
            attempts: 0,
            nominal_fidelity,
            theta,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objective = GrapeObjective::Single(nominal);
    let mut best: Option<WarmStartRecord> = None;
    for attempt in 1..=ws.attempts {
        let theta0 = ControlVector::for_instance(inst, random_theta(inst, &mut rng))?;
        let (theta, trace) = grape_optimize(inst, &theta0, &objective, &ws.grape)?;
        if best.as_ref().is_none_or(|b| trace.best_objective > b.nominal_fidelity) {
            best = Some(WarmStartRecord {
                attempts: attempt,
                nominal_fidelity: trace.best_objective,
                theta: theta.into_angles(),
            });
        }
        if trace.best_objective >= ws.accept_fidelity {
            break;
        }
    }
    let mut rec = best.expect("at least one attempt");
    rec.attempts = rec.attempts.max(1);
    Ok(rec)
}

fn run_restart(cfg: &ExperimentConfig, r: &Resolved, seed: u64, index: usize) -> Result<RestartRecord> {
    let start = Instant::now();
    let inst = &r.instance;
    let mut ws = r.warm_start.clone();
    if index > 0 {
        ws.initial_theta = None;
    }
    let warm = warm_start(inst, &ws, seed)?;
    let theta0 = ControlVector::for_instance(inst, warm.theta.clone())?;
    let train = sample_grid(&r.uncertainty, r.train_points)?;
    let (theta, trace) = match cfg.optimizer {
        OptimizerKind::Scp => {
            let (t, tr) = scp_optimize(inst, &theta0, &train, &r.scp)?;
            (t, OptimizerTrace::Scp(tr))
        }
        OptimizerKind::Bgrape => {
            let (t, tr) = bgrape_optimize(inst, &theta0, &r.uncertainty, &r.bgrape, seed)?;
            (t, OptimizerTrace::Bgrape(tr))
        }
        OptimizerKind::Agrape => {
            let (t, tr) = agrape_optimize(inst, &theta0, &r.uncertainty, &r.agrape)?;
            (t, OptimizerTrace::Agrape(tr))
        }
        OptimizerKind::GrapeNominal => (theta0, OptimizerTrace::None),
    };
    let stats = summarize(&fidelities(inst, theta.angles(), train.samples())?)?;
    Ok(RestartRecord {
        seed,
        warm_start: warm,
        trace,
        theta: theta.into_angles(),
        train_worst_infidelity: 1.0 - stats.worst,
        train_avg_infidelity: 1.0 - stats.average,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every restart and reports the one with the best training worst case
/// on the evaluation grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let r = cfg.resolve()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..r.restarts).map(|_| rng.next_u64()).collect();
    let restarts = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &s)| run_restart(cfg, &r, s, i))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, rec) in restarts.iter().enumerate() {
        if rec.train_worst_infidelity < restarts[best].train_worst_infidelity {
            best = i;
        }
    }
    let rec = &restarts[best];
    let eval = sample_grid(&r.uncertainty, r.eval_points)?;
    let eval_fidelities = fidelities(&r.instance, &rec.theta, eval.samples())?;
    let stats = summarize(&eval_fidelities)?;
    if !stats.worst.is_finite() || !stats.average.is_finite() {
        return Err(Error::NumericalFailure("non-finite fidelity on the evaluation grid".into()));
    }
    Ok(RunReport {
        config: cfg.clone(),
        seed: cfg.seed,
        best_restart: best,
        theta: rec.theta.clone(),
        nominal_fidelity: fidelity(&r.instance, &rec.theta, r.instance.nominal_delta())?,
        train_points: r.train_points,
        train_worst_infidelity: rec.train_worst_infidelity,
        train_avg_infidelity: rec.train_avg_infidelity,
        eval_grid: eval.samples().to_vec(),
        eval_fidelities,
        eval_worst_infidelity: 1.0 - stats.worst,
        eval_avg_infidelity: 1.0 - stats.average,
        wall_seconds: start.elapsed().as_secs_f64(),
        restarts,
    })
}
