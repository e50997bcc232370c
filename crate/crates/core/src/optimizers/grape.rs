// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Momentum gradient ascent (GRAPE) and its batch-sampled robust variant.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qaoa::{evaluate_samples, ControlVector, ThetaBox};
use crate::spinmodel::QaoaInstance;
use crate::uncertainty::UncertaintyBox;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrapeConfig {
    /// β
    pub learning_rate: f64,
    /// λ
    pub momentum: f64,
    /// n_b, draws per iteration for the sampled variant.
    pub batch_size: usize,
    pub iterations: usize,
    /// β is multiplied by `decay_factor` whenever the mean objective over
    /// the last `decay_window` iterations is below that of the window before.
    /// A window of 0 disables decay.
    pub decay_window: usize,
    pub decay_factor: f64,
    /// Stop as soon as an iterate reaches this objective value.
    pub target: Option<f64>,
}

impl Default for GrapeConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 1,
            iterations: 20_000,
            decay_window: 500,
            decay_factor: 0.5,
            target: None,
        }
    }
}

impl GrapeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("grape.learning_rate", "must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::config("grape.momentum", "must lie in [0, 1)"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("grape.batch_size", "must be at least 1"));
        }
        if !(self.decay_factor > 0.0 && self.decay_factor <= 1.0) {
            return Err(Error::config("grape.decay_factor", "must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// `g ← ∇ + λg; θ ← clip(θ + βg)`
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumAscent {
    pub learning_rate: f64,
    pub momentum: f64,
    velocity: Vec<f64>,
}

impl MomentumAscent {
    pub fn new(learning_rate: f64, momentum: f64, n: usize) -> Self {
        Self {
            learning_rate,
            momentum,
            velocity: vec![0.0; n],
        }
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    pub fn step(&mut self, theta: &mut [f64], gradient: &[f64], bounds: &ThetaBox) {
        for ((g, v), t) in self.velocity.iter_mut().zip(gradient).zip(theta.iter_mut()) {
            *g = v + self.momentum * *g;
            *t += self.learning_rate * *g;
        }
        bounds.clip(theta);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrapeTrace {
    /// Objective observed at each iterate before its update.
    pub objective_history: Vec<f64>,
    pub best_objective: f64,
    pub best_theta: Vec<f64>,
    pub final_theta: Vec<f64>,
    pub final_learning_rate: f64,
}

/// Momentum ascent driven by `oracle(θ, iteration) -> (value, gradient)`.
pub fn grape_maximize(
    mut oracle: impl FnMut(&[f64], usize) -> Result<(f64, Vec<f64>)>,
    theta0: &[f64],
    bounds: &ThetaBox,
    cfg: &GrapeConfig,
) -> Result<GrapeTrace> {
    cfg.validate()?;
    bounds.check(theta0)?;
    let mut theta = theta0.to_vec();
    let mut stepper = MomentumAscent::new(cfg.learning_rate, cfg.momentum, theta.len());
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut best_objective = f64::NEG_INFINITY;
    let mut best_theta = theta.clone();

    for it in 0..cfg.iterations {
        let (value, grad) = oracle(&theta, it)?;
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NumericalFailure(format!("non-finite objective at iteration {it}")));
        }
        history.push(value);
        if value > best_objective {
            best_objective = value;
            best_theta.copy_from_slice(&theta);
        }
        if cfg.target.is_some_and(|t| value >= t) {
            break;
        }
        stepper.step(&mut theta, &grad, bounds);

        let w = cfg.decay_window;
        let done = it + 1;
        if w > 0 && done % w == 0 && done >= 2 * w {
            let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
            if mean(&history[done - w..]) < mean(&history[done - 2 * w..done - w]) {
                stepper.learning_rate *= cfg.decay_factor;
            }
        }
    }
    Ok(GrapeTrace {
        objective_history: history,
        best_objective,
        best_theta,
        final_theta: theta,
        final_learning_rate: stepper.learning_rate,
    })
}

/// What plain GRAPE maximizes.
#[derive(Debug, Clone, PartialEq)]
pub enum GrapeObjective {
    /// Fidelity at one uncertainty value.
    Single(Vec<f64>),
    /// Mean fidelity over a fixed set.
    Average(Vec<Vec<f64>>),
}

fn mean_value_gradient(inst: &QaoaInstance, theta: &[f64], samples: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let evals = evaluate_samples(inst, theta, samples, true)?;
    let scale = 1.0 / samples.len() as f64;
    let mut value = 0.0;
    let mut grad = vec![0.0; theta.len()];
    for e in &evals {
        value += e.value;
        for (g, x) in grad.iter_mut().zip(&e.gradient) {
            *g += x;
        }
    }
    for g in &mut grad {
        *g *= scale;
    }
    Ok((value * scale, grad))
}

/// GRAPE on a deterministic objective; returns the best iterate seen.
pub fn grape_optimize(
    inst: &QaoaInstance,
    theta0: &ControlVector,
    objective: &GrapeObjective,
    cfg: &GrapeConfig,
) -> Result<(ControlVector, GrapeTrace)> {
    let samples = match objective {
        GrapeObjective::Single(d) => vec![d.clone()],
        GrapeObjective::Average(set) if set.is_empty() => return Err(Error::EmptySampleSet),
        GrapeObjective::Average(set) => set.clone(),
    };
    let trace = grape_maximize(
        |theta, _| mean_value_gradient(inst, theta, &samples),
        theta0.angles(),
        theta0.bounds(),
        cfg,
    )?;
    let theta = ControlVector::new(trace.best_theta.clone(), theta0.bounds().clone())?;
    Ok((theta, trace))
}

/// GRAPE on the box-averaged fidelity with `batch_size` fresh uniform draws
/// per iteration. Returns the final iterate.
pub fn bgrape_optimize(
    inst: &QaoaInstance,
    theta0: &ControlVector,
    bounds: &UncertaintyBox,
    cfg: &GrapeConfig,
    seed: u64,
) -> Result<(ControlVector, GrapeTrace)> {
    if bounds.dim() != inst.delta_dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.delta_dim(),
            got: bounds.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trace = grape_maximize(
        |theta, _| {
            let draws: Vec<Vec<f64>> = (0..cfg.batch_size).map(|_| bounds.sample_uniform(&mut rng)).collect();
            mean_value_gradient(inst, theta, &draws)
        },
        theta0.angles(),
        theta0.bounds(),
        cfg,
    )?;
    let theta = ControlVector::new(trace.final_theta.clone(), theta0.bounds().clone())?;
    Ok((theta, trace))
}
