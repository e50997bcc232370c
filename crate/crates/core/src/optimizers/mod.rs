// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Robust control optimizers: trust-region SCP, batch-sampled GRAPE and
//! adversarial GRAPE, all built on a momentum GRAPE core.

mod agrape;
mod grape;
mod scp;

pub use agrape::{agrape_optimize, AGrapeConfig, AGrapeRound, AGrapeTrace};
pub use grape::{
    bgrape_optimize, grape_maximize, grape_optimize, GrapeConfig, GrapeObjective, GrapeTrace, MomentumAscent,
};
pub use scp::{
    acceptance_ratio, scp_maximize, scp_optimize, trust_region_update, ScpConfig, ScpIteration, ScpTrace,
    SigmaRatio, StopReason, SurrogateMode,
};

use rayon::prelude::*;

use crate::error::Result;
use crate::qaoa::{evaluate_samples, fidelity_second_order, FidelityEval};
use crate::spinmodel::QaoaInstance;

/// A finite family of smooth functions `fᵢ(θ)` whose minimum is maximized.
pub trait MaxMinObjective: Sync {
    fn n_terms(&self) -> usize;

    /// Values (and gradients when asked) of every term, in fixed order.
    fn evaluate(&self, theta: &[f64], with_gradient: bool) -> Result<Vec<FidelityEval>>;

    /// As [`evaluate`](Self::evaluate) with `hess_minus` filled in. Terms
    /// without curvature information report a zero matrix.
    fn evaluate_second_order(&self, theta: &[f64]) -> Result<Vec<FidelityEval>> {
        let n = theta.len();
        Ok(self
            .evaluate(theta, true)?
            .into_iter()
            .map(|mut e| {
                e.hess_minus = Some(crate::densela::RMatrix::zeros(n));
                e
            })
            .collect())
    }
}

/// Fidelity at each of a fixed list of uncertainty samples.
pub struct SampledFidelity<'a> {
    pub instance: &'a QaoaInstance,
    pub samples: &'a [Vec<f64>],
    /// Finite-difference step for the Hessian in quadratic mode.
    pub hessian_step: f64,
}

impl<'a> SampledFidelity<'a> {
    pub fn new(instance: &'a QaoaInstance, samples: &'a [Vec<f64>]) -> Self {
        Self {
            instance,
            samples,
            hessian_step: 1e-4,
        }
    }
}

impl MaxMinObjective for SampledFidelity<'_> {
    fn n_terms(&self) -> usize {
        self.samples.len()
    }

    fn evaluate(&self, theta: &[f64], with_gradient: bool) -> Result<Vec<FidelityEval>> {
        evaluate_samples(self.instance, theta, self.samples, with_gradient)
    }

    fn evaluate_second_order(&self, theta: &[f64]) -> Result<Vec<FidelityEval>> {
        self.samples
            .par_iter()
            .map(|d| fidelity_second_order(self.instance, theta, d, self.hessian_step))
            .collect()
    }
}
