// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Adversarial GRAPE: alternate a best response to a bounded memory of
//! uncertainty values with an approximate worst-case search.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::grape::{grape_optimize, GrapeConfig, GrapeObjective};
use crate::error::{Error, Result};
use crate::qaoa::{fidelity, ControlVector};
use crate::spinmodel::QaoaInstance;
use crate::uncertainty::{adversarial_sample, UncertaintyBox};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AGrapeConfig {
    pub rounds: usize,
    /// Memory size s.
    pub memory: usize,
    /// Golden-section refinement rounds of the adversary.
    pub refine_iters: usize,
    pub inner: GrapeConfig,
}

impl Default for AGrapeConfig {
    fn default() -> Self {
        Self {
            rounds: 15,
            memory: 10,
            refine_iters: 3,
            inner: GrapeConfig {
                iterations: 1000,
                ..GrapeConfig::default()
            },
        }
    }
}

impl AGrapeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.memory == 0 {
            return Err(Error::config("agrape.memory", "must be at least 1"));
        }
        if self.rounds == 0 {
            return Err(Error::config("agrape.rounds", "must be positive"));
        }
        self.inner.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AGrapeRound {
    /// Mean fidelity over the memory after the best response.
    pub memory_average: f64,
    pub adversary: Vec<f64>,
    pub adversary_fidelity: f64,
    pub memory_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AGrapeTrace {
    pub rounds: Vec<AGrapeRound>,
    pub memory: Vec<Vec<f64>>,
}

/// Runs `cfg.rounds` best-response / adversary rounds starting from the
/// memory `{nominal δ}` and returns the last best response.
pub fn agrape_optimize(
    inst: &QaoaInstance,
    theta0: &ControlVector,
    bounds: &UncertaintyBox,
    cfg: &AGrapeConfig,
) -> Result<(ControlVector, AGrapeTrace)> {
    cfg.validate()?;
    if bounds.dim() != inst.delta_dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.delta_dim(),
            got: bounds.dim(),
        });
    }
    let mut memory: VecDeque<Vec<f64>> = VecDeque::from([inst.nominal_delta().to_vec()]);
    let mut theta = theta0.clone();
    let mut rounds = Vec::with_capacity(cfg.rounds);
    for _ in 0..cfg.rounds {
        let objective = GrapeObjective::Average(memory.iter().cloned().collect());
        let (next, trace) = grape_optimize(inst, &theta, &objective, &cfg.inner)?;
        theta = next;
        let adversary = adversarial_sample(inst, theta.angles(), bounds, cfg.refine_iters)?;
        let adversary_fidelity = fidelity(inst, theta.angles(), &adversary)?;
        if memory.len() >= cfg.memory {
            memory.pop_front();
        }
        memory.push_back(adversary.clone());
        rounds.push(AGrapeRound {
            memory_average: trace.best_objective,
            adversary,
            adversary_fidelity,
            memory_size: memory.len(),
        });
    }
    Ok((
        theta,
        AGrapeTrace {
            rounds,
            memory: memory.into_iter().collect(),
        },
    ))
}
