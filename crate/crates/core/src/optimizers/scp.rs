// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Sequential convex programming with an adaptive trust region.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{MaxMinObjective, SampledFidelity};
use crate::error::{Error, Result};
use crate::qaoa::{ControlVector, FidelityEval, ThetaBox};
use crate::spinmodel::QaoaInstance;
use crate::subproblem::{
    build_epigraph, solve_lp, solve_maxmin_quadratic, LinearSurrogate, QuadraticSurrogate, TrustRegion,
};
use crate::uncertainty::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateMode {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScpConfig {
    pub eta1: f64,
    pub eta2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub t_max: usize,
    pub tol_d: f64,
    pub tol_sigma: f64,
    pub initial_d: f64,
    pub surrogate_mode: SurrogateMode,
}

impl Default for ScpConfig {
    fn default() -> Self {
        Self {
            eta1: 0.5,
            eta2: 0.1,
            gamma1: 2.0,
            gamma2: 0.2,
            t_max: 500,
            tol_d: 1e-6,
            tol_sigma: 1e-6,
            initial_d: 0.2,
            surrogate_mode: SurrogateMode::Linear,
        }
    }
}

impl ScpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.eta2 && self.eta2 < self.eta1 && self.eta1 < 1.0) {
            return Err(Error::config("scp.eta1/eta2", "need 0 < eta2 < eta1 < 1"));
        }
        if !(self.gamma1 > 1.0 && self.gamma1.is_finite()) {
            return Err(Error::config("scp.gamma1", "need gamma1 > 1"));
        }
        if !(0.0 < self.gamma2 && self.gamma2 < 1.0) {
            return Err(Error::config("scp.gamma2", "need 0 < gamma2 < 1"));
        }
        if self.t_max == 0 {
            return Err(Error::config("scp.t_max", "must be positive"));
        }
        if !(self.tol_d >= 0.0 && self.tol_sigma >= 0.0) {
            return Err(Error::config("scp.tol_d/tol_sigma", "must be nonnegative"));
        }
        if !(self.initial_d > 0.0 && self.initial_d.is_finite()) {
            return Err(Error::config("scp.initial_d", "must be positive"));
        }
        Ok(())
    }
}

/// Ratio of actual to predicted improvement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaRatio {
    pub sigma: f64,
    /// The predicted improvement was below 1e-14 in magnitude; σ is reported
    /// as 0 and the step is rejected.
    pub degenerate: bool,
}

pub fn acceptance_ratio(actual_old: f64, actual_new: f64, predicted_new: f64) -> SigmaRatio {
    let den = predicted_new - actual_old;
    if den.abs() < 1e-14 {
        return SigmaRatio {
            sigma: 0.0,
            degenerate: true,
        };
    }
    SigmaRatio {
        sigma: (actual_new - actual_old) / den,
        degenerate: false,
    }
}

pub fn trust_region_update(d: f64, sigma: f64, cfg: &ScpConfig) -> f64 {
    if sigma > cfg.eta1 {
        cfg.gamma1 * d
    } else if sigma >= cfg.eta2 {
        d
    } else {
        cfg.gamma2 * d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScpIteration {
    /// Worst-case sampled value at the current iterate after this step.
    pub worst: f64,
    /// Worst-case sampled value at the trial point.
    pub trial_worst: f64,
    pub predicted: f64,
    pub sigma: f64,
    pub degenerate: bool,
    /// Trust-region diameter used for this step.
    pub d: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TrustRegionCollapsed,
    SmallRatio,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScpTrace {
    pub initial_worst: f64,
    pub iterations: Vec<ScpIteration>,
    pub best_worst: f64,
    pub theta: Vec<f64>,
    pub stop_reason: StopReason,
    pub final_d: f64,
    pub wall_seconds: f64,
}

impl ScpTrace {
    pub fn accepted_count(&self) -> usize {
        self.iterations.iter().filter(|it| it.accepted).count()
    }

    /// Worst-case values at the start and after every accepted step.
    pub fn accepted_worst(&self) -> Vec<f64> {
        std::iter::once(self.initial_worst)
            .chain(self.iterations.iter().filter(|it| it.accepted).map(|it| it.worst))
            .collect()
    }

    /// Panics unless the accepted worst-case values strictly increase.
    pub fn assert_monotone(&self) {
        let acc = self.accepted_worst();
        for (k, w) in acc.windows(2).enumerate() {
            assert!(w[1] > w[0], "accepted step {k} lowered the worst case: {} -> {}", w[0], w[1]);
        }
    }
}

fn worst_of(evals: &[FidelityEval]) -> f64 {
    evals.iter().map(|e| e.value).fold(f64::INFINITY, f64::min)
}

/// Trust-region SCP on an arbitrary max-min objective over a box.
pub fn scp_maximize<O: MaxMinObjective + ?Sized>(
    objective: &O,
    theta0: &[f64],
    bounds: &ThetaBox,
    cfg: &ScpConfig,
) -> Result<ScpTrace> {
    cfg.validate()?;
    bounds.check(theta0)?;
    if objective.n_terms() == 0 {
        return Err(Error::EmptySampleSet);
    }
    let start = Instant::now();
    let evaluate = |theta: &[f64]| match cfg.surrogate_mode {
        SurrogateMode::Linear => objective.evaluate(theta, true),
        SurrogateMode::Quadratic => objective.evaluate_second_order(theta),
    };

    let mut theta = theta0.to_vec();
    let mut evals = evaluate(&theta)?;
    let mut worst = worst_of(&evals);
    let initial_worst = worst;
    let mut d = cfg.initial_d;
    let mut iterations = Vec::new();
    let mut stop_reason = StopReason::MaxIterations;

    for _t in 0..cfg.t_max {
        let trust = TrustRegion::new(d)?;
        let sub = match cfg.surrogate_mode {
            SurrogateMode::Linear => {
                let surrogates = evals
                    .iter()
                    .map(|e| LinearSurrogate {
                        base_value: e.value,
                        gradient: e.gradient.clone(),
                    })
                    .collect();
                solve_lp(&build_epigraph(surrogates, &theta, bounds, trust)?)?
            }
            SurrogateMode::Quadratic => {
                let surrogates: Vec<QuadraticSurrogate> = evals
                    .iter()
                    .map(|e| QuadraticSurrogate {
                        base_value: e.value,
                        gradient: e.gradient.clone(),
                        hess_minus: e.hess_minus.clone().expect("second-order evaluation"),
                    })
                    .collect();
                solve_maxmin_quadratic(&surrogates, &theta, bounds, trust)?
            }
        };
        let mut trial: Vec<f64> = theta.iter().zip(&sub.step).map(|(a, b)| a + b).collect();
        bounds.clip(&mut trial);
        let trial_evals = evaluate(&trial)?;
        let trial_worst = worst_of(&trial_evals);
        if !trial_worst.is_finite() {
            return Err(Error::NumericalFailure("non-finite objective at trial point".into()));
        }
        let ratio = acceptance_ratio(worst, trial_worst, sub.predicted);
        // σ > 0 means improvement whenever the prediction is an improvement,
        // which the LP guarantees up to rounding; the second test covers the rest.
        let accepted = ratio.sigma > 0.0 && trial_worst > worst;
        if accepted {
            theta = trial;
            evals = trial_evals;
            worst = trial_worst;
        }
        iterations.push(ScpIteration {
            worst,
            trial_worst,
            predicted: sub.predicted,
            sigma: ratio.sigma,
            degenerate: ratio.degenerate,
            d,
            accepted,
        });
        d = trust_region_update(d, ratio.sigma, cfg);
        if d < cfg.tol_d {
            stop_reason = StopReason::TrustRegionCollapsed;
            break;
        }
        if ratio.sigma > 0.0 && ratio.sigma < cfg.tol_sigma {
            stop_reason = StopReason::SmallRatio;
            break;
        }
    }

    // Accepted iterates strictly improve, so the current one is the best.
    let trace = ScpTrace {
        initial_worst,
        iterations,
        best_worst: worst,
        theta,
        stop_reason,
        final_d: d,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    trace.assert_monotone();
    Ok(trace)
}

/// SCP over the sampled worst-case fidelity.
pub fn scp_optimize(
    inst: &QaoaInstance,
    theta0: &ControlVector,
    samples: &SampleSet,
    cfg: &ScpConfig,
) -> Result<(ControlVector, ScpTrace)> {
    let objective = SampledFidelity::new(inst, samples.samples());
    let trace = scp_maximize(&objective, theta0.angles(), theta0.bounds(), cfg)?;
    let theta = ControlVector::new(trace.theta.clone(), theta0.bounds().clone())?;
    Ok((theta, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinmodel::{build_chain_two, build_chain_two_init_error};
    use crate::uncertainty::{sample_grid, worst_and_average, UncertaintyBox};
    use proptest::prelude::*;

    /// `min_i (b_i + g_iᵀθ)`, exactly linear per term.
    struct LinearFamily {
        terms: Vec<(f64, Vec<f64>)>,
    }

    impl MaxMinObjective for LinearFamily {
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

    #[test]
    fn ratio_examples() {
        assert_eq!(acceptance_ratio(0.5, 0.6, 0.6).sigma, 1.0);
        let r = acceptance_ratio(0.5, 0.45, 0.6);
        assert!((r.sigma + 0.5).abs() < 1e-12 && !r.degenerate);
        let r = acceptance_ratio(0.5, 0.55, 0.5 + 1e-16);
        assert!(r.degenerate && r.sigma == 0.0);
    }

    #[test]
    fn trust_region_branches() {
        let cfg = ScpConfig::default();
        assert!((trust_region_update(0.1, 0.7, &cfg) - 0.2).abs() < 1e-15);
        assert_eq!(trust_region_update(0.1, 0.3, &cfg), 0.1);
        assert!((trust_region_update(0.1, 0.05, &cfg) - 0.02).abs() < 1e-15);
        // band edges
        assert_eq!(trust_region_update(0.1, 0.5, &cfg), 0.1);
        assert_eq!(trust_region_update(0.1, 0.1, &cfg), 0.1);
    }

    #[test]
    fn config_validation() {
        assert!(ScpConfig::default().validate().is_ok());
        let bad = [
            ScpConfig { eta2: 0.6, ..Default::default() },
            ScpConfig { gamma1: 1.0, ..Default::default() },
            ScpConfig { gamma2: 1.0, ..Default::default() },
            ScpConfig { initial_d: 0.0, ..Default::default() },
            ScpConfig { t_max: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::ConfigInvalid { .. })));
        }
    }

    #[test]
    fn exactly_linear_objective_doubles_d() {
        let obj = LinearFamily {
            terms: vec![(0.0, vec![1.0, 0.5]), (0.1, vec![0.5, 1.0])],
        };
        let bounds = ThetaBox::uniform(2, 0.0, 100.0);
        let cfg = ScpConfig {
            t_max: 8,
            initial_d: 0.01,
            ..Default::default()
        };
        let trace = scp_maximize(&obj, &[0.0, 0.0], &bounds, &cfg).unwrap();
        assert_eq!(trace.iterations.len(), 8);
        for (k, it) in trace.iterations.iter().enumerate() {
            assert!(it.accepted);
            assert!((it.sigma - 1.0).abs() < 1e-9, "σ = {}", it.sigma);
            assert!((it.d - 0.01 * 2f64.powi(k as i32)).abs() < 1e-15);
        }
        assert_eq!(trace.stop_reason, StopReason::MaxIterations);
    }

    #[test]
    fn infeasible_start_rejected() {
        let obj = LinearFamily {
            terms: vec![(0.0, vec![1.0])],
        };
        let err = scp_maximize(&obj, &[3.0], &ThetaBox::uniform(1, 0.0, 2.0), &ScpConfig::default());
        assert_eq!(err.unwrap_err(), Error::InfeasibleStart(0));
    }

    #[test]
    fn stops_when_no_progress_is_possible() {
        // Opposite slopes at the optimum: every step is predicted flat.
        let obj = LinearFamily {
            terms: vec![(1.0, vec![1.0]), (1.0, vec![-1.0])],
        };
        let trace = scp_maximize(&obj, &[0.0], &ThetaBox::uniform(1, -1.0, 1.0), &ScpConfig::default()).unwrap();
        assert_eq!(trace.stop_reason, StopReason::TrustRegionCollapsed);
        assert_eq!(trace.accepted_count(), 0);
        assert!(trace.final_d < 1e-6);
    }

    #[test]
    fn improves_chain_two_init_error_worst_case() {
        let inst = build_chain_two_init_error(4).unwrap().with_depth(5).unwrap();
        let b = UncertaintyBox::cube(2, 0.0, 0.1).unwrap();
        let set = sample_grid(&b, 3).unwrap();
        let theta0 = ControlVector::for_instance(&inst, vec![0.6; inst.n_controls()]).unwrap();
        let cfg = ScpConfig {
            t_max: 60,
            ..Default::default()
        };
        let (theta, trace) = scp_optimize(&inst, &theta0, &set, &cfg).unwrap();
        let before = worst_and_average(&inst, theta0.angles(), &set).unwrap().worst;
        let after = worst_and_average(&inst, theta.angles(), &set).unwrap().worst;
        assert!(after > before);
        assert_eq!(after, trace.best_worst);
        let acc = trace.accepted_worst();
        assert!(acc.windows(2).all(|w| w[1] > w[0]));
        assert!(inst.theta_box().violation(theta.angles()).is_none());
    }

    #[test]
    fn quadratic_mode_runs() {
        let inst = build_chain_two(4).unwrap();
        let b = UncertaintyBox::new(vec![-0.1], vec![0.1]).unwrap();
        let set = sample_grid(&b, 3).unwrap();
        let theta0 = ControlVector::for_instance(&inst, vec![0.5; inst.n_controls()]).unwrap();
        let cfg = ScpConfig {
            t_max: 5,
            surrogate_mode: SurrogateMode::Quadratic,
            ..Default::default()
        };
        let (_, trace) = scp_optimize(&inst, &theta0, &set, &cfg).unwrap();
        assert!(trace.best_worst >= trace.initial_worst);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trust_update_composes(sigmas in proptest::collection::vec(-1.0f64..1.5, 1..12)) {
            let cfg = ScpConfig::default();
            let mut d = 0.2;
            let mut expected = 0.2;
            for &s in &sigmas {
                d = trust_region_update(d, s, &cfg);
                let factor = if s > 0.5 { 2.0 } else if s >= 0.1 { 1.0 } else { 0.2 };
                expected *= factor;
            }
            prop_assert!((d - expected).abs() <= 1e-12 * expected);
        }

        #[test]
        fn accepted_worst_is_monotone(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let inst = build_chain_two(4).unwrap();
            let theta0: Vec<f64> = (0..inst.n_controls()).map(|_| rng.random_range(0.0..2.0)).collect();
            let samples = vec![vec![-0.1], vec![0.0], vec![0.1]];
            let obj = SampledFidelity::new(&inst, &samples);
            let cfg = ScpConfig { t_max: 15, ..Default::default() };
            let trace = scp_maximize(&obj, &theta0, &inst.theta_box(), &cfg).unwrap();
            let acc = trace.accepted_worst();
            prop_assert!(acc.windows(2).all(|w| w[1] >= w[0]));
            for it in &trace.iterations {
                prop_assert!(!it.accepted || it.sigma > 0.0);
            }
            prop_assert!(inst.theta_box().violation(&trace.theta).is_none());
        }
    }
}
