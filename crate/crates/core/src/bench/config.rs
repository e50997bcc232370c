// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration files.
//!
//! ```toml
//! system = "chain_two_init_error"
//! n = 7
//! depth = 8
//! optimizer = "scp"
//! seed = 7
//!
//! [uncertainty]
//! lower = [0.0, 0.0]
//! upper = [0.01, 0.01]
//!
//! [scp]
//! t_max = 20000
//! ```
//!
//! Every table rejects unknown keys.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizers::{AGrapeConfig, GrapeConfig, ScpConfig, SurrogateMode};
use crate::spinmodel::{
    build_chain_one, build_chain_two, build_chain_two_init_error, build_single_qubit, QaoaInstance, SystemKind,
};
use crate::uncertainty::UncertaintyBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Scp,
    Bgrape,
    Agrape,
    /// The warm start alone, with no robust stage.
    GrapeNominal,
}

impl std::fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OptimizerKind::Scp => "scp",
            OptimizerKind::Bgrape => "bgrape",
            OptimizerKind::Agrape => "agrape",
            OptimizerKind::GrapeNominal => "grape_nominal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    /// Training grid density; 5 for 2-D boxes and 9 for scalar ones if unset.
    pub points_per_axis: Option<usize>,
    /// Reporting grid density, 9 if unset.
    pub eval_points_per_axis: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarmStartSpec {
    pub iterations: Option<usize>,
    pub learning_rate: Option<f64>,
    /// Random starting points tried until one reaches `accept_fidelity`.
    pub attempts: Option<usize>,
    pub accept_fidelity: Option<f64>,
    /// GRAPE stops once the nominal fidelity reaches this value.
    pub target_fidelity: Option<f64>,
    /// Skip GRAPE and start from these angles, zero-padded to the depth.
    pub initial_theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScpSpec {
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub t_max: Option<usize>,
    pub tol_d: Option<f64>,
    pub tol_sigma: Option<f64>,
    pub initial_d: Option<f64>,
    pub surrogate_mode: Option<SurrogateMode>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrapeSpec {
    pub learning_rate: Option<f64>,
    pub momentum: Option<f64>,
    pub batch_size: Option<usize>,
    pub iterations: Option<usize>,
    pub decay_window: Option<usize>,
    pub decay_factor: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AGrapeSpec {
    pub rounds: Option<usize>,
    pub memory: Option<usize>,
    pub refine_iters: Option<usize>,
    pub inner: Option<GrapeSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub points_per_axis: Option<usize>,
    /// Which angles to scan: the robust result (default) or the warm start.
    pub use_warm_start: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: SystemKind,
    /// Chain length; ignored for the single qubit.
    pub n: Option<usize>,
    pub depth: Option<usize>,
    pub theta_max: Option<f64>,
    pub optimizer: OptimizerKind,
    pub restarts: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    pub label: Option<String>,
    pub output: Option<PathBuf>,
    pub uncertainty: Option<BoxSpec>,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub warm_start: WarmStartSpec,
    #[serde(default)]
    pub scp: ScpSpec,
    #[serde(default)]
    pub grape: GrapeSpec,
    #[serde(default)]
    pub agrape: AGrapeSpec,
    #[serde(default)]
    pub scan: ScanSpec,
}

/// Warm-start settings after defaults are applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub grape: GrapeConfig,
    pub attempts: usize,
    pub accept_fidelity: f64,
    pub initial_theta: Option<Vec<f64>>,
}

/// Everything needed to run an experiment.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub instance: QaoaInstance,
    pub uncertainty: UncertaintyBox,
    pub train_points: usize,
    pub eval_points: usize,
    pub restarts: usize,
    pub warm_start: WarmStart,
    pub scp: ScpConfig,
    pub bgrape: GrapeConfig,
    pub agrape: AGrapeConfig,
}

fn pick<T: Copy>(v: Option<T>, default: T) -> T {
    v.unwrap_or(default)
}

impl GrapeSpec {
    fn apply(&self, mut base: GrapeConfig) -> GrapeConfig {
        base.learning_rate = pick(self.learning_rate, base.learning_rate);
        base.momentum = pick(self.momentum, base.momentum);
        base.batch_size = pick(self.batch_size, base.batch_size);
        base.iterations = pick(self.iterations, base.iterations);
        base.decay_window = pick(self.decay_window, base.decay_window);
        base.decay_factor = pick(self.decay_factor, base.decay_factor);
        base
    }
}

/// The nested single-qubit boxes `Δ_k = [4 ∓ 0.1k] × [−4 ∓ 0.1k]`.
pub fn single_qubit_box(k: usize) -> UncertaintyBox {
    let r = 0.1 * k as f64;
    UncertaintyBox::new(vec![4.0 - r, -4.0 - r], vec![4.0 + r, -4.0 + r]).expect("valid box")
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .map(str::to_owned)
                .unwrap_or_else(|| "<document>".into());
            Error::config(field, e.message().trim().to_string())
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// A display name for tables.
    pub fn cell_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.n {
            Some(n) if self.system != SystemKind::SingleQubit => format!("{} N={n}", self.system),
            _ => self.system.to_string(),
        }
    }

    fn multi_qubit(&self) -> bool {
        self.system != SystemKind::SingleQubit
    }

    pub fn build_instance(&self) -> Result<QaoaInstance> {
        let n = || self.n.ok_or_else(|| Error::config("n", "chain systems need a chain length"));
        let inst = match self.system {
            SystemKind::SingleQubit => build_single_qubit(4.0, -4.0),
            SystemKind::ChainOne => build_chain_one(n()?, 4.0, -4.0),
            SystemKind::ChainTwo => build_chain_two(n()?),
            SystemKind::ChainTwoInitError => build_chain_two_init_error(n()?),
        }
        .map_err(|e| Error::config("n", e.to_string()))?;
        let inst = match self.depth {
            Some(p) => inst.with_depth(p).map_err(|e| Error::config("depth", e.to_string()))?,
            None => inst,
        };
        let default_theta_max = match self.system {
            SystemKind::ChainTwo | SystemKind::ChainTwoInitError => PI,
            _ => inst.theta_max(),
        };
        inst.with_theta_max(pick(self.theta_max, default_theta_max))
            .map_err(|e| Error::config("theta_max", e.to_string()))
    }

    fn default_box(&self) -> UncertaintyBox {
        match self.system {
            SystemKind::SingleQubit => Ok(single_qubit_box(1)),
            SystemKind::ChainOne => UncertaintyBox::cube(2, -0.01, 0.01),
            SystemKind::ChainTwo => UncertaintyBox::new(vec![-0.15], vec![0.15]),
            SystemKind::ChainTwoInitError => UncertaintyBox::cube(2, 0.0, 0.01),
        }
        .expect("valid default box")
    }

    /// Applies defaults and checks every field.
    pub fn resolve(&self) -> Result<Resolved> {
        let instance = self.build_instance()?;
        let uncertainty = match &self.uncertainty {
            Some(b) => UncertaintyBox::new(b.lower.clone(), b.upper.clone())
                .map_err(|e| Error::config("uncertainty", e.to_string()))?,
            None => self.default_box(),
        };
        if uncertainty.dim() != instance.delta_dim() {
            return Err(Error::config(
                "uncertainty",
                format!("{} needs {} components", self.system, instance.delta_dim()),
            ));
        }
        let train_points = pick(
            self.sampler.points_per_axis,
            if uncertainty.dim() == 1 { 9 } else { 5 },
        );
        let eval_points = pick(self.sampler.eval_points_per_axis, 9);
        if train_points == 0 {
            return Err(Error::config("sampler.points_per_axis", "must be positive"));
        }
        if eval_points == 0 {
            return Err(Error::config("sampler.eval_points_per_axis", "must be positive"));
        }
        let restarts = pick(self.restarts, if self.multi_qubit() { 1 } else { 10 });
        if restarts == 0 {
            return Err(Error::config("restarts", "must be positive"));
        }

        let ws = &self.warm_start;
        let warm_start = WarmStart {
            grape: GrapeConfig {
                learning_rate: pick(ws.learning_rate, 0.01),
                iterations: pick(ws.iterations, 5000),
                target: Some(pick(ws.target_fidelity, 1.0 - 1e-7)),
                ..GrapeConfig::default()
            },
            attempts: pick(ws.attempts, 20),
            accept_fidelity: pick(ws.accept_fidelity, 0.999),
            initial_theta: ws.initial_theta.clone(),
        };
        warm_start
            .grape
            .validate()
            .map_err(|e| Error::config("warm_start", e.to_string()))?;
        if warm_start.attempts == 0 {
            return Err(Error::config("warm_start.attempts", "must be positive"));
        }
        if let Some(t) = &warm_start.initial_theta {
            if t.len() > instance.n_controls() || !t.len().is_multiple_of(2) {
                return Err(Error::config(
                    "warm_start.initial_theta",
                    format!("need an even length of at most {}", instance.n_controls()),
                ));
            }
            if t.iter().any(|x| !(0.0..=instance.theta_max()).contains(x)) {
                return Err(Error::config("warm_start.initial_theta", "angles outside [0, theta_max]"));
            }
        }

        let (scp_t_max, tol_sigma) = match self.system {
            SystemKind::SingleQubit => (500, 1e-6),
            SystemKind::ChainOne => (2000, 1e-8),
            SystemKind::ChainTwo | SystemKind::ChainTwoInitError => (100_000, 1e-8),
        };
        let s = &self.scp;
        let d = ScpConfig::default();
        let scp = ScpConfig {
            eta1: pick(s.eta1, d.eta1),
            eta2: pick(s.eta2, d.eta2),
            gamma1: pick(s.gamma1, d.gamma1),
            gamma2: pick(s.gamma2, d.gamma2),
            t_max: pick(s.t_max, scp_t_max),
            tol_d: pick(s.tol_d, d.tol_d),
            tol_sigma: pick(s.tol_sigma, tol_sigma),
            initial_d: pick(s.initial_d, d.initial_d),
            surrogate_mode: pick(s.surrogate_mode, d.surrogate_mode),
        };
        scp.validate()?;

        let bgrape = self.grape.apply(GrapeConfig {
            iterations: if self.multi_qubit() { 50_000 } else { 20_000 },
            ..GrapeConfig::default()
        });
        bgrape.validate()?;

        let a = &self.agrape;
        let inner_default = GrapeConfig {
            iterations: if self.multi_qubit() { 2000 } else { 1000 },
            ..GrapeConfig::default()
        };
        let agrape = AGrapeConfig {
            rounds: pick(a.rounds, if self.system == SystemKind::ChainOne { 25 } else { 15 }),
            memory: pick(a.memory, 10),
            refine_iters: pick(a.refine_iters, 3),
            inner: a.inner.clone().unwrap_or_default().apply(inner_default),
        };
        agrape.validate()?;

        Ok(Resolved {
            instance,
            uncertainty,
            train_points,
            eval_points,
            restarts,
            warm_start,
            scp,
            bgrape,
            agrape,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
system = "chain_two"
n = 5
optimizer = "scp"
"#;

    #[test]
    fn minimal_config_resolves_with_defaults() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.instance.depth(), 6);
        assert_eq!(r.instance.theta_max(), PI);
        assert_eq!(r.uncertainty.lower(), &[-0.15]);
        assert_eq!((r.train_points, r.eval_points, r.restarts), (9, 9, 1));
        assert_eq!(r.scp.t_max, 100_000);
        assert_eq!(r.bgrape.iterations, 50_000);
        assert_eq!(r.agrape.rounds, 15);
    }

    #[test]
    fn single_qubit_defaults() {
        let cfg = ExperimentConfig::from_toml_str("system = \"single_qubit\"\noptimizer = \"agrape\"\n").unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.instance.depth(), 5);
        assert_eq!(r.instance.theta_max(), 2.0);
        assert_eq!(r.restarts, 10);
        assert_eq!(r.train_points, 5);
        assert_eq!(r.scp.t_max, 500);
        assert_eq!(r.bgrape.iterations, 20_000);
        assert_eq!(r.agrape.inner.iterations, 1000);
        assert_eq!(r.uncertainty, single_qubit_box(1));
    }

    #[test]
    fn chain_one_uses_longer_adversarial_schedule() {
        let cfg = ExperimentConfig::from_toml_str("system = \"chain_one\"\nn = 3\noptimizer = \"agrape\"\n").unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.agrape.rounds, 25);
        assert_eq!(r.instance.depth(), 6);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ExperimentConfig::from_toml_str("system = \"chain_two\"\nn = 5\noptimizer = \"scp\"\nlearnign_rate = 1\n")
            .unwrap_err();
        match err {
            Error::ConfigInvalid { field, .. } => assert_eq!(field, "learnign_rate"),
            other => panic!("{other:?}"),
        }
        let err = ExperimentConfig::from_toml_str("system = \"chain_two\"\nn = 5\noptimizer = \"scp\"\n[scp]\neta = 0.3\n")
            .unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn field_level_validation() {
        let cases = [
            ("system = \"chain_two\"\noptimizer = \"scp\"\n", "n"),
            ("system = \"chain_two\"\nn = 2\noptimizer = \"scp\"\n", "n"),
            ("system = \"chain_two\"\nn = 5\noptimizer = \"scp\"\n[uncertainty]\nlower = [0.0, 0.0]\nupper = [0.1, 0.1]\n", "uncertainty"),
            ("system = \"chain_two\"\nn = 5\noptimizer = \"scp\"\n[scp]\neta1 = 0.05\n", "scp.eta1/eta2"),
            ("system = \"chain_two\"\nn = 5\noptimizer = \"scp\"\n[sampler]\npoints_per_axis = 0\n", "sampler.points_per_axis"),
            ("system = \"chain_two\"\nn = 5\noptimizer = \"scp\"\n[warm_start]\ninitial_theta = [1.0]\n", "warm_start.initial_theta"),
        ];
        for (text, want) in cases {
            let err = ExperimentConfig::from_toml_str(text).unwrap().resolve().unwrap_err();
            match err {
                Error::ConfigInvalid { field, .. } => assert_eq!(field, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::from_toml_str(MINIMAL).unwrap();
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn nested_single_qubit_boxes() {
        let (a, b, c) = (single_qubit_box(1), single_qubit_box(2), single_qubit_box(3));
        for (inner, outer) in [(&a, &b), (&b, &c)] {
            assert!(outer.contains(inner.lower()) && outer.contains(inner.upper()));
        }
    }
}
