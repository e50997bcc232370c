// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Python bindings. Angles and uncertainty values cross the boundary as
//! lists of floats; reports and traces as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use robqaoa::bench::{self, ExperimentConfig};
use robqaoa::optimizers::{self, GrapeConfig, GrapeObjective, ScpConfig};
use robqaoa::qaoa::{self, ControlVector};
use robqaoa::spinmodel::{self, QaoaInstance};
use robqaoa::uncertainty::{self, Provenance, SampleSet, UncertaintyBox};
use robqaoa::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::ConfigInvalid { .. } | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A benchmark system at a fixed depth and angle bound.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: QaoaInstance,
}

#[pymethods]
impl PyInstance {
    #[staticmethod]
    #[pyo3(signature = (omega_a = 4.0, omega_b = -4.0))]
    fn single_qubit(omega_a: f64, omega_b: f64) -> PyResult<Self> {
        let inner = spinmodel::build_single_qubit(omega_a, omega_b).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n, h_plus = 4.0, h_minus = -4.0))]
    fn chain_one(n: usize, h_plus: f64, h_minus: f64) -> PyResult<Self> {
        let inner = spinmodel::build_chain_one(n, h_plus, h_minus).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn chain_two(n: usize) -> PyResult<Self> {
        let inner = spinmodel::build_chain_two(n).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn chain_two_init_error(n: usize) -> PyResult<Self> {
        let inner = spinmodel::build_chain_two_init_error(n).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn with_depth(&self, depth: usize) -> PyResult<Self> {
        let inner = self.inner.clone().with_depth(depth).map_err(to_py)?;
        Ok(Self { inner })
    }

    fn with_theta_max(&self, theta_max: f64) -> PyResult<Self> {
        let inner = self.inner.clone().with_theta_max(theta_max).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn n_controls(&self) -> usize {
        self.inner.n_controls()
    }

    #[getter]
    fn theta_max(&self) -> f64 {
        self.inner.theta_max()
    }

    #[getter]
    fn nominal_delta(&self) -> Vec<f64> {
        self.inner.nominal_delta().to_vec()
    }

    fn fidelity(&self, theta: Vec<f64>, delta: Vec<f64>) -> PyResult<f64> {
        qaoa::fidelity(&self.inner, &theta, &delta).map_err(to_py)
    }

    /// `(fidelity, gradient)` by the adjoint method.
    fn gradient(&self, theta: Vec<f64>, delta: Vec<f64>) -> PyResult<(f64, Vec<f64>)> {
        let e = qaoa::fidelity_gradient(&self.inner, &theta, &delta).map_err(to_py)?;
        Ok((e.value, e.gradient))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(dim={}, depth={}, theta_max={})",
            self.inner.dim(),
            self.inner.depth(),
            self.inner.theta_max()
        )
    }
}

fn uncertainty_box(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<UncertaintyBox> {
    UncertaintyBox::new(lower, upper).map_err(to_py)
}

fn grid_set(samples: Vec<Vec<f64>>) -> PyResult<SampleSet> {
    let dim = samples.first().map_or(0, Vec::len);
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for s in &samples {
        for (k, &x) in s.iter().enumerate().take(dim) {
            lo[k] = lo[k].min(x);
            hi[k] = hi[k].max(x);
        }
    }
    let b = uncertainty_box(lo, hi)?;
    SampleSet::new(samples, &b, Provenance::Grid).map_err(to_py)
}

#[pyfunction]
fn sample_grid(lower: Vec<f64>, upper: Vec<f64>, points_per_axis: usize) -> PyResult<Vec<Vec<f64>>> {
    let b = uncertainty_box(lower, upper)?;
    Ok(uncertainty::sample_grid(&b, points_per_axis).map_err(to_py)?.samples().to_vec())
}

/// `(worst, average)` fidelity over the samples.
#[pyfunction]
fn worst_and_average(instance: &PyInstance, theta: Vec<f64>, samples: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
    let set = grid_set(samples)?;
    let wa = uncertainty::worst_and_average(&instance.inner, &theta, &set).map_err(to_py)?;
    Ok((wa.worst, wa.average))
}

/// Trust-region SCP over the sampled worst case. Returns the best accepted
/// angles and the trace as JSON.
#[pyfunction]
#[pyo3(signature = (instance, theta0, samples, t_max = 500, initial_d = 0.2))]
fn scp(
    py: Python<'_>,
    instance: &PyInstance,
    theta0: Vec<f64>,
    samples: Vec<Vec<f64>>,
    t_max: usize,
    initial_d: f64,
) -> PyResult<(Vec<f64>, String)> {
    let set = grid_set(samples)?;
    let theta0 = ControlVector::for_instance(&instance.inner, theta0).map_err(to_py)?;
    let cfg = ScpConfig {
        t_max,
        initial_d,
        ..ScpConfig::default()
    };
    let (theta, trace) = py
        .detach(|| optimizers::scp_optimize(&instance.inner, &theta0, &set, &cfg))
        .map_err(to_py)?;
    let json = serde_json::to_string(&trace).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((theta.into_angles(), json))
}

/// Plain GRAPE on the fidelity at one uncertainty value (the nominal one by
/// default). Returns the best angles and their fidelity.
#[pyfunction]
#[pyo3(signature = (instance, theta0, delta = None, iterations = 5000, learning_rate = 0.01))]
fn grape(
    py: Python<'_>,
    instance: &PyInstance,
    theta0: Vec<f64>,
    delta: Option<Vec<f64>>,
    iterations: usize,
    learning_rate: f64,
) -> PyResult<(Vec<f64>, f64)> {
    let delta = delta.unwrap_or_else(|| instance.inner.nominal_delta().to_vec());
    let theta0 = ControlVector::for_instance(&instance.inner, theta0).map_err(to_py)?;
    let cfg = GrapeConfig {
        iterations,
        learning_rate,
        ..GrapeConfig::default()
    };
    let (theta, trace) = py
        .detach(|| optimizers::grape_optimize(&instance.inner, &theta0, &GrapeObjective::Single(delta), &cfg))
        .map_err(to_py)?;
    Ok((theta.into_angles(), trace.best_objective))
}

/// Runs an experiment from TOML text and returns the JSON report.
#[pyfunction]
fn run_experiment(py: Python<'_>, config_toml: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::from_toml_str(config_toml).map_err(to_py)?;
    let report = py.detach(|| bench::run_experiment(&cfg)).map_err(to_py)?;
    Ok(report.to_json())
}

/// `(name, passed, detail)` for every built-in check.
#[pyfunction]
fn selftest(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(robqaoa::selftest::run_all)
        .into_iter()
        .map(|c| (c.name, c.passed, c.detail))
        .collect()
}

#[pymodule]
fn robqaoa_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(sample_grid, m)?)?;
    m.add_function(wrap_pyfunction!(worst_and_average, m)?)?;
    m.add_function(wrap_pyfunction!(scp, m)?)?;
    m.add_function(wrap_pyfunction!(grape, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
