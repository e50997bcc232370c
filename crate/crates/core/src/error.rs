// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("Jacobi diagonalizer did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("ground state is degenerate (gap {0:.3e})")]
    DegenerateGroundState(f64),
    #[error("site {site} out of range for a chain of {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("chain of {n} qubits is too short (need at least {min})")]
    ChainTooShort { n: usize, min: usize },
    #[error("chain of {n} qubits is too long (at most {max})")]
    ChainTooLong { n: usize, max: usize },
    #[error("initial-state error amplitudes ({0}, {1}) have squared norm above 1")]
    InvalidAmplitudes(f64, f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("finite-difference step {0:e} is below 1e-9")]
    StepTooSmall(f64),
    #[error("{0} samples requested, limit is 10000")]
    TooManySamples(usize),
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("empty bound intersection for component {0}")]
    InfeasibleBounds(usize),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("initial control vector is outside the feasible box (component {0})")]
    InfeasibleStart(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid config field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Config problems map to exit code 1, everything else to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid { .. } | Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
