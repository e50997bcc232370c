// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment harness: configs, runs, scans and comparison tables.

pub mod config;
pub mod experiment;
pub mod scan;
pub mod table;

pub use config::{single_qubit_box, ExperimentConfig, OptimizerKind, Resolved};
pub use experiment::{run_experiment, warm_start, OptimizerTrace, RestartRecord, RunReport, WarmStartRecord};
pub use scan::{landscape_scan, log_infidelity, write_scan_csv, ScanRecord};
pub use table::{compare_table, ComparisonTable, TableEntry, TableRow};
