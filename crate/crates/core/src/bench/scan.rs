// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fidelity landscapes over an uncertainty box.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qaoa::fidelities;
use crate::spinmodel::QaoaInstance;
use crate::uncertainty::{sample_grid, UncertaintyBox};

/// Cap on `−log₁₀(1−F)` for rows with `F = 1` to machine precision.
pub const LOG_INFIDELITY_CAP: f64 = 16.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub delta: Vec<f64>,
    pub fidelity: f64,
    pub log_infidelity: f64,
}

pub fn log_infidelity(f: f64) -> f64 {
    let inf = 1.0 - f;
    if inf <= 0.0 {
        LOG_INFIDELITY_CAP
    } else {
        (-inf.log10()).min(LOG_INFIDELITY_CAP)
    }
}

/// Fidelity on a `points_per_axis` grid over `bounds`, last axis fastest.
pub fn landscape_scan(
    inst: &QaoaInstance,
    theta: &[f64],
    bounds: &UncertaintyBox,
    points_per_axis: usize,
) -> Result<Vec<ScanRecord>> {
    let grid = sample_grid(bounds, points_per_axis)?;
    let fs = fidelities(inst, theta, grid.samples())?;
    Ok(grid
        .samples()
        .iter()
        .zip(fs)
        .map(|(d, f)| ScanRecord {
            delta: d.clone(),
            fidelity: f,
            log_infidelity: log_infidelity(f),
        })
        .collect())
}

/// Floats in CSV output: nine significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_scan_csv<W: Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let dim = records.first().map_or(0, |r| r.delta.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=dim).map(|k| format!("delta_{k}")).collect();
    header.push("fidelity".into());
    header.push("log_infidelity".into());
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row: Vec<String> = r.delta.iter().map(|&x| fmt_float(x)).collect();
        row.push(fmt_float(r.fidelity));
        row.push(fmt_float(r.log_infidelity));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
