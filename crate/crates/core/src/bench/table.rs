// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

//! Optimizer comparison tables, one row per (system, box) cell.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, OptimizerKind};
use super::experiment::{run_experiment, RunReport};
use super::scan::fmt_float;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub optimizer: OptimizerKind,
    pub worst_infidelity: Option<f64>,
    pub avg_infidelity: Option<f64>,
    pub seconds: Option<f64>,
    pub best_accuracy: bool,
    pub best_time: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub cell: String,
    pub entries: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<TableRow>,
}

/// Row key: the cell label plus the box, so the same system at two box
/// sizes lands in two rows.
pub fn cell_key(cfg: &ExperimentConfig) -> String {
    let mut key = cfg.cell_label();
    if cfg.label.is_none() {
        if let Ok(r) = cfg.resolve() {
            let b = &r.uncertainty;
            let axes: Vec<String> = b
                .lower()
                .iter()
                .zip(b.upper())
                .map(|(l, u)| format!("[{l},{u}]"))
                .collect();
            key.push(' ');
            key.push_str(&axes.join("x"));
            key.push_str(&format!(" p={}", r.instance.depth()));
        }
    }
    key
}

fn mark_best(entries: &mut [TableEntry]) {
    let argmin = |f: fn(&TableEntry) -> Option<f64>| {
        entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| f(e).map(|v| (i, v)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    };
    let acc = argmin(|e| e.worst_infidelity);
    let time = argmin(|e| e.seconds);
    for (i, e) in entries.iter_mut().enumerate() {
        e.best_accuracy = Some(i) == acc;
        e.best_time = Some(i) == time;
    }
}

/// Assembles a table from finished runs, in first-seen row order.
pub fn assemble(results: &[(ExperimentConfig, Result<RunReport>)]) -> ComparisonTable {
    let mut rows: Vec<TableRow> = Vec::new();
    for (cfg, res) in results {
        let entry = match res {
            Ok(rep) => TableEntry {
                optimizer: cfg.optimizer,
                worst_infidelity: Some(rep.eval_worst_infidelity),
                avg_infidelity: Some(rep.eval_avg_infidelity),
                seconds: Some(rep.wall_seconds),
                best_accuracy: false,
                best_time: false,
                error: None,
            },
            Err(e) => TableEntry {
                optimizer: cfg.optimizer,
                worst_infidelity: None,
                avg_infidelity: None,
                seconds: None,
                best_accuracy: false,
                best_time: false,
                error: Some(e.to_string()),
            },
        };
        let key = cell_key(cfg);
        match rows.iter_mut().find(|r| r.cell == key) {
            Some(row) => row.entries.push(entry),
            None => rows.push(TableRow {
                cell: key,
                entries: vec![entry],
            }),
        }
    }
    for row in &mut rows {
        mark_best(&mut row.entries);
    }
    ComparisonTable { rows }
}

/// Runs every config (cells in parallel) and tabulates the results. A failed
/// cell is recorded in its entry and does not stop the others.
pub fn compare_table(configs: &[ExperimentConfig]) -> (ComparisonTable, Vec<(ExperimentConfig, Result<RunReport>)>) {
    let results: Vec<_> = configs
        .par_iter()
        .map(|c| (c.clone(), run_experiment(c)))
        .collect();
    (assemble(&results), results)
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

impl ComparisonTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let e = |e: csv::Error| Error::Io(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "cell",
            "optimizer",
            "worst_infidelity",
            "avg_infidelity",
            "seconds",
            "best_accuracy",
            "best_time",
            "error",
        ])
        .map_err(e)?;
        for row in &self.rows {
            for en in &row.entries {
                w.write_record([
                    row.cell.clone(),
                    en.optimizer.to_string(),
                    opt(en.worst_infidelity),
                    opt(en.avg_infidelity),
                    opt(en.seconds),
                    en.best_accuracy.to_string(),
                    en.best_time.to_string(),
                    en.error.clone().unwrap_or_default(),
                ])
                .map_err(e)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Fixed-width text; `*` marks the best value in each row.
    pub fn to_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.cell.len()).max().unwrap_or(0).max(4);
        let mut lines = vec![format!(
            "{:<width$} {:<14} {:>16} {:>16} {:>16}",
            "cell", "optimizer", "w-c infidelity", "avg infidelity", "time [s]"
        )];
        let star = |v: Option<f64>, best: bool| match v {
            Some(x) => format!("{}{}", fmt_float(x), if best { "*" } else { " " }),
            None => "-".into(),
        };
        for row in &self.rows {
            for en in &row.entries {
                let mut line = format!(
                    "{:<width$} {:<14} {:>16} {:>16} {:>16}",
                    row.cell,
                    en.optimizer.to_string(),
                    star(en.worst_infidelity, en.best_accuracy),
                    opt(en.avg_infidelity),
                    star(en.seconds, en.best_time),
                );
                if let Some(err) = &en.error {
                    line.push_str(&format!("  FAILED: {err}"));
                }
                lines.push(line.trim_end().to_string());
            }
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(optimizer: &str, upper: f64) -> ExperimentConfig {
        ExperimentConfig::from_toml_str(&format!(
            "system = \"chain_two_init_error\"\nn = 3\noptimizer = \"{optimizer}\"\n[uncertainty]\nlower = [0.0, 0.0]\nupper = [{upper}, {upper}]\n"
        ))
        .unwrap()
    }

    fn fake(w: f64, t: f64) -> Result<RunReport> {
        let c = cfg("scp", 0.01);
        let mut rep = run_experiment(&ExperimentConfig {
            optimizer: OptimizerKind::GrapeNominal,
            ..c
        })
        .unwrap();
        rep.eval_worst_infidelity = w;
        rep.wall_seconds = t;
        Ok(rep)
    }

    #[test]
    fn rows_group_by_cell_and_mark_best() {
        let results = vec![
            (cfg("scp", 0.01), fake(1e-4, 3.0)),
            (cfg("bgrape", 0.01), fake(2e-4, 1.0)),
            (cfg("scp", 0.1), fake(5e-3, 1.0)),
            (cfg("agrape", 0.01), Err(Error::NumericalFailure("boom".into()))),
        ];
        let t = assemble(&results);
        assert_eq!(t.rows.len(), 2);
        let r = &t.rows[0];
        assert_eq!(r.entries.len(), 3);
        assert!(r.entries[0].best_accuracy && !r.entries[0].best_time);
        assert!(r.entries[1].best_time && !r.entries[1].best_accuracy);
        assert_eq!(r.entries[2].error.as_deref(), Some("numerical failure: boom"));
        assert!(t.rows[1].entries[0].best_accuracy && t.rows[1].entries[0].best_time);
        let text = t.to_text();
        assert!(text.contains("FAILED: numerical failure: boom"));
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let csv = String::from_utf8(buf).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().nth(1).unwrap().contains("1.00000000e-4"));
    }

    #[test]
    fn singleton_is_trivially_best() {
        let t = assemble(&[(cfg("scp", 0.01), fake(1e-3, 1.0))]);
        assert_eq!(t.rows.len(), 1);
        assert!(t.rows[0].entries[0].best_accuracy && t.rows[0].entries[0].best_time);
    }
}
