// Copyright 2026 The robqaoa Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use robqaoa::bench::{compare_table, landscape_scan, run_experiment, warm_start, write_scan_csv, ExperimentConfig};
use robqaoa::{selftest, Error, Result};

#[derive(Parser)]
#[command(name = "robqaoa", version, about = "Robust bang-bang QAOA control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its JSON report.
    Run {
        config: PathBuf,
        /// Overrides the config's `output`; `-` for stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fidelity landscape of an experiment's solution as CSV.
    Scan {
        config: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Comparison table over several configs. Arguments are TOML configs or
    /// text files listing one config path per line.
    Table {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Where to write the CSV form; the text form goes to stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the built-in correctness checks.
    Selftest,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => Ok(Box::new(BufWriter::new(File::create(p)?))),
    }
}

/// Expands list files into the config paths they name, relative to the list.
fn expand_configs(args: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for a in args {
        if a.extension().is_some_and(|e| e == "toml") {
            out.push(a.clone());
            continue;
        }
        let text = std::fs::read_to_string(a).map_err(|e| Error::config(a.display().to_string(), e.to_string()))?;
        let base = a.parent().unwrap_or(Path::new("."));
        for line in text.lines().map(str::trim) {
            if !line.is_empty() && !line.starts_with('#') {
                out.push(base.join(line));
            }
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, output } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let report = run_experiment(&cfg)?;
            let dest = output.or_else(|| cfg.output.clone());
            let mut w = sink(dest.as_deref())?;
            writeln!(w, "{}", report.to_json())?;
            w.flush()?;
            eprintln!(
                "worst-case infidelity {:.3e}, average {:.3e}, {:.1}s",
                report.eval_worst_infidelity, report.eval_avg_infidelity, report.wall_seconds
            );
        }
        Command::Scan { config, output } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let r = cfg.resolve()?;
            let theta = if cfg.scan.use_warm_start.unwrap_or(false) {
                warm_start(&r.instance, &r.warm_start, cfg.seed)?.theta
            } else {
                run_experiment(&cfg)?.theta
            };
            let points = cfg.scan.points_per_axis.unwrap_or(if r.uncertainty.dim() == 1 { 61 } else { 21 });
            let records = landscape_scan(&r.instance, &theta, &r.uncertainty, points)?;
            let dest = output.or_else(|| cfg.output.clone());
            write_scan_csv(&records, sink(dest.as_deref())?)?;
        }
        Command::Table { configs, csv } => {
            let cfgs = expand_configs(&configs)?
                .iter()
                .map(|p| ExperimentConfig::from_path(p))
                .collect::<Result<Vec<_>>>()?;
            let (table, _) = compare_table(&cfgs);
            print!("{}", table.to_text());
            if let Some(p) = csv {
                table.write_csv(sink(Some(&p))?)?;
            }
        }
        Command::Selftest => {
            let checks = selftest::run_all();
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                return Err(Error::NumericalFailure(format!("{failed} selftest checks failed")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
