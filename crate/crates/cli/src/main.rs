//! Batch experiment driver: builds the sample cache, runs the moment,
//! transform-identity, and spectral stages, and merges their check files into
//! a single report. Outputs are byte-deterministic for any worker count.

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;
mod stages;
mod svg;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use report::{write_checks_csv, CheckRecord};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "zetalab",
    about = "critical-line moment and Mellin-transform laboratory",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Key=value config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for tables, plots, and check files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (results are identical for any count).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Sample range start.
    #[arg(long, global = true)]
    t0: Option<f64>,

    /// Sample range end.
    #[arg(long, global = true)]
    t1: Option<f64>,

    /// Sample grid step.
    #[arg(long, global = true)]
    step: Option<f64>,

    /// Comma-separated vertical-line abscissae.
    #[arg(long, global = true, value_delimiter = ',')]
    sigma: Option<Vec<f64>>,

    /// Truncation height X of the direct transforms.
    #[arg(long = "X", global = true)]
    x_trunc: Option<f64>,

    /// Truncation of vertical-line integrals.
    #[arg(long, global = true)]
    tmax: Option<f64>,

    /// Maass-form spectral data CSV.
    #[arg(long = "spectral-data", global = true)]
    spectral_data: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Populate the critical-line sample cache.
    Sample,
    /// Build the fourth-moment table, fit the main term, derive E2.
    Moments,
    /// Run the transform identity suite and line exports.
    Mellin,
    /// Saddle diagnostics and Hecke-series scans.
    Spectral,
    /// Merge stage check files into the consolidated report.
    Report,
}

fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &cli.out {
        cfg.out_dir = v.clone();
        // keep the default cache co-located with the outputs unless given
        if cli.config.is_none() {
            cfg.cache_path = v.join("samples.zcache");
        }
    }
    if let Some(v) = cli.workers {
        cfg.workers = v;
    }
    if let Some(v) = cli.t0 {
        cfg.t0 = v;
    }
    if let Some(v) = cli.t1 {
        cfg.t1 = v;
    }
    if let Some(v) = cli.step {
        cfg.step = v;
    }
    if let Some(v) = &cli.sigma {
        cfg.sigmas = v.clone();
    }
    if let Some(v) = cli.x_trunc {
        cfg.x_trunc = v;
    }
    if let Some(v) = cli.tmax {
        cfg.tmax = v;
    }
    if let Some(v) = &cli.spectral_data {
        cfg.spectral_data = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_stage(cfg: &ExperimentConfig, stage: &str, checks: &[CheckRecord]) -> Result<()> {
    let path = cfg.out_dir.join(format!("checks_{stage}.csv"));
    write_checks_csv(&path, checks)
}

fn append_timing(cfg: &ExperimentConfig, stage: &str, start: Instant) {
    let line = format!("{stage}: {:.3} s\n", start.elapsed().as_secs_f64());
    let path = cfg.out_dir.join("timings.txt");
    let _ = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .and_then(|mut f| std::io::Write::write_all(&mut f, line.as_bytes()));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = resolve_config(cli)?;
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| cfg.out_dir.display().to_string())?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global()
        .ok(); // a second init in-process keeps the first pool; fine
    let start = Instant::now();
    match cli.cmd {
        Cmd::Sample => {
            let checks = stages::sample::run(&cfg)?;
            write_stage(&cfg, "sample", &checks)?;
            append_timing(&cfg, "sample", start);
        }
        Cmd::Moments => {
            let checks = stages::moments::run(&cfg)?;
            write_stage(&cfg, "moments", &checks)?;
            append_timing(&cfg, "moments", start);
        }
        Cmd::Mellin => {
            let checks = stages::mellin::run(&cfg)?;
            write_stage(&cfg, "mellin", &checks)?;
            append_timing(&cfg, "mellin", start);
        }
        Cmd::Spectral => {
            let checks = stages::spectral::run(&cfg)?;
            write_stage(&cfg, "spectral", &checks)?;
            append_timing(&cfg, "spectral", start);
        }
        Cmd::Report => {
            let outcome = stages::merge::run(&cfg)?;
            append_timing(&cfg, "report", start);
            if !outcome.pass {
                eprintln!("failed checks: {}", outcome.failed.join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
