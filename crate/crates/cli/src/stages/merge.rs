//! `report`: merge the per-stage check files into one machine-readable CSV
//! and a human-readable text report with config echo, artifact checksums, and
//! the overall verdict.

use crate::config::ExperimentConfig;
use crate::report::{fnv64, read_checks_csv, write_checks_csv, CheckRecord, CheckStatus};
use anyhow::{bail, Context, Result};

const STAGES: [&str; 4] = ["sample", "moments", "mellin", "spectral"];

pub struct Outcome {
    pub pass: bool,
    pub failed: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut missing = Vec::new();
    let mut records: Vec<CheckRecord> = Vec::new();
    for stage in STAGES {
        let path = cfg.out_dir.join(format!("checks_{stage}.csv"));
        if !path.exists() {
            missing.push(format!("checks_{stage}.csv (run `zetalab {stage}`)"));
            continue;
        }
        records.extend(read_checks_csv(&path)?);
    }
    if !missing.is_empty() {
        bail!("missing stage outputs: {}", missing.join(", "));
    }

    let report_csv = cfg.out_dir.join("report.csv");
    write_checks_csv(&report_csv, &records)?;

    let failed: Vec<String> = records
        .iter()
        .filter(|r| r.status == CheckStatus::Fail)
        .map(|r| format!("{}/{}", r.stage, r.name))
        .collect();
    let skipped: Vec<String> = records
        .iter()
        .filter(|r| r.status == CheckStatus::Skip)
        .map(|r| format!("{}/{} ({})", r.stage, r.name, r.note))
        .collect();
    let pass = failed.is_empty();

    let mut text = String::new();
    text.push_str("run report\n==========\n\n");
    text.push_str(&format!(
        "overall: {}\n",
        if pass { "PASS" } else { "FAIL" }
    ));
    text.push_str(&format!(
        "checks: {} total, {} failed, {} skipped\n\n",
        records.len(),
        failed.len(),
        skipped.len()
    ));
    if !failed.is_empty() {
        text.push_str("failed checks:\n");
        for f in &failed {
            text.push_str(&format!("  {f}\n"));
        }
        text.push('\n');
    }
    if !skipped.is_empty() {
        text.push_str("skipped checks:\n");
        for s in &skipped {
            text.push_str(&format!("  {s}\n"));
        }
        text.push('\n');
    }
    text.push_str("check table:\n");
    for r in &records {
        text.push_str(&format!(
            "  [{}] {}/{}: lhs = {:?}, rhs = {:?}, |diff| = {:.3e}, budget = {:?}  {}\n",
            r.status,
            r.stage,
            r.name,
            r.lhs,
            r.rhs,
            r.abs_diff(),
            r.budget,
            r.note
        ));
    }
    text.push('\n');

    text.push_str("artifact checksums (fnv1a-64):\n");
    let mut names: Vec<_> = std::fs::read_dir(&cfg.out_dir)
        .with_context(|| cfg.out_dir.display().to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .map(|x| x == "csv" || x == "svg")
                .unwrap_or(false)
        })
        .collect();
    names.sort();
    for p in names {
        let bytes = std::fs::read(&p).with_context(|| p.display().to_string())?;
        text.push_str(&format!(
            "  {:016x}  {}\n",
            fnv64(&bytes),
            p.file_name().unwrap_or_default().to_string_lossy()
        ));
    }
    text.push('\n');

    if let Ok(timings) = std::fs::read_to_string(cfg.out_dir.join("timings.txt")) {
        text.push_str("stage wall clock:\n");
        for line in timings.lines() {
            text.push_str(&format!("  {line}\n"));
        }
        text.push('\n');
    }

    text.push_str("config echo:\n");
    for line in cfg.echo().lines() {
        text.push_str(&format!("  {line}\n"));
    }

    let report_txt = cfg.out_dir.join("report.txt");
    std::fs::write(&report_txt, &text).with_context(|| report_txt.display().to_string())?;
    println!(
        "report: {} checks, {} failed, {} skipped -> {}",
        records.len(),
        failed.len(),
        skipped.len(),
        report_csv.display()
    );
    Ok(Outcome { pass, failed })
}
