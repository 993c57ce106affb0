//! Check records and run-report serialization. Every executed check appears
//! exactly once; skipped-with-reason is a first-class status so data-dependent
//! checks never silently vanish.

use anyhow::{bail, Context, Result};
use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckStatus::Pass => write!(f, "pass"),
            CheckStatus::Fail => write!(f, "fail"),
            CheckStatus::Skip => write!(f, "skip"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub stage: String,
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub budget: f64,
    pub status: CheckStatus,
    /// Free-form context; kept comma-free for the CSV.
    pub note: String,
}

impl CheckRecord {
    pub fn abs_diff(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    pub fn rel_diff(&self) -> f64 {
        self.abs_diff() / self.rhs.abs().max(1e-300)
    }

    /// Pass iff |lhs - rhs| <= budget.
    pub fn compare(stage: &str, name: &str, lhs: f64, rhs: f64, budget: f64, note: &str) -> Self {
        let status = if (lhs - rhs).abs() <= budget {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        CheckRecord {
            stage: stage.into(),
            name: name.into(),
            lhs,
            rhs,
            budget,
            status,
            note: sanitize(note),
        }
    }

    /// Archived value, never failing.
    pub fn info(stage: &str, name: &str, value: f64, note: &str) -> Self {
        CheckRecord {
            stage: stage.into(),
            name: name.into(),
            lhs: value,
            rhs: value,
            budget: f64::INFINITY,
            status: CheckStatus::Pass,
            note: sanitize(note),
        }
    }

    /// Explicit pass/fail with recorded values.
    pub fn flag(stage: &str, name: &str, lhs: f64, rhs: f64, ok: bool, note: &str) -> Self {
        CheckRecord {
            stage: stage.into(),
            name: name.into(),
            lhs,
            rhs,
            budget: f64::NAN,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            note: sanitize(note),
        }
    }

    pub fn skip(stage: &str, name: &str, reason: &str) -> Self {
        CheckRecord {
            stage: stage.into(),
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            budget: f64::NAN,
            status: CheckStatus::Skip,
            note: sanitize(reason),
        }
    }
}

fn sanitize(note: &str) -> String {
    note.replace(',', ";")
}

/// Stage check file: stage,check,lhs,rhs,abs_diff,rel_diff,budget,status,note
pub fn write_checks_csv(path: &Path, records: &[CheckRecord]) -> Result<()> {
    let mut out = String::from("stage,check,lhs,rhs,abs_diff,rel_diff,budget,status,note\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{:?},{:?},{:?},{:?},{:?},{},{}\n",
            r.stage,
            r.name,
            r.lhs,
            r.rhs,
            r.abs_diff(),
            r.rel_diff(),
            r.budget,
            r.status,
            r.note
        ));
    }
    std::fs::write(path, out).with_context(|| path.display().to_string())
}

/// The six-column identity-check export (`check,lhs,rhs,abs_diff,rel_diff,budget`).
pub fn write_identity_csv(path: &Path, records: &[CheckRecord]) -> Result<()> {
    let mut out = String::from("check,lhs,rhs,abs_diff,rel_diff,budget\n");
    for r in records {
        out.push_str(&format!(
            "{},{:?},{:?},{:?},{:?},{:?}\n",
            r.name,
            r.lhs,
            r.rhs,
            r.abs_diff(),
            r.rel_diff(),
            r.budget
        ));
    }
    std::fs::write(path, out).with_context(|| path.display().to_string())
}

pub fn read_checks_csv(path: &Path) -> Result<Vec<CheckRecord>> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let mut lines = text.lines();
    match lines.next() {
        Some("stage,check,lhs,rhs,abs_diff,rel_diff,budget,status,note") => {}
        other => bail!("{}: unexpected header {:?}", path.display(), other),
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(9, ',').collect();
        if fields.len() != 9 {
            bail!("{}:{}: expected 9 fields", path.display(), idx + 2);
        }
        let f = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .with_context(|| format!("{}:{}: bad number {s:?}", path.display(), idx + 2))
        };
        let status = match fields[7] {
            "pass" => CheckStatus::Pass,
            "fail" => CheckStatus::Fail,
            "skip" => CheckStatus::Skip,
            other => bail!("{}:{}: bad status {other:?}", path.display(), idx + 2),
        };
        out.push(CheckRecord {
            stage: fields[0].into(),
            name: fields[1].into(),
            lhs: f(fields[2])?,
            rhs: f(fields[3])?,
            budget: f(fields[6])?,
            status,
            note: fields[8].into(),
        });
    }
    Ok(out)
}

/// FNV-1a 64 of a byte stream, for artifact checksums.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}
