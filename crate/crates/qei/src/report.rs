//! Report records and their JSON/CSV persistence.
//!
//! Every measured number in a report travels with an error estimate. Wall
//! clock data goes to a separate metadata file so that reports are
//! reproducible byte for byte.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Campaign;
use crate::error::CliError;

/// A number with its certification (quadrature error, tail bound,
/// truncation proxy or step-halving disagreement; zero for exact counts).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
}

impl Measured {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

impl From<qei_core::Certified> for Measured {
    fn from(c: qei_core::Certified) -> Self {
        Self::new(c.value, c.error)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One pass/fail comparison of a measured value against a limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: Measured,
    pub relation: Relation,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: Measured, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::AtMost,
            limit,
            passed: measured.value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: Measured, limit: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            limit,
            passed: measured.value >= limit,
        }
    }

    /// Count-valued check.
    pub fn count_at_least(name: impl Into<String>, count: usize, limit: usize) -> Self {
        Self::at_least(name, Measured::exact(count as f64), limit as f64)
    }

    pub fn count_at_most(name: impl Into<String>, count: usize, limit: usize) -> Self {
        Self::at_most(name, Measured::exact(count as f64), limit as f64)
    }

    /// `|value − target| ≤ tolerance`, recorded as a deviation.
    pub fn close(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::at_most(name, Measured::exact((value - target).abs()), tolerance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Input,
    Certification,
}

/// A campaign that could not complete.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub number: usize,
    pub campaign: Campaign,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub failure: Option<Failure>,
}

impl CriterionReport {
    pub fn from_checks(campaign: Campaign, checks: Vec<Check>) -> Self {
        Self {
            number: campaign.number(),
            campaign,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            checks,
            failure: None,
        }
    }

    pub fn failed(campaign: Campaign, err: &CliError) -> Self {
        let kind = if err.exit_code() == 3 {
            FailureKind::Certification
        } else {
            FailureKind::Input
        };
        Self {
            number: campaign.number(),
            campaign,
            passed: false,
            checks: Vec::new(),
            failure: Some(Failure {
                kind,
                message: err.to_string(),
            }),
        }
    }

    /// One line summary: `[PASS] 3 static_qwei (5/5 checks)`.
    pub fn summary_line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let mut line = format!("[{tag}] {:>2} {} ({ok}/{} checks)", self.number, self.campaign.name(), self.checks.len());
        if let Some(f) = &self.failure {
            line.push_str(&format!(": {}", f.message));
        }
        for c in self.checks.iter().filter(|c| !c.passed) {
            line.push_str(&format!("; {} = {:e} vs {:e}", c.name, c.measured.value, c.limit));
        }
        line
    }
}

/// Tabulated output written as CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_header(name: &str, header: Vec<String>) -> Self {
        Self {
            name: name.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
        w.write_record(&self.header).map_err(|e| CliError::io(path, e))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::io(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }
}

/// Shortest round-trip formatting, so tables are reproducible.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub passed: bool,
    /// Checks attached to the tabulations of the command.
    pub checks: Vec<Check>,
    pub criteria: Vec<CriterionReport>,
    /// CSV files written next to the report.
    pub tables: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, checks: Vec<Check>, criteria: Vec<CriterionReport>, tables: Vec<String>) -> Self {
        let passed = checks.iter().all(|c| c.passed) && criteria.iter().all(|c| c.passed);
        Self {
            command: command.into(),
            seed,
            passed,
            checks,
            criteria,
            tables,
        }
    }

    /// Exit code: 2 for input problems inside a campaign, 3 for
    /// certification failures, 1 for failed checks, 0 otherwise.
    pub fn exit_code(&self) -> i32 {
        let kinds: Vec<FailureKind> = self.criteria.iter().filter_map(|c| c.failure.as_ref().map(|f| f.kind)).collect();
        if kinds.contains(&FailureKind::Input) {
            2
        } else if kinds.contains(&FailureKind::Certification) {
            3
        } else if self.passed {
            0
        } else {
            1
        }
    }
}

/// Wall-clock data of a run, kept out of the reproducible report.
#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub command: String,
    pub started_unix_seconds: u64,
    pub elapsed_seconds: f64,
    pub threads: usize,
    pub campaign_seconds: Vec<(Campaign, f64)>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path, e))?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
