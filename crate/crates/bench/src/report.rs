use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::series::ResultSeries;

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

/// One pass/fail comparison; `lower`/`upper` bound `measured` when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub measured: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub passed: bool,
}

impl Check {
    /// `lower <= measured <= upper`; a non-finite measurement fails.
    pub fn within(id: &str, description: &str, measured: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let passed = measured.is_finite() && lower.is_none_or(|l| measured >= l) && upper.is_none_or(|u| measured <= u);
        Self {
            id: id.to_owned(),
            description: description.to_owned(),
            measured: measured.is_finite().then_some(measured),
            lower,
            upper,
            passed,
        }
    }

    /// `|measured - target| <= rel * |target|`.
    pub fn relative(id: &str, description: &str, measured: f64, target: f64, rel: f64) -> Self {
        let d = rel * target.abs();
        Self::within(id, description, measured, Some(target - d), Some(target + d))
    }

    pub fn below(id: &str, description: &str, measured: f64, upper: f64) -> Self {
        Self::within(id, description, measured, None, Some(upper))
    }

    pub fn flag(id: &str, description: &str, passed: bool) -> Self {
        Self { id: id.to_owned(), description: description.to_owned(), measured: None, lower: None, upper: None, passed }
    }

    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |v| format!("{v:.6e}"));
        format!(
            "{status} {}: {} (measured {}, bounds [{}, {}])",
            self.id,
            self.description,
            fmt(self.measured),
            fmt(self.lower),
            fmt(self.upper)
        )
    }
}

/// Series and checks produced by one benchmark run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub series: Vec<ResultSeries>,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn series(&self, name: &str) -> Option<&ResultSeries> {
        self.series.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub schema_version: u32,
    pub benchmark: String,
    pub passed: bool,
    pub runtime_s: f64,
    pub checks: Vec<Check>,
    pub files: Vec<String>,
}

/// Writes every series as CSV plus `summary.json` into `dir`.
pub fn emit_results(benchmark: &str, outcome: &Outcome, runtime_s: f64, dir: &Path) -> Result<Summary> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.to_owned(), source })?;
    let mut files = Vec::new();
    for s in &outcome.series {
        let path = s.save(dir)?;
        files.push(path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default());
    }
    let summary = Summary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        benchmark: benchmark.to_owned(),
        passed: outcome.passed(),
        runtime_s,
        checks: outcome.checks.clone(),
        files,
    };
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    std::fs::write(&path, text).map_err(|source| BenchError::Io { path, source })?;
    Ok(summary)
}
