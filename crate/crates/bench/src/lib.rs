//! Benchmark runners, result series and reports for the ANCF14 beam library.

pub mod acceptance;
pub mod buckling;
mod common;
pub mod config;
pub mod custom;
pub mod error;
pub mod princeton;
pub mod report;
pub mod series;
pub mod shaft;
pub mod spring;

use std::path::Path;
use std::time::Instant;

pub use config::{BenchmarkConfig, BenchmarkName};
pub use error::{BenchError, Result};
pub use report::{emit_results, Check, Outcome, Summary};
pub use series::ResultSeries;

/// Runs the benchmark named in `cfg`.
pub fn run(cfg: &BenchmarkConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.name {
        BenchmarkName::Spring => spring::run_spring(cfg),
        BenchmarkName::Princeton => princeton::run_princeton(cfg),
        BenchmarkName::Shaft => shaft::run_shaft(cfg),
        BenchmarkName::Buckling => buckling::run_buckling(cfg),
        BenchmarkName::Custom => custom::run_custom(cfg),
    }
}

/// Runs the benchmark and writes its series and summary into `dir`.
pub fn run_to_dir(cfg: &BenchmarkConfig, dir: &Path) -> Result<Summary> {
    let start = Instant::now();
    let outcome = run(cfg)?;
    emit_results(cfg.name.as_str(), &outcome, start.elapsed().as_secs_f64(), dir)
}
