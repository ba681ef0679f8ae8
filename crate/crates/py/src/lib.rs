//! Python module `ancf14`.

use std::path::PathBuf;

use ancf14_bench::{run_to_dir, BenchError, BenchmarkConfig, BenchmarkName};
use ancf14_core::frame::bishop_step;
use ancf14_core::{BeamSpec, CrossSection, FrameTriad};
use nalgebra::Vector3;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: BenchError) -> PyErr {
    match e {
        BenchError::Config(_) | BenchError::Json(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn core_err(e: ancf14_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs a benchmark and returns the summary as JSON text.
pub fn run_config(config: &str, out_dir: Option<PathBuf>) -> Result<String, BenchError> {
    let cfg = match config.parse::<BenchmarkName>() {
        Ok(name) => BenchmarkConfig::preset(name),
        Err(_) => BenchmarkConfig::from_json(config)?,
    };
    let dir = out_dir.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("results").join(cfg.name.as_str()));
    let summary = run_to_dir(&cfg, &dir)?;
    Ok(serde_json::to_string(&summary)?)
}

/// Bishop frames transported along a sequence of tangents, returned as row-major
/// 3x3 matrices whose columns are (t, a2, a3).
pub fn transport(tangents: &[[f64; 3]], initial_normal: [f64; 3]) -> ancf14_core::Result<Vec<[[f64; 3]; 3]>> {
    let Some(first) = tangents.first() else { return Ok(Vec::new()) };
    let mut frame = FrameTriad::from_tangent_and_hint(&Vector3::from(*first), &Vector3::from(initial_normal))?;
    let mut out = Vec::with_capacity(tangents.len());
    for (i, t) in tangents.iter().enumerate() {
        if i > 0 {
            let t = Vector3::from(*t);
            let norm = t.norm();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(ancf14_core::Error::InvalidInput(format!("tangent {i} is degenerate")));
            }
            frame = bishop_step(&frame, &(t / norm), (i - 1) as f64, i as f64)?.0;
        }
        let m = frame.matrix();
        out.push(std::array::from_fn(|r| std::array::from_fn(|c| m[(r, c)])));
    }
    Ok(out)
}

/// Run a preset name or a JSON config text; returns the summary JSON text.
#[pyfunction]
#[pyo3(signature = (config, out_dir=None))]
fn run(py: Python<'_>, config: &str, out_dir: Option<PathBuf>) -> PyResult<String> {
    py.detach(|| run_config(config, out_dir)).map_err(to_py)
}

/// Names of the preset benchmarks.
#[pyfunction]
fn presets() -> Vec<&'static str> {
    BenchmarkName::PRESETS.iter().map(|n| n.as_str()).collect()
}

/// Consistent 14x14 element mass matrix of a rectangular beam element.
#[pyfunction]
fn mass_matrix(
    youngs_modulus: f64,
    poisson_ratio: f64,
    density: f64,
    width: f64,
    height: f64,
    length: f64,
) -> PyResult<Vec<Vec<f64>>> {
    let spec = BeamSpec::new(youngs_modulus, poisson_ratio, density, CrossSection::rectangle(width, height), length);
    spec.validate().map_err(core_err)?;
    let m = ancf14_core::element::mass_matrix(&spec);
    Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
}

/// Bishop frames along `tangents`, the first director chosen closest to `initial_normal`.
#[pyfunction]
fn bishop_frames(tangents: Vec<[f64; 3]>, initial_normal: [f64; 3]) -> PyResult<Vec<[[f64; 3]; 3]>> {
    transport(&tangents, initial_normal).map_err(core_err)
}

#[pymodule]
fn ancf14(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(mass_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(bishop_frames, m)?)?;
    Ok(())
}
