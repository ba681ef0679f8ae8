use ancf14_core::{Model, Node, SolverSettings};
use nalgebra::{DVector, Vector3};

use crate::config::BenchmarkConfig;

pub(crate) fn settings(cfg: &BenchmarkConfig, newton_tol: f64, load_steps: usize, dt: f64) -> SolverSettings {
    SolverSettings {
        newton_tol,
        load_steps: cfg.load_steps.unwrap_or(load_steps),
        dt: cfg.dt_s.unwrap_or(dt),
        mode: cfg.deformation_mode,
        reuse_jacobian: true,
        ..Default::default()
    }
}

/// `n + 1` equally spaced nodes on a straight line, slopes along the line.
pub(crate) fn straight_nodes(model: &mut Model, start: Vector3<f64>, end: Vector3<f64>, n: usize, theta: f64) -> Vec<usize> {
    let dir = (end - start).normalize();
    (0..=n)
        .map(|i| model.add_node(Node::new(start + (end - start) * (i as f64 / n as f64), dir, theta)))
        .collect()
}

pub(crate) fn position(model: &Model, q: &DVector<f64>, node: usize) -> Vector3<f64> {
    q.fixed_rows::<3>(model.node_dof(node)).into_owned()
}

pub(crate) fn theta(model: &Model, q: &DVector<f64>, node: usize) -> f64 {
    q[model.node_dof(node) + 6]
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// First time at which `|value|` exceeds `threshold`.
pub(crate) fn first_crossing(t: &[f64], value: &[f64], threshold: f64) -> Option<f64> {
    t.iter().zip(value).find(|(_, v)| v.abs() > threshold).map(|(t, _)| *t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [10.0, 15.0, 20.0, 25.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-3.7)).collect();
        assert!((log_log_slope(&x, &y) + 3.7).abs() < 1e-12);
    }

    #[test]
    fn crossing_is_first_exceedance() {
        let t = [0.0, 0.1, 0.2, 0.3];
        assert_eq!(first_crossing(&t, &[0.0, -2.0, 3.0, 0.0], 1.5), Some(0.1));
        assert_eq!(first_crossing(&t, &[0.0; 4], 1.5), None);
    }
}
