//! Helical spring pulled along its axis: linear stiffness and mesh convergence.

use ancf14_core::assembly::assemble_internal;
use ancf14_core::solver::static_solve;
use ancf14_core::{Attachment, BeamSpec, CrossSection, Driver, Joint, Model, Node, ReferenceShape};
use nalgebra::Vector3;

use crate::common::{log_log_slope, settings};
use crate::config::{BenchmarkConfig, Overrides};
use crate::error::Result;
use crate::report::{Check, Outcome};
use crate::series::ResultSeries;

pub const SHEAR_MODULUS: f64 = 80e9;
pub const POISSON: f64 = 0.3;
pub const WIRE_DIAMETER: f64 = 2e-3;
pub const COIL_DIAMETER: f64 = 40e-3;
pub const ACTIVE_COILS: f64 = 1.5;
pub const REPORTED_STIFFNESS_N_PER_MM: f64 = 1.674;
pub const CONVERGENCE_MESHES: [usize; 4] = [10, 15, 20, 25];

/// `G d^4 / (8 N_a D^3)` in N/mm.
pub fn theoretical_stiffness_n_per_mm() -> f64 {
    SHEAR_MODULUS * WIRE_DIAMETER.powi(4) / (8.0 * ACTIVE_COILS * COIL_DIAMETER.powi(3)) * 1e-3
}

fn amplitude(x: f64) -> f64 {
    if x < 0.15 {
        0.5 * (1.0 + (50.0 * x - 3.0).tanh())
    } else if x <= 0.35 {
        1.0
    } else {
        0.5 * (1.0 + (22.0 - 50.0 * x).tanh())
    }
}

fn amplitude_prime(x: f64) -> f64 {
    let sech2 = |u: f64| 1.0 / u.cosh().powi(2);
    if x < 0.15 {
        25.0 * sech2(50.0 * x - 3.0)
    } else if x <= 0.35 {
        0.0
    } else {
        -25.0 * sech2(22.0 - 50.0 * x)
    }
}

/// Centre-line `r(x)`, `x` in `[0, 0.5]`.
pub fn centerline(x: f64) -> Vector3<f64> {
    let (a, w) = (amplitude(x), 8.0 * std::f64::consts::PI * x);
    Vector3::new(0.05 * x, 0.02 * a * w.cos(), 0.02 * a * w.sin())
}

pub fn centerline_prime(x: f64) -> Vector3<f64> {
    let (a, da, k) = (amplitude(x), amplitude_prime(x), 8.0 * std::f64::consts::PI);
    let w = k * x;
    Vector3::new(0.05, 0.02 * (da * w.cos() - a * k * w.sin()), 0.02 * (da * w.sin() + a * k * w.cos()))
}

pub fn wire_spec() -> BeamSpec {
    let e = 2.0 * SHEAR_MODULUS * (1.0 + POISSON);
    BeamSpec::new(e, POISSON, 7850.0, CrossSection::circle(0.5 * WIRE_DIAMETER), 1.0)
}

/// Spring with `n` elements: spherical joint at A, B pulled along +X by
/// `u_max * s`, B held laterally, spin about the axis locked by the twist at A.
pub fn spring_model(n: usize, u_max: f64, analytic_slopes: bool) -> Result<(Model, usize, usize)> {
    let xs: Vec<f64> = (0..=n).map(|i| 0.5 * i as f64 / n as f64).collect();
    let pts: Vec<Vector3<f64>> = xs.iter().map(|&x| centerline(x)).collect();
    let chord = |i: usize| (pts[i + 1] - pts[i]).normalize();
    let mut model = Model::new();
    let ids: Vec<usize> = (0..=n)
        .map(|i| {
            let slope = if analytic_slopes {
                centerline_prime(xs[i]).normalize()
            } else if i == 0 {
                chord(0)
            } else if i == n {
                chord(n - 1)
            } else {
                (chord(i - 1) + chord(i)).normalize()
            };
            model.add_node(Node::new(pts[i], slope, 0.0))
        })
        .collect();
    model.add_beam(&ids, &wire_spec(), None, ReferenceShape::Initial)?;
    let (a, b) = (ids[0], ids[n]);
    model.add_joint(Joint::Spherical { a: Attachment::Ground, offset_a: pts[0], b: Attachment::Node(a), offset_b: Vector3::zeros() })?;
    model.add_joint(Joint::Twist { node: a, driver: Driver::Constant { value: 0.0 } })?;
    let pb = pts[n];
    for (axis, driver) in [
        (Vector3::x(), Driver::Linear { start: pb.x, rate: u_max }),
        (Vector3::y(), Driver::Constant { value: pb.y }),
        (Vector3::z(), Driver::Constant { value: pb.z }),
    ] {
        model.add_joint(Joint::Prescribed { point: Attachment::Node(b), offset: Vector3::zeros(), direction: axis, driver })?;
    }
    Ok((model, a, b))
}

/// Force-displacement points `(u, F)` at B, starting at the origin.
pub fn pull(cfg: &BenchmarkConfig, n: usize, u_max: f64, steps: usize, tol: f64, analytic_slopes: bool) -> Result<Vec<(f64, f64)>> {
    let (model, _, b) = spring_model(n, u_max, analytic_slopes)?;
    let mut s = settings(cfg, tol, steps, 1e-3);
    s.load_steps = steps;
    let s0 = model.initial_state()?;
    let sol = static_solve(&model, &s0, &s)?;
    let dof = model.node_dof(b);
    let mut out = vec![(0.0, 0.0)];
    for st in &sol.states {
        let f = assemble_internal(&model, st, s.mode)?;
        out.push((st.q[dof] - s0.q[dof], f[dof]));
    }
    Ok(out)
}

/// Least-squares stiffness through the origin over `0 < u <= window`.
pub fn fit_stiffness(points: &[(f64, f64)], window: f64) -> f64 {
    let sel = points.iter().filter(|(u, _)| *u > 0.0 && *u <= window * (1.0 + 1e-9));
    let (num, den) = sel.fold((0.0, 0.0), |(n, d), (u, f)| (n + u * f, d + u * u));
    num / den
}

pub fn run_spring(cfg: &BenchmarkConfig) -> Result<Outcome> {
    let mut ov = Overrides::new(&cfg.overrides);
    let n = cfg.n_elements.unwrap_or(20);
    let u_max = ov.get("max_displacement_m", 0.02);
    let window = ov.get("fit_window_m", 0.005);
    let tol = ov.get("newton_tol", 1e-12);
    let analytic = ov.get("analytic_slopes", 0.0) != 0.0;
    ov.finish()?;
    let steps = cfg.load_steps.unwrap_or(((u_max / 5e-4).round() as usize).max(1));
    let increment = u_max / steps as f64;

    let points = pull(cfg, n, u_max, steps, tol, analytic)?;
    let mut fd = ResultSeries::new("spring_force_displacement", &["u_x_m", "force_x_n"]);
    for &(u, f) in &points {
        fd.push(vec![u, f])?;
    }
    let k = fit_stiffness(&points, window) * 1e-3;

    let k_th = theoretical_stiffness_n_per_mm();
    let mut conv = ResultSeries::new("spring_convergence", &["n_elements", "stiffness_n_per_mm", "relative_error"]);
    let mut ks = Vec::new();
    for &m in &CONVERGENCE_MESHES {
        let km = if m == n && steps as f64 * increment >= window {
            k
        } else {
            let w_steps = ((window / increment).round() as usize).max(1);
            fit_stiffness(&pull(cfg, m, w_steps as f64 * increment, w_steps, tol, analytic)?, window) * 1e-3
        };
        // Relative error of the tip displacement under a fixed force.
        let err = (k_th / km - 1.0).abs();
        conv.push(vec![m as f64, km, err])?;
        ks.push(km);
    }
    let errs = conv.column("relative_error").unwrap_or_default();
    let ns: Vec<f64> = CONVERGENCE_MESHES.iter().map(|&m| m as f64).collect();
    let slope = -log_log_slope(&ns, &errs);
    let k20 = ks[2];
    let k25 = ks[3];

    let checks = vec![
        Check::relative("spring.k_reported", &format!("stiffness with {n} elements within 1% of 1.674 N/mm"), k, REPORTED_STIFFNESS_N_PER_MM, 0.01),
        Check::relative("spring.k_theory", &format!("stiffness with {n} elements within 1.5% of G d^4 / (8 N_a D^3)"), k, k_th, 0.015),
        Check::within("spring.convergence_slope", "log-log error slope over N = 10, 15, 20, 25", slope, Some(3.0), Some(4.5)),
        Check::below("spring.mesh_independence", "relative stiffness change from N = 20 to N = 25", ((k25 - k20) / k20).abs(), 0.005),
    ];
    Ok(Outcome { series: vec![fd, conv], checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theory_value() {
        assert!((theoretical_stiffness_n_per_mm() - 1.6667).abs() < 1e-4);
    }

    #[test]
    fn centerline_derivative_matches_differences() {
        for x in [0.01, 0.1, 0.149, 0.2, 0.36, 0.49] {
            let h = 1e-6;
            let fd = (centerline(x + h) - centerline(x - h)) / (2.0 * h);
            assert!((fd - centerline_prime(x)).amax() < 1e-6 * fd.norm());
        }
    }

    #[test]
    fn geometry_is_continuous_and_blended() {
        assert!(amplitude(0.0) < 0.01 && (amplitude(0.25) - 1.0).abs() < 1e-15 && amplitude(0.5) < 0.01);
        for x in [0.15, 0.35] {
            assert!((amplitude(x - 1e-9) - amplitude(x + 1e-9)).abs() < 1e-3);
        }
    }

    #[test]
    fn stiffness_fit_recovers_slope() {
        let pts: Vec<(f64, f64)> = (0..=20).map(|i| (i as f64 * 1e-3, 1500.0 * i as f64 * 1e-3)).collect();
        assert!((fit_stiffness(&pts, 5e-3) - 1500.0).abs() < 1e-9);
    }

    #[test]
    fn model_is_consistent() {
        let (m, _, _) = spring_model(10, 0.01, false).unwrap();
        assert_eq!(m.n_constraints(), 3 + 1 + 3);
        let s = m.initial_state().unwrap();
        let (g, _) = ancf14_core::assembly::constraint_eval(&m, &s, false).unwrap();
        assert!(g.amax() < 1e-14);
        let f = assemble_internal(&m, &s, ancf14_core::DeformationMode::Large).unwrap();
        assert!(f.amax() < 1e-6);
    }
}
