//! Cantilever with a rotated rectangular section under a vertical tip load.

use ancf14_core::solver::static_solve;
use ancf14_core::{BeamSpec, CrossSection, FrameTriad, Joint, Model, NodalLoad, ReferenceShape};
use nalgebra::Vector3;

use crate::common::{position, settings, straight_nodes, theta};
use crate::config::{BenchmarkConfig, Overrides};
use crate::error::Result;
use crate::report::{Check, Outcome};
use crate::series::ResultSeries;

pub const YOUNGS_MODULUS: f64 = 71.7e9;
pub const POISSON: f64 = 0.31;
pub const DENSITY: f64 = 2700.0;
pub const LENGTH: f64 = 0.508;
/// Section depth along the section `y` axis.
pub const DEPTH: f64 = 12.377e-3;
/// Section thickness along the section `z` axis.
pub const THICKNESS: f64 = 3.2024e-3;
pub const TORSION_CONSTANT: f64 = 113.3872e-12;
pub const LOADS_N: [f64; 3] = [4.448, 8.896, 13.345];
pub const ANGLES_DEG: [f64; 7] = [0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 90.0];

/// Tip response in the section axes at the root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipResponse {
    pub u_y: f64,
    pub u_z: f64,
    pub twist: f64,
}

pub fn beam_spec() -> BeamSpec {
    let section = CrossSection::rectangle(DEPTH, THICKNESS).with_torsion_constant(TORSION_CONSTANT);
    BeamSpec::new(YOUNGS_MODULUS, POISSON, DENSITY, section, LENGTH)
}

/// Cantilever along X with the section rotated by `phi` about X, loaded by `(0, 0, -p)` at the tip.
pub fn princeton_model(n: usize, phi: f64, p: f64) -> Result<(Model, usize)> {
    let mut model = Model::new();
    let ids = straight_nodes(&mut model, Vector3::zeros(), Vector3::new(LENGTH, 0.0, 0.0), n, phi);
    let director = FrameTriad::from_tangent_and_hint(&Vector3::x(), &Vector3::y())?;
    model.add_beam(&ids, &beam_spec(), Some(director), ReferenceShape::Straight)?;
    model.add_joint(Joint::clamp_at(&model, ids[0])?)?;
    let tip = ids[n];
    model.add_load(NodalLoad { node: tip, force: Vector3::new(0.0, 0.0, -p), torque: 0.0 })?;
    Ok((model, tip))
}

pub fn solve_case(cfg: &BenchmarkConfig, n: usize, phi: f64, p: f64, tol: f64) -> Result<TipResponse> {
    let (model, tip) = princeton_model(n, phi, p)?;
    let s0 = model.initial_state()?;
    let sol = static_solve(&model, &s0, &settings(cfg, tol, 10, 1e-3))?;
    let q = &sol.states.last().expect("at least one load step").q;
    let du = position(&model, q, tip) - position(&model, &s0.q, tip);
    let (y, z) = (Vector3::new(0.0, phi.cos(), phi.sin()), Vector3::new(0.0, -phi.sin(), phi.cos()));
    Ok(TipResponse { u_y: du.dot(&y), u_z: du.dot(&z), twist: theta(&model, q, tip) - phi })
}

/// Small-deflection tip deflection for bending about the strong axis.
pub fn strong_axis_deflection(p: f64) -> f64 {
    p * LENGTH.powi(3) / (3.0 * YOUNGS_MODULUS * THICKNESS * DEPTH.powi(3) / 12.0)
}

/// Interior values share a sign, the largest magnitude is interior, and the ends are below `zero`.
fn single_signed_with_interior_max(v: &[f64], zero: f64) -> bool {
    let Some((&first, rest)) = v.split_first() else { return false };
    let Some((&last, interior)) = rest.split_last() else { return false };
    if interior.is_empty() || first.abs() >= zero || last.abs() >= zero {
        return false;
    }
    let sign = interior[0].signum();
    interior.iter().all(|x| x.signum() == sign && x.abs() >= zero)
}

pub fn run_princeton(cfg: &BenchmarkConfig) -> Result<Outcome> {
    let mut ov = Overrides::new(&cfg.overrides);
    let tol = ov.get("newton_tol", 1e-12);
    ov.finish()?;
    let n = cfg.n_elements.unwrap_or(8);

    let mut series = Vec::new();
    let mut failures = 0usize;
    let mut twist_at_zero: f64 = 0.0;
    let mut strong_deflection = f64::NAN;
    let mut twist_curve = Vec::new();
    for (k, &p) in LOADS_N.iter().enumerate() {
        let mut s = ResultSeries::new(&format!("princeton_p{}", k + 1), &["phi_deg", "u_y_m", "u_z_m", "twist_rad"]);
        for &deg in &ANGLES_DEG {
            let row = match solve_case(cfg, n, deg.to_radians(), p, tol) {
                Ok(r) => {
                    if deg == 0.0 {
                        twist_at_zero = twist_at_zero.max(r.twist.abs());
                    }
                    if deg == 90.0 && k == 0 {
                        strong_deflection = r.u_y.abs();
                    }
                    if k == 2 {
                        twist_curve.push(r.twist);
                    }
                    vec![deg, r.u_y, r.u_z, r.twist]
                }
                Err(_) => {
                    failures += 1;
                    vec![deg, f64::NAN, f64::NAN, f64::NAN]
                }
            };
            s.push(row)?;
        }
        series.push(s);
    }

    let oracle = strong_axis_deflection(LOADS_N[0]);
    let cases = LOADS_N.len() * ANGLES_DEG.len();
    let checks = vec![
        Check::below("princeton.twist_at_zero", "largest tip twist at phi = 0 over all loads (rad)", twist_at_zero, 1e-4),
        Check::relative(
            "princeton.strong_axis",
            "tip deflection at phi = 90, P1 within 5% of P L^3 / (3 E I_strong)",
            strong_deflection,
            oracle,
            0.05,
        ),
        Check::within(
            "princeton.all_converged",
            &format!("converged cases out of {cases}"),
            (cases - failures) as f64,
            Some(cases as f64),
            None,
        ),
        Check::flag(
            "princeton.twist_shape",
            "P3 twist is single-signed between 0 and 90 deg with zero ends",
            twist_curve.len() == ANGLES_DEG.len() && single_signed_with_interior_max(&twist_curve, 1e-4),
        ),
    ];
    Ok(Outcome { series, checks })
}
