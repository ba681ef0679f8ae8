//! Spinning shaft with an offset disk, spun up through its first critical speed.

use ancf14_core::assembly::weld_disk;
use ancf14_core::joint::AngleDriver;
use ancf14_core::solver::{modal_analysis, static_solve, Integrator};
use ancf14_core::{Attachment, BeamSpec, CrossSection, Driver, FrameTriad, Joint, Model, ReferenceShape, RigidBody, SystemState};
use nalgebra::{Matrix3, Vector3};

use crate::common::{first_crossing, position, settings, straight_nodes, theta};
use crate::config::{BenchmarkConfig, Overrides};
use crate::error::{BenchError, Result};
use crate::report::{Check, Outcome};
use crate::series::ResultSeries;

pub const YOUNGS_MODULUS: f64 = 210e9;
pub const POISSON: f64 = 0.3;
pub const DENSITY: f64 = 7800.0;
pub const LENGTH: f64 = 6.0;
pub const OUTER_RADIUS: f64 = 0.05;
pub const INNER_RADIUS: f64 = 0.045;
pub const DISK_MASS: f64 = 70.573;
/// Principal disk inertia, spin axis first.
pub const DISK_INERTIA: [f64; 3] = [2.0325, 1.0163, 1.0163];
pub const DISK_OFFSET: f64 = 0.05;
pub const GRAVITY: f64 = 9.81;
pub const OMEGA: f64 = 60.0;
pub const REPORTED_FREQUENCY: f64 = 56.7;
pub const REPORTED_ONSET_S: f64 = 1.1;

pub fn shaft_spec() -> BeamSpec {
    BeamSpec::new(YOUNGS_MODULUS, POISSON, DENSITY, CrossSection::tube(OUTER_RADIUS, INNER_RADIUS), LENGTH)
}

/// Shaft along X on a driven revolute at A and a cylindrical joint at B, disk welded at midspan.
/// Returns the model and the midspan node.
pub fn shaft_model(n: usize, drive: Driver) -> Result<(Model, usize)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(BenchError::Config(format!("shaft needs an even number of elements, got {n}")));
    }
    let mut model = Model::new();
    let ids = straight_nodes(&mut model, Vector3::zeros(), Vector3::new(LENGTH, 0.0, 0.0), n, 0.0);
    let director = FrameTriad::from_tangent_and_hint(&Vector3::x(), &Vector3::y())?;
    model.add_beam(&ids, &shaft_spec(), Some(director), ReferenceShape::Straight)?;
    let mid = ids[n / 2];
    let inertia = Matrix3::from_diagonal(&Vector3::from(DISK_INERTIA));
    let disk = model.add_body(RigidBody::new(DISK_MASS, inertia))?;
    weld_disk(&mut model, mid, Vector3::new(0.0, 0.0, DISK_OFFSET), disk)?;
    model.add_joint(Joint::Revolute {
        a: Attachment::Ground,
        offset_a: Vector3::zeros(),
        axis_a: Vector3::x(),
        b: Attachment::Node(ids[0]),
        offset_b: Vector3::zeros(),
        axis_b: Vector3::x(),
        driver: Some(AngleDriver { reference_a: Vector3::y(), reference_b: Vector3::y(), angle: drive }),
    })?;
    model.add_joint(Joint::Cylindrical {
        a: Attachment::Ground,
        offset_a: Vector3::new(LENGTH, 0.0, 0.0),
        axis_a: Vector3::x(),
        b: Attachment::Node(ids[n]),
        offset_b: Vector3::zeros(),
        axis_b: Vector3::x(),
    })?;
    model.gravity = Vector3::new(0.0, 0.0, -GRAVITY);
    Ok((model, mid))
}

/// Midspan sag of a clamped-clamped beam with its own weight and a central point mass.
pub fn clamped_sag() -> f64 {
    let s = shaft_spec();
    let ei = s.e * s.i_y;
    let w = s.rho * s.area * GRAVITY;
    DISK_MASS * GRAVITY * LENGTH.powi(3) / (192.0 * ei) + w * LENGTH.powi(4) / (384.0 * ei)
}

/// Static equilibrium under gravity with the shaft at rest.
pub fn equilibrium(cfg: &BenchmarkConfig, model: &Model, tol: f64) -> Result<SystemState> {
    let sol = static_solve(model, &model.initial_state()?, &settings(cfg, tol, 4, 1e-3))?;
    let mut s = sol.states.last().expect("at least one load step").clone();
    s.time = 0.0;
    Ok(s)
}

pub fn run_shaft(cfg: &BenchmarkConfig) -> Result<Outcome> {
    let mut ov = Overrides::new(&cfg.overrides);
    let end = ov.get("end_time_s", 2.5);
    let omega = ov.get("omega_rad_s", OMEGA);
    let tol = ov.get("newton_tol", 1e-11);
    ov.finish()?;
    let n = cfg.n_elements.unwrap_or(6);

    let (rest, mid) = shaft_model(n, Driver::Constant { value: 0.0 })?;
    let s0 = equilibrium(cfg, &rest, tol)?;
    let x0 = rest.initial_state()?.q;
    let sag = -(position(&rest, &s0.q, mid) - position(&rest, &x0, mid)).z;
    let modal = modal_analysis(&rest, &s0, &settings(cfg, tol, 1, 1e-3))?;
    let first = modal.frequencies.first().copied().unwrap_or(f64::NAN);

    let (spin, _) = shaft_model(n, Driver::ShaftSpinUp { omega })?;
    let s = settings(cfg, tol, 1, 1e-3);
    let mut integ = Integrator::new(&spin, &s0, &s)?;
    let steps = (end / s.dt).round() as usize;
    let node_a = spin.beams[0].nodes[0];
    let mut out = ResultSeries::new("shaft_midspan", &["t_s", "u_y_m", "u_z_m", "twist_a_minus_c_rad"]);
    let mut record = |st: &SystemState| {
        let u = position(&spin, &st.q, mid) - position(&spin, &x0, mid);
        out.push(vec![st.time, u.y, u.z, theta(&spin, &st.q, node_a) - theta(&spin, &st.q, mid)])
    };
    record(integ.state())?;
    for _ in 0..steps {
        integ.step()?;
        record(integ.state())?;
    }

    let t = out.column("t_s").unwrap_or_default();
    let (uy, uz) = (out.column("u_y_m").unwrap_or_default(), out.column("u_z_m").unwrap_or_default());
    let amplitude: Vec<f64> = uy.iter().zip(&uz).map(|(y, z)| y.hypot(*z)).collect();
    let onset = first_crossing(&t, &amplitude, 3.0 * sag).unwrap_or(f64::NAN);
    let checks = vec![
        Check::relative("shaft.first_frequency", "first bending frequency at rest within 2% of 56.7 rad/s", first, REPORTED_FREQUENCY, 0.02),
        Check::relative(
            "shaft.static_sag",
            "midspan sag under gravity within 5% of the clamped-clamped closed form",
            sag,
            clamped_sag(),
            0.05,
        ),
        Check::within(
            "shaft.onset",
            "first time the midspan displacement exceeds 3x the static sag (s)",
            onset,
            Some(REPORTED_ONSET_S - 0.15),
            Some(REPORTED_ONSET_S + 0.15),
        ),
    ];
    Ok(Outcome { series: vec![out], checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_meshes_are_rejected() {
        assert!(shaft_model(5, Driver::Constant { value: 0.0 }).is_err());
    }

    #[test]
    fn sag_oracle_value() {
        assert!((clamped_sag() - 3.28e-3).abs() < 0.02e-3, "{}", clamped_sag());
    }

    #[test]
    fn rest_model_is_consistent() {
        let (m, mid) = shaft_model(4, Driver::Constant { value: 0.0 }).unwrap();
        let s = m.initial_state().unwrap();
        let (g, _) = ancf14_core::assembly::constraint_eval(&m, &s, false).unwrap();
        assert!(g.amax() < 1e-14);
        let (p, _) = m.body_pose(0, &s.q);
        assert!((p - Vector3::new(3.0, 0.0, DISK_OFFSET)).amax() < 1e-14);
        assert_eq!(mid, 2);
    }
}
