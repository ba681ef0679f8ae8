//! Lateral torsional buckling of a cantilever pushed at its tip by a crank and link.

use ancf14_core::joint::AngleDriver;
use ancf14_core::solver::Integrator;
use ancf14_core::{Attachment, BeamSpec, CrossSection, Driver, FrameTriad, Joint, Model, ReferenceShape, SystemState};
use nalgebra::Vector3;

use crate::common::{first_crossing, position, settings, straight_nodes, theta};
use crate::config::{BenchmarkConfig, Overrides};
use crate::error::Result;
use crate::report::{Check, Outcome};
use crate::series::ResultSeries;

pub const YOUNGS_MODULUS: f64 = 73e9;
pub const POISSON: f64 = 0.3;
pub const DENSITY: f64 = 2680.0;
pub const BEAM_LENGTH: f64 = 1.0;
/// Beam section: thin along Y, deep along Z.
pub const BEAM_WIDTH: f64 = 0.001;
pub const BEAM_HEIGHT: f64 = 0.01;
pub const BEAM_TORSION_CONSTANT: f64 = 3.12e-12;
pub const LINK_RADIUS: f64 = 0.012;
pub const LINK_LENGTH: f64 = 0.25;
pub const CRANK_RADIUS: f64 = 0.024;
pub const CRANK_LENGTH: f64 = 0.05;
pub const OFFSET: f64 = 1e-4;
pub const CRANK_PERIOD: f64 = 0.4;
pub const REPORTED_ONSET_S: f64 = 0.12;
pub const ONSET_THRESHOLD_M: f64 = 5e-3;

/// Model and the node probed at midspan.
pub struct BucklingModel {
    pub model: Model,
    pub midspan: usize,
}

fn circle_spec(radius: f64) -> BeamSpec {
    BeamSpec::new(YOUNGS_MODULUS, POISSON, DENSITY, CrossSection::circle(radius), 1.0)
}

/// Beam along X clamped at A, link hanging from an offset point at B down to the crank at D,
/// crank driven about Y at E. `lock_twist` fixes the twist of every free beam node.
pub fn buckling_model(n: usize, lock_twist: bool) -> Result<BucklingModel> {
    let mut model = Model::new();
    let down = -Vector3::z();
    let beam_section = CrossSection::rectangle(BEAM_WIDTH, BEAM_HEIGHT).with_torsion_constant(BEAM_TORSION_CONSTANT);
    let beam_spec = BeamSpec::new(YOUNGS_MODULUS, POISSON, DENSITY, beam_section, BEAM_LENGTH);
    let beam = straight_nodes(&mut model, Vector3::zeros(), Vector3::new(BEAM_LENGTH, 0.0, 0.0), n, 0.0);
    model.add_beam(&beam, &beam_spec, Some(FrameTriad::from_tangent_and_hint(&Vector3::x(), &Vector3::y())?), ReferenceShape::Straight)?;

    let top = Vector3::new(BEAM_LENGTH, OFFSET, 0.0);
    let d = top + down * LINK_LENGTH;
    let e = d - down * CRANK_LENGTH;
    let vertical = FrameTriad::from_tangent_and_hint(&down, &Vector3::y())?;
    let link = straight_nodes(&mut model, top, d, 2, 0.0);
    model.add_beam(&link, &circle_spec(LINK_RADIUS), Some(vertical), ReferenceShape::Straight)?;
    let crank = straight_nodes(&mut model, e, d, 1, 0.0);
    model.add_beam(&crank, &circle_spec(CRANK_RADIUS), Some(vertical), ReferenceShape::Straight)?;

    model.add_joint(Joint::clamp_at(&model, beam[0])?)?;
    model.add_joint(Joint::Spherical {
        a: Attachment::Node(beam[n]),
        offset_a: Vector3::new(0.0, OFFSET, 0.0),
        b: Attachment::Node(link[0]),
        offset_b: Vector3::zeros(),
    })?;
    model.add_joint(Joint::Revolute {
        a: Attachment::Node(crank[1]),
        offset_a: Vector3::zeros(),
        axis_a: Vector3::y(),
        b: Attachment::Node(link[2]),
        offset_b: Vector3::zeros(),
        axis_b: Vector3::y(),
        driver: None,
    })?;
    model.add_joint(Joint::Revolute {
        a: Attachment::Ground,
        offset_a: e,
        axis_a: Vector3::y(),
        b: Attachment::Node(crank[0]),
        offset_b: Vector3::zeros(),
        axis_b: Vector3::y(),
        driver: Some(AngleDriver {
            reference_a: down,
            reference_b: Vector3::x(),
            angle: Driver::CrankHalfTurn { period: CRANK_PERIOD },
        }),
    })?;
    if lock_twist {
        for &node in &beam[1..] {
            model.add_joint(Joint::Twist { node, driver: Driver::Constant { value: 0.0 } })?;
        }
    }
    Ok(BucklingModel { model, midspan: beam[n / 2] })
}

/// Integrates to `end` and records the midspan response.
pub fn simulate(cfg: &BenchmarkConfig, bm: &BucklingModel, end: f64, tol: f64, name: &str) -> Result<ResultSeries> {
    let model = &bm.model;
    let s = settings(cfg, tol, 1, 1e-3);
    let s0 = model.initial_state()?;
    let mut integ = Integrator::new(model, &s0, &s)?;
    let steps = (end / s.dt).round() as usize;
    let mut out = ResultSeries::new(name, &["t_s", "u_y_m", "u_z_m", "theta_rad"]);
    let mut record = |st: &SystemState| {
        let u = position(model, &st.q, bm.midspan) - position(model, &s0.q, bm.midspan);
        out.push(vec![st.time, u.y, u.z, theta(model, &st.q, bm.midspan)])
    };
    record(integ.state())?;
    for _ in 0..steps {
        integ.step()?;
        record(integ.state())?;
    }
    Ok(out)
}

fn max_abs_before(t: &[f64], v: &[f64], limit: f64) -> f64 {
    t.iter().zip(v).filter(|(t, _)| **t < limit).map(|(_, v)| v.abs()).fold(0.0, f64::max)
}

pub fn run_buckling(cfg: &BenchmarkConfig) -> Result<Outcome> {
    let mut ov = Overrides::new(&cfg.overrides);
    let end = ov.get("end_time_s", 0.5);
    let tol = ov.get("newton_tol", 1e-12);
    ov.finish()?;
    let n = cfg.n_elements.unwrap_or(10);

    let mut series = Vec::new();
    let mut checks = Vec::new();
    if !cfg.no_torsion {
        let out = simulate(cfg, &buckling_model(n, false)?, end, tol, "buckling_midspan")?;
        let t = out.column("t_s").unwrap_or_default();
        let uy = out.column("u_y_m").unwrap_or_default();
        let th = out.column("theta_rad").unwrap_or_default();
        let onset = first_crossing(&t, &uy, ONSET_THRESHOLD_M).unwrap_or(f64::NAN);
        checks.push(Check::below("buckling.pre_lateral", "max |u_Y| at midspan for t < 0.1 s (m)", max_abs_before(&t, &uy, 0.1), 1e-3));
        checks.push(Check::below("buckling.pre_twist", "max |theta| at midspan for t < 0.1 s (rad)", max_abs_before(&t, &th, 0.1), 1e-2));
        checks.push(Check::within(
            "buckling.onset",
            "first time |u_Y| at midspan exceeds 5 mm (s)",
            onset,
            Some(REPORTED_ONSET_S - 0.03),
            Some(REPORTED_ONSET_S + 0.03),
        ));
        series.push(out);
    }
    let locked = simulate(cfg, &buckling_model(n, true)?, end, tol, "buckling_no_torsion")?;
    let t = locked.column("t_s").unwrap_or_default();
    let uy = locked.column("u_y_m").unwrap_or_default();
    checks.push(Check::below(
        "buckling.no_torsion",
        "max |u_Y| at midspan with twist locked, whole run (m)",
        max_abs_before(&t, &uy, f64::INFINITY),
        1e-6,
    ));
    series.push(locked);
    Ok(Outcome { series, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_configuration_is_consistent() {
        for lock in [false, true] {
            let bm = buckling_model(4, lock).unwrap();
            let s = bm.model.initial_state().unwrap();
            let (g, _) = ancf14_core::assembly::constraint_eval(&bm.model, &s, false).unwrap();
            assert!(g.amax() < 1e-14, "{:e}", g.amax());
        }
    }

    #[test]
    fn section_constants() {
        let s = CrossSection::rectangle(BEAM_WIDTH, BEAM_HEIGHT);
        assert!((s.j_t - BEAM_TORSION_CONSTANT).abs() < 0.01e-12);
        let crank = CrossSection::circle(CRANK_RADIUS);
        assert!((crank.j_t - 5.21e-7).abs() < 0.01e-7);
    }
}
