//! User-described models from the JSON config.

use ancf14_core::assembly::{constraint_eval, weld_disk};
use ancf14_core::solver::{modal_analysis, static_solve, Integrator};
use ancf14_core::{BeamSpec, CrossSection, FrameTriad, Model, NodalLoad, Node, ReferenceShape, RigidBody, SystemState};
use nalgebra::{Matrix3, Vector3};

use crate::common::settings;
use crate::config::{AnalysisInput, BenchmarkConfig, CustomModel, Overrides, SectionInput};
use crate::error::{BenchError, Result};
use crate::report::{Check, Outcome};
use crate::series::ResultSeries;

fn section(input: &SectionInput) -> CrossSection {
    match *input {
        SectionInput::Rectangle { width_m, height_m } => CrossSection::rectangle(width_m, height_m),
        SectionInput::Tube { outer_radius_m, inner_radius_m } => CrossSection::tube(outer_radius_m, inner_radius_m),
    }
}

pub fn build_model(input: &CustomModel) -> Result<Model> {
    let mut model = Model::new();
    for n in &input.nodes {
        model.add_node(Node::new(Vector3::from(n.position_m), Vector3::from(n.slope), n.theta_rad));
    }
    for b in &input.beams {
        let mut sec = section(&b.section);
        if let Some(j) = b.torsion_constant_m4 {
            sec = sec.with_torsion_constant(j);
        }
        let spec = BeamSpec::new(b.material.youngs_modulus_pa, b.material.poisson_ratio, b.material.density_kg_m3, sec, 1.0);
        let first = b.nodes.first().and_then(|&i| input.nodes.get(i)).ok_or_else(|| BenchError::Config("beam without valid nodes".into()))?;
        let director = b.section_y.map(|y| FrameTriad::from_tangent_and_hint(&Vector3::from(first.slope), &Vector3::from(y))).transpose()?;
        let shape = if b.stress_free_initial { ReferenceShape::Initial } else { ReferenceShape::Straight };
        model.add_beam(&b.nodes, &spec, director, shape)?;
    }
    for body in &input.bodies {
        let mut rb = RigidBody::new(body.mass_kg, Matrix3::from_diagonal(&Vector3::from(body.inertia_kg_m2)));
        rb.position = Vector3::from(body.position_m);
        let id = model.add_body(rb)?;
        if let Some(w) = body.weld {
            weld_disk(&mut model, w.node, Vector3::from(w.offset_m), id)?;
        }
    }
    for j in &input.joints {
        model.add_joint(j.clone())?;
    }
    for l in &input.loads {
        model.add_load(NodalLoad { node: l.node, force: Vector3::from(l.force_n), torque: l.torque_n_m })?;
    }
    model.gravity = Vector3::from(input.gravity_m_s2);
    model.validate()?;
    Ok(model)
}

fn probe_columns(probes: &[usize]) -> Vec<String> {
    probes.iter().flat_map(|p| ["x_m", "y_m", "z_m", "theta_rad"].map(|c| format!("node{p}_{c}"))).collect()
}

fn probe_row(model: &Model, first: f64, state: &SystemState, probes: &[usize]) -> Vec<f64> {
    let mut row = vec![first];
    for &p in probes {
        let o = model.node_dof(p);
        row.extend([state.q[o], state.q[o + 1], state.q[o + 2], state.q[o + 6]]);
    }
    row
}

pub fn run_custom(cfg: &BenchmarkConfig) -> Result<Outcome> {
    let input = cfg.model.as_ref().ok_or_else(|| BenchError::Config("custom benchmark needs a model".into()))?;
    let mut ov = Overrides::new(&cfg.overrides);
    let tol = ov.get("newton_tol", 1e-10);
    ov.finish()?;
    let model = build_model(input)?;
    if let Some(&p) = input.probes.iter().find(|&&p| p >= model.nodes.len()) {
        return Err(BenchError::Config(format!("probe node {p} does not exist")));
    }
    let cols = probe_columns(&input.probes);
    let named = |first: &str| -> Vec<String> { std::iter::once(first.to_owned()).chain(cols.iter().cloned()).collect() };
    let s0 = model.initial_state()?;
    let (series, last) = match input.analysis {
        AnalysisInput::Static => {
            let sol = static_solve(&model, &s0, &settings(cfg, tol, 10, 1e-3))?;
            let mut out = series_with("custom_static", &named("load_factor"));
            out.push(probe_row(&model, 0.0, &s0, &input.probes))?;
            for st in &sol.states {
                out.push(probe_row(&model, st.time, st, &input.probes))?;
            }
            (vec![out], sol.states.last().cloned().unwrap_or(s0))
        }
        AnalysisInput::Dynamic { end_time_s } => {
            if !(end_time_s.is_finite() && end_time_s > 0.0) {
                return Err(BenchError::Config("end_time_s must be positive".into()));
            }
            let s = settings(cfg, tol, 1, 1e-3);
            let mut integ = Integrator::new(&model, &s0, &s)?;
            let mut out = series_with("custom_dynamic", &named("t_s"));
            out.push(probe_row(&model, 0.0, &s0, &input.probes))?;
            for _ in 0..(end_time_s / s.dt).round() as usize {
                integ.step()?;
                out.push(probe_row(&model, integ.state().time, integ.state(), &input.probes))?;
            }
            (vec![out], integ.state().clone())
        }
        AnalysisInput::Modal => {
            let sol = static_solve(&model, &s0, &settings(cfg, tol, 10, 1e-3))?;
            let eq = sol.states.last().cloned().unwrap_or(s0);
            let modal = modal_analysis(&model, &eq, &settings(cfg, tol, 1, 1e-3))?;
            let mut out = ResultSeries::new("custom_modes", &["mode", "omega_rad_s"]);
            for (i, w) in modal.frequencies.iter().enumerate() {
                out.push(vec![i as f64 + 1.0, *w])?;
            }
            (vec![out], eq)
        }
    };
    let (g, _) = constraint_eval(&model, &last, false)?;
    let checks = vec![Check::below("custom.constraints", "constraint residual of the final state", g.amax(), 10.0 * tol)];
    Ok(Outcome { series, checks })
}

fn series_with(name: &str, columns: &[String]) -> ResultSeries {
    let refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    ResultSeries::new(name, &refs)
}
