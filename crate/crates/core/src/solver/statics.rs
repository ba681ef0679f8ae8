use nalgebra::{DMatrix, DVector};

use super::{fd_h, force_scale, kkt, with_q, Factorized, SolverSettings};
use crate::assembly::{
    assemble_external, assemble_gravity, assemble_internal, constraint_eval, transport_directors, Model, SystemState,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct StaticSolution {
    /// Equilibrium after each load step; `time` holds the load factor.
    pub states: Vec<SystemState>,
    /// Scaled residual norms of the Newton iterations of each accepted increment.
    pub residuals: Vec<Vec<f64>>,
    /// Number of increment halvings used.
    pub bisections: usize,
}

/// `dU_int/dq + G^T lambda` at `q`.
fn balance(model: &Model, state: &SystemState, settings: &SolverSettings) -> Result<DVector<f64>> {
    let f = assemble_internal(model, state, settings.mode)?;
    let (_, g) = constraint_eval(model, state, true)?;
    Ok(f + g.transpose() * &state.lambda)
}

/// Central-difference tangent of `balance`. A one-sided difference loses
/// quadratic convergence on slender beams, where the axial-to-bending stiffness
/// ratio amplifies its truncation error.
fn tangent(model: &Model, state: &SystemState, settings: &SolverSettings) -> Result<DMatrix<f64>> {
    let n = state.q.len();
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = fd_h(settings, state.q[j]);
        let (mut a, mut b) = (state.q.clone(), state.q.clone());
        a[j] += h;
        b[j] -= h;
        let fa = balance(model, &with_q(state, a), settings)?;
        let fb = balance(model, &with_q(state, b), settings)?;
        k.set_column(j, &((fa - fb) / (2.0 * h)));
    }
    Ok(k)
}

/// Newton iterations at fixed load factor `state.time`. Returns the residual history.
fn newton(
    model: &Model,
    state: &mut SystemState,
    load: &DVector<f64>,
    settings: &SolverSettings,
    step: usize,
    factor: &mut Option<Factorized>,
) -> Result<Vec<f64>> {
    let ea = force_scale(model);
    let n = state.q.len();
    let mut history = Vec::new();
    let mut previous = f64::INFINITY;
    for iter in 0..settings.max_iter {
        let f = assemble_internal(model, state, settings.mode)?;
        let (g, gq) = constraint_eval(model, state, true)?;
        let r1 = &f - load * state.time + gq.transpose() * &state.lambda;
        let res = (r1.amax() / ea).max(g.amax());
        history.push(res);
        if !res.is_finite() {
            return Err(Error::NonConvergence { step, iter, residual: res });
        }
        if res < settings.newton_tol {
            return Ok(history);
        }
        // A stale tangent is kept only while it contracts the residual well.
        if factor.is_none() || !settings.reuse_jacobian || res > 0.25 * previous {
            let k = tangent(model, state, settings)? / ea;
            *factor = Some(Factorized::new(kkt(&k, &gq.transpose(), &gq), "static tangent")?);
        }
        previous = res;
        let mut rhs = DVector::zeros(n + g.len());
        rhs.rows_mut(0, n).copy_from(&(-&r1 / ea));
        rhs.rows_mut(n, g.len()).copy_from(&(-&g));
        let dx = factor.as_ref().expect("factor set above").solve(&rhs, "static tangent")?;
        state.q += dx.rows(0, n);
        state.lambda += dx.rows(n, g.len()) * ea;
    }
    let residual = *history.last().unwrap_or(&f64::INFINITY);
    Err(Error::NonConvergence { step, iter: settings.max_iter, residual })
}

/// Ramps loads, gravity and drivers with the load factor from 0 to 1 in
/// `settings.load_steps` increments, halving a failed increment up to
/// `settings.max_bisections` times.
pub fn static_solve(model: &Model, state0: &SystemState, settings: &SolverSettings) -> Result<StaticSolution> {
    settings.validate()?;
    let load = assemble_external(model) + assemble_gravity(model);
    let mut state = state0.clone();
    state.time = 0.0;
    if state.lambda.len() != model.n_constraints() {
        state.lambda = DVector::zeros(model.n_constraints());
    }
    let mut out = StaticSolution { states: Vec::new(), residuals: Vec::new(), bisections: 0 };
    let steps = settings.load_steps;
    let mut factor = None;
    for step in 1..=steps {
        let target = step as f64 / steps as f64;
        let mut ds = target - state.time;
        let mut level = 0;
        let mut history = Vec::new();
        while state.time < target - 1e-15 {
            let s = (state.time + ds).min(target);
            let mut trial = state.clone();
            trial.time = s;
            match newton(model, &mut trial, &load, settings, step, &mut factor) {
                Ok(h) => {
                    trial.directors = transport_directors(model, &state.q, &trial.q, &state.directors)?;
                    history.extend(h);
                    state = trial;
                }
                Err(err) => {
                    factor = None;
                    if level >= settings.max_bisections || matches!(err, Error::InvalidInput(_) | Error::JointConfig { .. }) {
                        return Err(err);
                    }
                    level += 1;
                    out.bisections += 1;
                    ds *= 0.5;
                }
            }
        }
        state.time = target;
        out.residuals.push(history);
        out.states.push(state.clone());
    }
    Ok(out)
}
