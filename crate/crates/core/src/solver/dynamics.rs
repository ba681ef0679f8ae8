//! Midpoint variational integrator with holonomic constraints.
//!
//! With `L_d(a, b) = h L((a + b) / 2, (b - a) / h)` the step solves
//! `p_k + D1 L_d(q_k, q_k+1) - h G(q_k)^T lambda = 0`, `g(q_k+1, t_k+1) = 0`,
//! and carries the discrete momentum `p_k+1 = D2 L_d(q_k, q_k+1)`.

use nalgebra::{DMatrix, DVector};

use super::{fd_h, force_scale, kkt, with_q, Factorized, SolverSettings};
use crate::assembly::{
    assemble_external, assemble_forces, assemble_mass, constraint_eval, kinetic_gradient, transport_directors, Model,
    SystemState,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepReport {
    /// Scaled residual norm at each iteration.
    pub residuals: Vec<f64>,
    pub jacobian_updates: usize,
}

/// `(h/2) dL/dq(m, v)` and `M(m) v` for the segment `a -> b`; `D1 = first - second`, `D2 = first + second`.
fn segment_terms(
    model: &Model,
    at: &SystemState,
    a: &DVector<f64>,
    b: &DVector<f64>,
    h: f64,
    settings: &SolverSettings,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let m = (a + b) * 0.5;
    let v = (b - a) / h;
    let mid = with_q(at, m);
    let grad_u = assemble_forces(model, &mid, settings.mode)? - assemble_external(model);
    let dl = kinetic_gradient(model, &mid.q, &v) - grad_u;
    Ok((dl * (0.5 * h), assemble_mass(model, &mid.q) * v))
}

fn d2(model: &Model, at: &SystemState, a: &DVector<f64>, b: &DVector<f64>, h: f64, s: &SolverSettings) -> Result<DVector<f64>> {
    let (x, y) = segment_terms(model, at, a, b, h, s)?;
    Ok(x + y)
}

fn d1(model: &Model, at: &SystemState, a: &DVector<f64>, b: &DVector<f64>, h: f64, s: &SolverSettings) -> Result<DVector<f64>> {
    let (x, y) = segment_terms(model, at, a, b, h, s)?;
    Ok(x - y)
}

/// Velocity consistent with momentum `p` and the velocity constraints at `state`.
fn project_velocity(model: &Model, state: &SystemState, p: &DVector<f64>) -> Result<DVector<f64>> {
    let n = state.q.len();
    let (_, g) = constraint_eval(model, state, true)?;
    let eps = 1e-7 * state.time.abs().max(1.0);
    let value_at = |t: f64| constraint_eval(model, &SystemState { time: t, ..state.clone() }, false).map(|r| r.0);
    let g_t = (value_at(state.time + eps)? - value_at(state.time - eps)?) / (2.0 * eps);
    let mass = assemble_mass(model, &state.q);
    let a = kkt(&mass, &g.transpose(), &g);
    let mut rhs = DVector::zeros(n + g.nrows());
    rhs.rows_mut(0, n).copy_from(p);
    rhs.rows_mut(n, g.nrows()).copy_from(&(-g_t));
    Ok(Factorized::new(a, "velocity projection")?.solve(&rhs, "velocity projection")?.rows(0, n).into_owned())
}

/// Gauss-Newton projection of `q` onto `g(q, t) = 0` with minimal-norm corrections.
fn project_position(model: &Model, state: &mut SystemState, tol: f64) -> Result<()> {
    for _ in 0..20 {
        let (g, gq) = constraint_eval(model, state, true)?;
        if g.amax() < tol {
            return Ok(());
        }
        let ggt = &gq * gq.transpose();
        let y = Factorized::new(ggt, "position projection")?.solve(&g, "position projection")?;
        state.q -= gq.transpose() * y;
    }
    let residual = constraint_eval(model, state, false)?.0.amax();
    Err(Error::ConstraintDrift { residual, limit: tol })
}

/// Synthetic previous state `q_-1 = q_0 - h q_dot_0`, projected onto the constraints at `t_0 - h`.
pub fn startup_state(model: &Model, state0: &SystemState, settings: &SolverSettings) -> Result<SystemState> {
    let mut prev = state0.clone();
    prev.q = &state0.q - &state0.q_dot * settings.dt;
    prev.time = state0.time - settings.dt;
    if model.n_constraints() > 0 {
        project_position(model, &mut prev, 1e-3 * settings.newton_tol)?;
    }
    Ok(prev)
}

/// Time stepper holding the current configuration and discrete momentum.
#[derive(Debug, Clone)]
pub struct Integrator<'m> {
    model: &'m Model,
    settings: SolverSettings,
    state: SystemState,
    momentum: DVector<f64>,
    factor: Option<Factorized>,
    steps: usize,
}

impl<'m> Integrator<'m> {
    /// Starts from a consistent `state0`, synthesizing the previous configuration.
    pub fn new(model: &'m Model, state0: &SystemState, settings: &SolverSettings) -> Result<Self> {
        settings.validate()?;
        let prev = startup_state(model, state0, settings)?;
        let momentum = d2(model, &prev, &prev.q, &state0.q, settings.dt, settings)?;
        let mut state = state0.clone();
        if state.lambda.len() != model.n_constraints() {
            state.lambda = DVector::zeros(model.n_constraints());
        }
        Ok(Self { model, settings: *settings, state, momentum, factor: None, steps: 0 })
    }

    /// Continues from two consecutive configurations.
    pub fn from_pair(model: &'m Model, prev: &SystemState, cur: &SystemState, settings: &SolverSettings) -> Result<Self> {
        settings.validate()?;
        let momentum = d2(model, prev, &prev.q, &cur.q, settings.dt, settings)?;
        let mut state = cur.clone();
        if state.lambda.len() != model.n_constraints() {
            state.lambda = DVector::zeros(model.n_constraints());
        }
        Ok(Self { model, settings: *settings, state, momentum, factor: None, steps: 0 })
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn momentum(&self) -> &DVector<f64> {
        &self.momentum
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Flips the direction of motion (momentum and velocity change sign).
    pub fn reverse(&mut self) {
        self.momentum = -&self.momentum;
        self.state.q_dot = -&self.state.q_dot;
    }

    fn iteration_matrix(&self, q1: &DVector<f64>, d1_0: &DVector<f64>, g0t: &DMatrix<f64>, g1: &DMatrix<f64>) -> Result<Factorized> {
        let (h, ea) = (self.settings.dt, force_scale(self.model));
        let q0 = &self.state.q;
        let n = q0.len();
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let dh = fd_h(&self.settings, q1[j]);
            let mut q = q1.clone();
            q[j] += dh;
            let d = d1(self.model, &self.state, q0, &q, h, &self.settings)?;
            jac.set_column(j, &((d - d1_0) / (dh * h * ea)));
        }
        Factorized::new(kkt(&jac, &(-g0t), g1), "dynamic iteration matrix")
    }

    /// Advances one step of size `settings.dt`.
    pub fn step(&mut self) -> Result<StepReport> {
        let (model, settings) = (self.model, self.settings);
        let (h, ea, tol) = (settings.dt, force_scale(model), settings.newton_tol);
        let n = self.state.q.len();
        let m = model.n_constraints();
        let t1 = self.state.time + h;
        let (_, g0) = constraint_eval(model, &self.state, true)?;
        let g0t = g0.transpose();
        let mut q1 = &self.state.q + &self.state.q_dot * h;
        let mut lam = &self.state.lambda / ea;
        let mut report = StepReport::default();
        let mut previous = f64::INFINITY;
        let mut fresh = false;
        for iter in 0..settings.max_iter {
            let trial = SystemState { q: q1.clone(), time: t1, ..self.state.clone() };
            let d1_now = d1(model, &self.state, &self.state.q, &q1, h, &settings)?;
            let (g1, gq1) = constraint_eval(model, &trial, true)?;
            let top = (&self.momentum + &d1_now) / (h * ea) - &g0t * &lam;
            let res = top.amax().max(g1.amax());
            report.residuals.push(res);
            if !res.is_finite() {
                return Err(Error::NonConvergence { step: self.steps + 1, iter, residual: res });
            }
            if res < tol {
                return self.accept(q1, lam * ea, t1, &d1_now, report);
            }
            let slow = res > 0.25 * previous;
            if self.factor.is_none() || !settings.reuse_jacobian || (slow && !fresh) {
                self.factor = Some(self.iteration_matrix(&q1, &d1_now, &g0t, &gq1)?);
                report.jacobian_updates += 1;
                fresh = true;
            } else {
                fresh = false;
            }
            previous = res;
            let mut rhs = DVector::zeros(n + m);
            rhs.rows_mut(0, n).copy_from(&(-top));
            rhs.rows_mut(n, m).copy_from(&(-g1));
            let dx = self.factor.as_ref().expect("factor set above").solve(&rhs, "dynamic iteration matrix")?;
            q1 += dx.rows(0, n);
            lam += dx.rows(n, m);
        }
        self.factor = None;
        Err(Error::NonConvergence {
            step: self.steps + 1,
            iter: settings.max_iter,
            residual: *report.residuals.last().unwrap_or(&f64::INFINITY),
        })
    }

    fn accept(&mut self, q1: DVector<f64>, lambda: DVector<f64>, t1: f64, d1_now: &DVector<f64>, report: StepReport) -> Result<StepReport> {
        let (model, settings) = (self.model, self.settings);
        // D2 = D1 + 2 M(m) v.
        let m = (&self.state.q + &q1) * 0.5;
        let v = (&q1 - &self.state.q) / settings.dt;
        let p1 = d1_now + assemble_mass(model, &m) * v * 2.0;
        let directors = transport_directors(model, &self.state.q, &q1, &self.state.directors)?;
        let mut next = SystemState { q: q1, q_dot: DVector::zeros(0), lambda, time: t1, directors };
        let limit = 10.0 * settings.newton_tol;
        let drift = constraint_eval(model, &next, false)?.0.amax();
        if drift > limit {
            return Err(Error::ConstraintDrift { residual: drift, limit });
        }
        next.q_dot = project_velocity(model, &next, &p1)?;
        self.momentum = p1;
        self.state = next;
        self.steps += 1;
        Ok(report)
    }
}

/// One step from two consecutive states, without a persistent iteration matrix.
pub fn dynamic_step(
    model: &Model,
    prev: &SystemState,
    cur: &SystemState,
    settings: &SolverSettings,
) -> Result<SystemState> {
    let mut integ = Integrator::from_pair(model, prev, cur, &SolverSettings { reuse_jacobian: false, ..*settings })?;
    integ.step()?;
    Ok(integ.state)
}
