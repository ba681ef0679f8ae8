//! Load-stepping static solver, constrained variational integrator, modal
//! analysis and derivative checks.

mod dynamics;
mod gradients;
mod modal;
mod statics;

pub use dynamics::{dynamic_step, startup_state, Integrator, StepReport};
pub use gradients::{check_gradients, fd_relative_error, GradientReport};
pub use modal::{modal_analysis, ModalResult};
pub use statics::{static_solve, StaticSolution};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::assembly::{Model, SystemState};
use crate::element::DeformationMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Tolerance on the scaled residual (force rows over EA, constraint rows as is).
    pub newton_tol: f64,
    pub max_iter: usize,
    pub dt: f64,
    pub load_steps: usize,
    /// Relative finite-difference step for tangents.
    pub fd_step: f64,
    pub max_bisections: usize,
    pub mode: DeformationMode,
    /// Keep the factorized tangent across iterations and steps until convergence slows.
    pub reuse_jacobian: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            newton_tol: 1e-9,
            max_iter: 50,
            dt: 1e-3,
            load_steps: 10,
            fd_step: 1e-7,
            max_bisections: 8,
            mode: DeformationMode::Large,
            reuse_jacobian: false,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [("newton_tol", self.newton_tol), ("dt", self.dt), ("fd_step", self.fd_step)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("solver setting {name} = {v} must be positive")));
            }
        }
        if self.max_iter == 0 || self.load_steps == 0 {
            return Err(Error::InvalidInput("max_iter and load_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Force scale for residual rows: the largest axial stiffness in the model.
pub(crate) fn force_scale(model: &Model) -> f64 {
    model.beams.iter().flat_map(|b| &b.specs).map(|s| s.axial_stiffness()).fold(0.0, f64::max).max(1.0)
}

/// FD step for coordinate `i`.
pub(crate) fn fd_h(settings: &SolverSettings, qi: f64) -> f64 {
    settings.fd_step * qi.abs().max(1.0)
}

pub(crate) fn with_q(state: &SystemState, q: DVector<f64>) -> SystemState {
    SystemState { q, ..state.clone() }
}

/// LU factorization of a row-equilibrated square system.
#[derive(Debug, Clone)]
pub(crate) struct Factorized {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    row_scale: DVector<f64>,
}

impl Factorized {
    pub(crate) fn new(mut a: DMatrix<f64>, what: &'static str) -> Result<Self> {
        let row_scale = DVector::from_iterator(
            a.nrows(),
            a.row_iter().map(|r| {
                let m = r.amax();
                if m > 0.0 {
                    1.0 / m
                } else {
                    1.0
                }
            }),
        );
        for (i, s) in row_scale.iter().enumerate() {
            a.row_mut(i).scale_mut(*s);
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularMatrix(what));
        }
        let lu = a.lu();
        let u = lu.u();
        let diag_max = u.diagonal().amax();
        if u.diagonal().iter().any(|d| d.abs() <= 1e-14 * diag_max) {
            return Err(Error::SingularMatrix(what));
        }
        Ok(Self { lu, row_scale })
    }

    pub(crate) fn solve(&self, b: &DVector<f64>, what: &'static str) -> Result<DVector<f64>> {
        let rhs = b.component_mul(&self.row_scale);
        let x = self.lu.solve(&rhs).ok_or(Error::SingularMatrix(what))?;
        if x.iter().all(|v| v.is_finite()) {
            Ok(x)
        } else {
            Err(Error::SingularMatrix(what))
        }
    }
}

/// `[[a, b^T], [c, 0]]`.
pub(crate) fn kkt(a: &DMatrix<f64>, bt: &DMatrix<f64>, c: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), c.nrows());
    let mut k = DMatrix::zeros(n + m, n + m);
    k.view_mut((0, 0), (n, n)).copy_from(a);
    k.view_mut((0, n), (n, m)).copy_from(bt);
    k.view_mut((n, 0), (m, n)).copy_from(c);
    k
}
