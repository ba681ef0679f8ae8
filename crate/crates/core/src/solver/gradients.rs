use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{force_scale, with_q, SolverSettings};
use crate::assembly::{assemble_internal, constraint_eval, elastic_energy, node_frames, Model, SystemState};
use crate::element::DeformationMode;
use crate::error::Result;

/// Largest relative deviation `|a - fd|_inf / max(|fd|_inf, floor)` per derivative surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientReport {
    pub internal_small: f64,
    pub internal_large: f64,
    pub constraint_jacobian: f64,
    pub bishop_sensitivities: f64,
}

impl GradientReport {
    pub fn max_error(&self) -> f64 {
        [self.internal_small, self.internal_large, self.constraint_jacobian, self.bishop_sensitivities]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_error() < tol
    }
}

/// Compares `analytic` (rows: outputs, columns: inputs) with Richardson-extrapolated
/// central differences of `f` at `x`. Errors are relative to `max(|fd|_inf, floor)`.
pub fn fd_relative_error<F>(analytic: &DMatrix<f64>, f: F, x: &DVector<f64>, step: f64, floor: f64) -> Result<f64>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>>,
{
    let mut fd = DMatrix::zeros(analytic.nrows(), x.len());
    for j in 0..x.len() {
        let h = step * x[j].abs().max(1.0);
        let central = |h: f64| -> Result<DVector<f64>> {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[j] += h;
            b[j] -= h;
            Ok((f(&a)? - f(&b)?) / (2.0 * h))
        };
        fd.set_column(j, &((central(0.5 * h)? * 4.0 - central(h)?) / 3.0));
    }
    let err = (analytic - &fd).amax();
    let scale = fd.amax().max(floor);
    Ok(if scale > 0.0 { err / scale } else { err })
}

/// Checks every analytic derivative surface of the model at `state` against central differences.
pub fn check_gradients(model: &Model, state: &SystemState, settings: &SolverSettings) -> Result<GradientReport> {
    let step = (settings.fd_step * 10.0).max(1e-6);
    // Unstressed states carry forces of order EA * eps; compare against a floor above that.
    let force_floor = 1e-8 * force_scale(model);
    let force = |mode: DeformationMode| -> Result<f64> {
        let f = assemble_internal(model, state, mode)?;
        let analytic = DMatrix::from_row_slice(1, f.len(), f.as_slice());
        fd_relative_error(&analytic, |q| Ok(DVector::from_element(1, elastic_energy(model, &with_q(state, q.clone()), mode)?)), &state.q, step, force_floor)
    };
    let (_, jac) = constraint_eval(model, state, true)?;
    let constraint_jacobian = if jac.nrows() == 0 {
        0.0
    } else {
        fd_relative_error(&jac, |q| Ok(constraint_eval(model, &with_q(state, q.clone()), false)?.0), &state.q, step, 1e-12)?
    };
    let flatten = |s: &SystemState| -> Result<DVector<f64>> {
        let frames = node_frames(model, s, false)?;
        Ok(DVector::from_iterator(
            9 * frames.len(),
            frames.iter().flat_map(|f| {
                let m = f.material;
                m.t.iter().chain(m.a2.iter()).chain(m.a3.iter()).copied().collect::<Vec<_>>()
            }),
        ))
    };
    let frames = node_frames(model, state, true)?;
    let n = state.q.len();
    let mut analytic = DMatrix::zeros(9 * frames.len(), n);
    for (k, f) in frames.iter().enumerate() {
        let sens = f.sens.as_ref().expect("sensitivities requested");
        let (b, _) = model.node_owner(k).expect("frames exist for beam nodes");
        for (a, d) in [&sens.d_t, &sens.d_a2, &sens.d_a3].into_iter().enumerate() {
            for c in 0..d.ncols() {
                let g = model.chain_to_global(b, c);
                for r in 0..3 {
                    analytic[(9 * k + 3 * a + r, g)] += d[(r, c)];
                }
            }
        }
    }
    let bishop_sensitivities = fd_relative_error(&analytic, |q| flatten(&with_q(state, q.clone())), &state.q, step, 1e-12)?;
    Ok(GradientReport {
        internal_small: force(DeformationMode::Small)?,
        internal_large: force(DeformationMode::Large)?,
        constraint_jacobian,
        bishop_sensitivities,
    })
}
