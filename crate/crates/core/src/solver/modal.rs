use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{fd_h, with_q, SolverSettings};
use crate::assembly::{assemble_internal, assemble_mass, constraint_eval, Model, SystemState};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ModalResult {
    /// Circular frequencies in rad/s, ascending.
    pub frequencies: Vec<f64>,
    /// Mass-normalized mode shapes in global coordinates.
    pub modes: Vec<DVector<f64>>,
    pub min_eigenvalue: f64,
    /// Set when the projected stiffness has clearly negative eigenvalues.
    pub indefinite: Option<Error>,
}

fn balance(model: &Model, state: &SystemState, settings: &SolverSettings) -> Result<DVector<f64>> {
    let f = assemble_internal(model, state, settings.mode)?;
    let (_, g) = constraint_eval(model, state, true)?;
    Ok(f + g.transpose() * &state.lambda)
}

/// Orthonormal basis of the null space of `g` (n x k).
fn null_space(g: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    if g.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let gtg = g.transpose() * g;
    let eig = SymmetricEigen::new(gtg);
    let top = eig.eigenvalues.amax();
    let keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] <= 1e-10 * top).collect();
    DMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
}

/// Small-oscillation frequencies about an equilibrium (with its multipliers in `state.lambda`).
pub fn modal_analysis(model: &Model, state: &SystemState, settings: &SolverSettings) -> Result<ModalResult> {
    let n = state.q.len();
    let mut k = DMatrix::zeros(n, n);
    for j in 0..n {
        let h = fd_h(settings, state.q[j]) * 10.0;
        let (mut a, mut b) = (state.q.clone(), state.q.clone());
        a[j] += h;
        b[j] -= h;
        let fa = balance(model, &with_q(state, a), settings)?;
        let fb = balance(model, &with_q(state, b), settings)?;
        k.set_column(j, &((fa - fb) / (2.0 * h)));
    }
    let (_, g) = constraint_eval(model, state, true)?;
    let basis = null_space(&g, n);
    let mut kr = basis.transpose() * &k * &basis;
    kr = (&kr + kr.transpose()) * 0.5;
    let mr = basis.transpose() * assemble_mass(model, &state.q) * &basis;
    let mr = (&mr + mr.transpose()) * 0.5;
    let chol = mr.cholesky().ok_or(Error::SingularMatrix("reduced mass matrix"))?;
    let l = chol.l();
    let y = l.solve_lower_triangular(&kr).ok_or(Error::SingularMatrix("reduced mass matrix"))?;
    let a = l.solve_lower_triangular(&y.transpose()).ok_or(Error::SingularMatrix("reduced mass matrix"))?;
    let a = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lt = l.transpose();
    let mut frequencies = Vec::with_capacity(order.len());
    let mut modes = Vec::with_capacity(order.len());
    for &i in &order {
        frequencies.push(eig.eigenvalues[i].max(0.0).sqrt());
        let z = lt.solve_upper_triangular(&eig.eigenvectors.column(i).into_owned()).expect("triangular factor is regular");
        modes.push(&basis * z);
    }
    let min_eigenvalue = order.first().map_or(0.0, |&i| eig.eigenvalues[i]);
    let scale = eig.eigenvalues.amax();
    let indefinite = (min_eigenvalue < -1e-8 * scale).then_some(Error::Indefinite { min_eigenvalue });
    Ok(ModalResult { frequencies, modes, min_eigenvalue, indefinite })
}
