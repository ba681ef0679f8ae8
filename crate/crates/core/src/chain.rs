//! Forward march along a chain of elements sharing nodes: Bishop frames,
//! their sensitivities, strains, energy and internal force in one pass.
//!
//! The stored director lives at the first node of the chain. Each element
//! starts from the end frame of its predecessor, so the Bishop frame is
//! continuous across shared nodes.

use nalgebra::{DVector, Matrix3, Vector3};

use crate::element::{
    energy_density, energy_density_gradient, BeamSpec, DeformationMode, Matrix3x14, ReferenceStrain, Row14, ShapeEval,
    StrainMeasures, StrainState, Vector14, ELEMENT_DOFS, NODE_DOFS, THETA_I, THETA_J, VECTOR_BLOCKS,
};
use crate::error::{Error, Result};
use crate::frame::{
    bishop_step, material_frame, unit_tangent, DerivativeForm, FrameSensitivity, FrameTriad, Jac3, JacRow,
};
use crate::quadrature::QuadratureRule;

#[derive(Debug, Clone, Copy)]
pub struct ChainElement<'a> {
    pub spec: &'a BeamSpec,
    /// One entry per quadrature point.
    pub reference: &'a [ReferenceStrain],
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ChainRequest {
    pub energy: Option<DeformationMode>,
    /// Requires `energy`.
    pub force: bool,
    pub strains: bool,
    pub node_frames: bool,
    pub frame_sensitivities: bool,
}

/// Material frame at a node with optional sensitivities (`d_a2 = dy/dq`, `d_a3 = dz/dq`).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeFrame {
    pub bishop: FrameTriad,
    pub material: FrameTriad,
    pub sens: Option<FrameSensitivity>,
}

#[derive(Debug, Clone, Default)]
pub struct ChainOutput {
    pub energy: f64,
    pub force: DVector<f64>,
    /// Per element, per quadrature point.
    pub strains: Vec<Vec<StrainState>>,
    pub node_frames: Vec<NodeFrame>,
}

pub fn chain_dofs(n_elements: usize) -> usize {
    NODE_DOFS * (n_elements + 1)
}

struct March {
    frame: FrameTriad,
    x: f64,
    dt: Jac3,
    du: Jac3,
    dv: Jac3,
}

impl March {
    fn start(director: &FrameTriad, width: usize) -> Self {
        Self { frame: *director, x: 0.0, dt: Jac3::zeros(width), du: Jac3::zeros(width), dv: Jac3::zeros(width) }
    }

    fn widen(&mut self, width: usize) {
        for m in [&mut self.dt, &mut self.du, &mut self.dv] {
            if m.ncols() < width {
                let mut w = Jac3::zeros(width);
                w.columns_mut(0, m.ncols()).copy_from(m);
                *m = w;
            }
        }
    }

    /// Moves to station `x` where the centre-line slope is `r1`.
    fn advance(&mut self, x: f64, r1: &Vector3<f64>, ds: &[f64; 4], offset: usize, sens: bool) -> Result<()> {
        let t = unit_tangent(r1, x)?;
        let (next, rot) = bishop_step(&self.frame, &t, self.x, x)?;
        if sens {
            let rho = r1.norm();
            let p = (Matrix3::identity() - t * t.transpose()) / rho;
            let mut dt = Jac3::zeros(self.du.ncols());
            for (b, &off) in VECTOR_BLOCKS.iter().enumerate() {
                dt.fixed_view_mut::<3, 3>(0, offset + off).copy_from(&(p * ds[b]));
            }
            let du = rot.derivative(&self.frame.a2, &self.du, &self.dt, &dt, DerivativeForm::Auto, x)?;
            let dv = rot.derivative(&self.frame.a3, &self.dv, &self.dt, &dt, DerivativeForm::Auto, x)?;
            self.dt = dt;
            self.du = du;
            self.dv = dv;
        }
        self.frame = next;
        self.x = x;
        Ok(())
    }

    fn node_frame(&self, theta: f64, theta_col: usize, sens: bool) -> NodeFrame {
        let material = material_frame(&self.frame, theta);
        let sens = sens.then(|| {
            let (s, c) = theta.sin_cos();
            let mut dy = &self.du * c + &self.dv * s;
            let mut dz = &self.dv * c - &self.du * s;
            for k in 0..3 {
                dy[(k, theta_col)] += material.a3[k];
                dz[(k, theta_col)] -= material.a2[k];
            }
            FrameSensitivity { d_t: self.dt.clone(), d_a2: dy, d_a3: dz }
        });
        NodeFrame { bishop: self.frame, material, sens }
    }
}

/// Strain state at a station plus the ingredients of its sensitivities.
struct PointStrain {
    state: StrainState,
    cos: f64,
    sin: f64,
    /// Element-local parts of the sensitivity rows.
    d_rho: Row14,
    d_g1: Row14,
    d_g2: Row14,
    d_tau: Row14,
    /// `t'^T du/dq`, `t'^T dv/dq` over the active width.
    pu: Option<JacRow>,
    pv: Option<JacRow>,
}

fn point_strain(sh: &ShapeEval, q: &Vector14, m: &March, r1: &Vector3<f64>, r2: &Vector3<f64>, rows: bool) -> PointStrain {
    let rho = r1.norm();
    let t = m.frame.t;
    let theta = sh.theta(q);
    let (sin, cos) = theta.sin_cos();
    let y = m.frame.a2 * cos + m.frame.a3 * sin;
    let z = m.frame.a3 * cos - m.frame.a2 * sin;
    let tr2 = t.dot(r2);
    let tp = (r2 - t * tr2) / rho;
    let (g1, g2) = (tp.dot(&y), tp.dot(&z));
    let state = StrainState::new(rho, g1, g2, sh.theta_prime(q));
    let mut p = PointStrain {
        state,
        cos,
        sin,
        d_rho: Row14::zeros(),
        d_g1: Row14::zeros(),
        d_g2: Row14::zeros(),
        d_tau: Row14::zeros(),
        pu: None,
        pv: None,
    };
    if rows {
        for (b, &off) in VECTOR_BLOCKS.iter().enumerate() {
            let alpha = sh.dds[b] / rho - tr2 * sh.ds[b] / (rho * rho);
            let beta = sh.ds[b] / rho;
            for k in 0..3 {
                p.d_rho[off + k] = sh.ds[b] * t[k];
                p.d_g1[off + k] = alpha * y[k] - beta * g1 * t[k];
                p.d_g2[off + k] = alpha * z[k] - beta * g2 * t[k];
            }
        }
        for (i, col) in [THETA_I, THETA_J].into_iter().enumerate() {
            p.d_g1[col] = g2 * sh.sbar[i];
            p.d_g2[col] = -g1 * sh.sbar[i];
            p.d_tau[col] = sh.dsbar[i];
        }
        p.pu = Some(tp.transpose() * &m.du);
        p.pv = Some(tp.transpose() * &m.dv);
    }
    p
}

fn element_q(q: &[f64], e: usize) -> Vector14 {
    Vector14::from_column_slice(&q[NODE_DOFS * e..NODE_DOFS * e + ELEMENT_DOFS])
}

/// Evaluates a chain of `elements.len()` elements with `q` of length `7 (N + 1)`.
pub fn evaluate_chain(
    elements: &[ChainElement<'_>],
    unit_rule: &QuadratureRule,
    director: &FrameTriad,
    q: &[f64],
    req: &ChainRequest,
) -> Result<ChainOutput> {
    let n_el = elements.len();
    if n_el == 0 {
        return Err(Error::InvalidInput("chain without elements".into()));
    }
    let n = chain_dofs(n_el);
    if q.len() != n {
        return Err(Error::InvalidInput(format!("chain expects {n} coordinates, got {}", q.len())));
    }
    if req.force && req.energy.is_none() {
        return Err(Error::InvalidInput("force requested without a deformation mode".into()));
    }
    let frame_sens = req.node_frames && req.frame_sensitivities;
    let sens = req.force || frame_sens;
    let mut out = ChainOutput { force: DVector::zeros(if req.force { n } else { 0 }), ..Default::default() };
    let mut march = March::start(director, if sens { ELEMENT_DOFS } else { 0 });

    for (e, el) in elements.iter().enumerate() {
        let l = el.spec.length;
        let offset = NODE_DOFS * e;
        let width = offset + ELEMENT_DOFS;
        if sens {
            march.widen(width);
        }
        if el.reference.len() != unit_rule.order() && req.energy.is_some() {
            return Err(Error::InvalidInput(format!(
                "element {e}: {} reference strains for a {}-point rule",
                el.reference.len(),
                unit_rule.order()
            )));
        }
        let qe = element_q(q, e);
        let mut strains = Vec::new();
        let body = |march: &mut March, out: &mut ChainOutput, strains: &mut Vec<StrainState>| -> Result<()> {
            // The march's x is element-local: it restarts at 0 on each element.
            march.x = 0.0;
            if e == 0 {
                let sh = ShapeEval::at(0.0, l)?;
                march.advance(0.0, &sh.r_prime(&qe), &sh.ds, offset, sens)?;
                if req.node_frames {
                    out.node_frames.push(march.node_frame(qe[THETA_I], offset + THETA_I, frame_sens));
                }
            }
            for (k, &(xi, wi)) in unit_rule.points.iter().enumerate() {
                let (x, w) = (xi * l, wi * l);
                let sh = ShapeEval::at(x, l)?;
                let (r1, r2) = (sh.r_prime(&qe), sh.r_dprime(&qe));
                march.advance(x, &r1, &sh.ds, offset, sens)?;
                let p = point_strain(&sh, &qe, march, &r1, &r2, req.force);
                if req.strains {
                    strains.push(p.state);
                }
                if let Some(mode) = req.energy {
                    out.energy += w * energy_density(mode, el.spec, &el.reference[k], &p.state);
                    if req.force {
                        let g = energy_density_gradient(mode, el.spec, &el.reference[k], &p.state).map(|v| v * w);
                        let local = p.d_rho * g[0] + p.d_g1 * g[1] + p.d_g2 * g[2] + p.d_tau * g[3];
                        let mut f = out.force.rows_mut(0, width);
                        for i in 0..ELEMENT_DOFS {
                            f[offset + i] += local[i];
                        }
                        let (pu, pv) = (p.pu.as_ref().unwrap(), p.pv.as_ref().unwrap());
                        let cu = g[1] * p.cos - g[2] * p.sin;
                        let cv = g[1] * p.sin + g[2] * p.cos;
                        for i in 0..width {
                            f[i] += cu * pu[i] + cv * pv[i];
                        }
                    }
                }
            }
            if e + 1 < n_el || req.node_frames {
                let sh = ShapeEval::at(l, l)?;
                march.advance(l, &sh.r_prime(&qe), &sh.ds, offset, sens)?;
                if req.node_frames {
                    out.node_frames.push(march.node_frame(qe[THETA_J], offset + THETA_J, frame_sens));
                }
            }
            Ok(())
        };
        body(&mut march, &mut out, &mut strains).map_err(|err| err.in_element(e))?;
        if req.strains {
            out.strains.push(strains);
        }
    }
    if frame_sens {
        for nf in &mut out.node_frames {
            if let Some(s) = nf.sens.as_mut() {
                for m in [&mut s.d_t, &mut s.d_a2, &mut s.d_a3] {
                    if m.ncols() < n {
                        let mut w = Jac3::zeros(n);
                        w.columns_mut(0, m.ncols()).copy_from(m);
                        *m = w;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Bishop frames and sensitivities of one element at arbitrary increasing stations.
pub fn element_stations(
    spec: &BeamSpec,
    director: &FrameTriad,
    q: &Vector14,
    stations: &[f64],
) -> Result<Vec<(FrameTriad, FrameSensitivity)>> {
    if stations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("stations must be strictly increasing".into()));
    }
    director.validate(1e-9)?;
    let mut march = March::start(director, ELEMENT_DOFS);
    if let Some(&x0) = stations.first() {
        march.x = x0;
    }
    let mut out = Vec::with_capacity(stations.len());
    for &x in stations {
        let sh = ShapeEval::at(x, spec.length)?;
        march.advance(x, &sh.r_prime(q), &sh.ds, 0, true)?;
        out.push((march.frame, FrameSensitivity { d_t: march.dt.clone(), d_a2: march.du.clone(), d_a3: march.dv.clone() }));
    }
    Ok(out)
}

/// Strain measures at `x`, marching from node i (with the director aligned there).
pub fn strain_measures_at(spec: &BeamSpec, director: &FrameTriad, q: &Vector14, x: f64) -> Result<StrainMeasures> {
    director.validate(1e-9)?;
    let l = spec.length;
    let sh = ShapeEval::at(x, l)?;
    let mut march = March::start(director, ELEMENT_DOFS);
    let sh0 = ShapeEval::at(0.0, l)?;
    march.advance(0.0, &sh0.r_prime(q), &sh0.ds, 0, true)?;
    let (r1, r2) = (sh.r_prime(q), sh.r_dprime(q));
    if x > 0.0 {
        march.advance(x, &r1, &sh.ds, 0, true)?;
    }
    let p = point_strain(&sh, q, &march, &r1, &r2, true);
    let (pu, pv) = (p.pu.unwrap(), p.pv.unwrap());
    let to_row = |r: &Row14| JacRow::from_iterator(ELEMENT_DOFS, r.iter().copied());
    Ok(StrainMeasures {
        state: p.state,
        d_stretch: to_row(&p.d_rho),
        d_gamma1: to_row(&p.d_g1) + &pu * p.cos + &pv * p.sin,
        d_gamma2: to_row(&p.d_g2) - &pu * p.sin + &pv * p.cos,
        d_tau: to_row(&p.d_tau),
        d_r_prime: sh.s_prime() as Matrix3x14,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::{CrossSection, NodalState};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn setup(n_el: usize, rng: &mut StdRng) -> (Vec<BeamSpec>, Vec<Vec<ReferenceStrain>>, Vec<f64>) {
        let l = 0.3;
        let spec = BeamSpec::new(7e10, 0.33, 2700.0, CrossSection::rectangle(0.01, 0.02), l);
        let mut q = Vec::new();
        for k in 0..=n_el {
            let base = NodalState::straight(Vector3::x() * (k as f64 * l), Vector3::x(), l, 0.0).q;
            q.extend(base.iter().take(NODE_DOFS));
        }
        for (i, v) in q.iter_mut().enumerate() {
            let amp = if i % NODE_DOFS == 6 { 0.5 } else { 0.08 };
            *v += amp * rng.gen_range(-1.0..1.0);
        }
        (vec![spec; n_el], vec![vec![ReferenceStrain::default(); 5]; n_el], q)
    }

    #[test]
    fn chain_force_is_energy_gradient() {
        let mut rng = StdRng::seed_from_u64(3);
        let rule = QuadratureRule::gauss_legendre(5, 1.0).unwrap();
        let dir = FrameTriad::from_tangent_and_hint(&Vector3::new(1.0, 0.1, -0.1), &Vector3::y()).unwrap();
        for _ in 0..5 {
            let (specs, refs, q) = setup(3, &mut rng);
            let els: Vec<_> = specs.iter().zip(&refs).map(|(s, r)| ChainElement { spec: s, reference: r }).collect();
            for mode in [DeformationMode::Small, DeformationMode::Large] {
                let req = ChainRequest { energy: Some(mode), force: true, ..Default::default() };
                let f = evaluate_chain(&els, &rule, &dir, &q, &req).unwrap().force;
                let energy = |q: &[f64]| {
                    evaluate_chain(&els, &rule, &dir, q, &ChainRequest { energy: Some(mode), ..Default::default() }).unwrap().energy
                };
                let mut worst: f64 = 0.0;
                for i in 0..q.len() {
                    let h = 1e-6;
                    let (mut a, mut b) = (q.clone(), q.clone());
                    a[i] += h;
                    b[i] -= h;
                    let g = (energy(&a) - energy(&b)) / (2.0 * h);
                    worst = worst.max((g - f[i]).abs());
                }
                assert!(worst < 1e-6 * f.amax(), "{mode:?}: {worst:e} vs {:e}", f.amax());
            }
        }
    }

    #[test]
    fn node_frame_sensitivities_match_finite_differences() {
        let mut rng = StdRng::seed_from_u64(17);
        let rule = QuadratureRule::gauss_legendre(5, 1.0).unwrap();
        let dir = FrameTriad::canonical();
        let (specs, refs, q) = setup(3, &mut rng);
        let els: Vec<_> = specs.iter().zip(&refs).map(|(s, r)| ChainElement { spec: s, reference: r }).collect();
        let req = ChainRequest { node_frames: true, frame_sensitivities: true, ..Default::default() };
        let frames = |q: &[f64]| evaluate_chain(&els, &rule, &dir, q, &req).unwrap().node_frames;
        let base = frames(&q);
        assert_eq!(base.len(), 4);
        let h = 1e-7;
        for i in 0..q.len() {
            let (mut a, mut b) = (q.clone(), q.clone());
            a[i] += h;
            b[i] -= h;
            let (fa, fb) = (frames(&a), frames(&b));
            for (k, nf) in base.iter().enumerate() {
                let s = nf.sens.as_ref().unwrap();
                for ax in 0..3 {
                    let fd = (fa[k].material.axis(ax) - fb[k].material.axis(ax)) / (2.0 * h);
                    let an = s.axis(ax).column(i);
                    assert!((fd - an).amax() < 1e-6, "node {k} axis {ax} dof {i}");
                }
            }
        }
    }

    #[test]
    fn straight_chain_has_continuous_frames() {
        let rule = QuadratureRule::gauss_legendre(5, 1.0).unwrap();
        let spec = BeamSpec::new(7e10, 0.33, 2700.0, CrossSection::circle(0.01), 0.5);
        let refs = vec![ReferenceStrain::default(); 5];
        let els = vec![ChainElement { spec: &spec, reference: &refs }; 4];
        let mut q = Vec::new();
        for k in 0..5 {
            q.extend_from_slice(&[0.5 * k as f64, 0.0, 0.0, 1.0, 0.0, 0.0, 0.1 * k as f64]);
        }
        let req = ChainRequest { energy: Some(DeformationMode::Small), node_frames: true, ..Default::default() };
        let out = evaluate_chain(&els, &rule, &FrameTriad::canonical(), &q, &req).unwrap();
        for nf in &out.node_frames {
            assert_eq!(nf.bishop, FrameTriad::canonical());
        }
        let gj = spec.g * spec.j_t;
        let expect = 4.0 * gj * (0.1f64 / 0.5).powi(2) * 0.5 / 2.0;
        assert!((out.energy - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn wrong_length_rejected() {
        let rule = QuadratureRule::gauss_legendre(5, 1.0).unwrap();
        let spec = BeamSpec::new(7e10, 0.33, 2700.0, CrossSection::circle(0.01), 0.5);
        let refs = vec![ReferenceStrain::default(); 5];
        let els = vec![ChainElement { spec: &spec, reference: &refs }];
        let r = evaluate_chain(&els, &rule, &FrameTriad::canonical(), &[0.0; 13], &ChainRequest::default());
        assert!(r.is_err());
    }
}
