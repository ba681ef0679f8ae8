//! Per-element quantities of the 14-DOF beam: shape functions, mass matrix,
//! gravity, strain measures and the small/large strain energies.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::chain::{evaluate_chain, ChainElement, ChainRequest};
use crate::error::{Error, Result};
use crate::frame::{FrameSensitivity, FrameTriad, JacRow};
use crate::quadrature::QuadratureRule;

pub const NODE_DOFS: usize = 7;
pub const ELEMENT_DOFS: usize = 14;
/// Offsets of the four 3-vector blocks `r_i, r_i', r_j, r_j'` inside `q`.
pub const VECTOR_BLOCKS: [usize; 4] = [0, 3, 7, 10];
pub const THETA_I: usize = 6;
pub const THETA_J: usize = 13;

pub type Vector14 = SVector<f64, ELEMENT_DOFS>;
pub type Matrix14 = SMatrix<f64, ELEMENT_DOFS, ELEMENT_DOFS>;
pub type Matrix3x14 = SMatrix<f64, 3, ELEMENT_DOFS>;
pub type Row14 = SMatrix<f64, 1, ELEMENT_DOFS>;

/// Material and section constants of a uniform beam element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamSpec {
    pub e: f64,
    pub nu: f64,
    pub g: f64,
    pub rho: f64,
    pub area: f64,
    pub i_y: f64,
    pub i_z: f64,
    /// Polar second moment, used by the rotary kinetic energy.
    pub j_polar: f64,
    /// Torsion constant, used by the stiffness.
    pub j_t: f64,
    pub length: f64,
    /// Product of inertia; must vanish (symmetric sections only).
    #[serde(default)]
    pub i_yz: f64,
}

/// Section constants independent of material and length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub area: f64,
    pub i_y: f64,
    pub i_z: f64,
    pub j_polar: f64,
    pub j_t: f64,
}

impl CrossSection {
    /// Solid rectangle with `width` along the material y axis and `height` along z.
    pub fn rectangle(width: f64, height: f64) -> Self {
        let (a, b) = if width >= height { (width, height) } else { (height, width) };
        let r = b / a;
        let j_t = a * b.powi(3) * (1.0 / 3.0 - 0.21 * r * (1.0 - r.powi(4) / 12.0));
        let i_y = width * height.powi(3) / 12.0;
        let i_z = height * width.powi(3) / 12.0;
        Self { area: width * height, i_y, i_z, j_polar: i_y + i_z, j_t }
    }

    pub fn circle(radius: f64) -> Self {
        Self::tube(radius, 0.0)
    }

    pub fn tube(outer: f64, inner: f64) -> Self {
        let pi = std::f64::consts::PI;
        let i = pi / 4.0 * (outer.powi(4) - inner.powi(4));
        Self { area: pi * (outer * outer - inner * inner), i_y: i, i_z: i, j_polar: 2.0 * i, j_t: 2.0 * i }
    }

    pub fn with_torsion_constant(mut self, j_t: f64) -> Self {
        self.j_t = j_t;
        self
    }
}

impl BeamSpec {
    /// Spec with `G = E / (2 (1 + nu))`.
    pub fn new(e: f64, nu: f64, rho: f64, section: CrossSection, length: f64) -> Self {
        Self {
            e,
            nu,
            g: e / (2.0 * (1.0 + nu)),
            rho,
            area: section.area,
            i_y: section.i_y,
            i_z: section.i_z,
            j_polar: section.j_polar,
            j_t: section.j_t,
            length,
            i_yz: 0.0,
        }
    }

    pub fn with_length(mut self, length: f64) -> Self {
        self.length = length;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("E", self.e),
            ("G", self.g),
            ("rho", self.rho),
            ("A", self.area),
            ("I_y", self.i_y),
            ("I_z", self.i_z),
            ("J", self.j_polar),
            ("J_t", self.j_t),
            ("l", self.length),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("beam constant {name} = {v} must be positive")));
            }
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(Error::InvalidInput(format!("Poisson ratio {} outside (-1, 0.5)", self.nu)));
        }
        let slack = 1e-9 * self.j_polar;
        if self.j_polar + slack < self.i_y || self.j_polar + slack < self.i_z {
            return Err(Error::InvalidInput("polar moment J smaller than I_y or I_z".into()));
        }
        if self.i_yz != 0.0 {
            return Err(Error::InvalidInput("unsymmetric sections (I_yz != 0) are not supported".into()));
        }
        Ok(())
    }

    pub fn axial_stiffness(&self) -> f64 {
        self.e * self.area
    }
}

/// Generalized coordinates of one element and their rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodalState {
    pub q: Vector14,
    pub q_dot: Vector14,
}

impl NodalState {
    pub fn new(q: Vector14) -> Self {
        Self { q, q_dot: Vector14::zeros() }
    }

    /// Straight, unstretched element from `start` along unit `direction` with uniform twist.
    pub fn straight(start: Vector3<f64>, direction: Vector3<f64>, length: f64, theta: f64) -> Self {
        let d = direction.normalize();
        Self::new(pack(&start, &d, theta, &(start + d * length), &d, theta))
    }

    pub fn block(&self, b: usize) -> Vector3<f64> {
        block(&self.q, b)
    }
}

/// Assembles `q` from node quantities.
pub fn pack(r_i: &Vector3<f64>, s_i: &Vector3<f64>, th_i: f64, r_j: &Vector3<f64>, s_j: &Vector3<f64>, th_j: f64) -> Vector14 {
    let mut q = Vector14::zeros();
    q.fixed_rows_mut::<3>(0).copy_from(r_i);
    q.fixed_rows_mut::<3>(3).copy_from(s_i);
    q[THETA_I] = th_i;
    q.fixed_rows_mut::<3>(7).copy_from(r_j);
    q.fixed_rows_mut::<3>(10).copy_from(s_j);
    q[THETA_J] = th_j;
    q
}

/// One of the four 3-vector blocks of `q`.
pub fn block(q: &Vector14, b: usize) -> Vector3<f64> {
    q.fixed_rows::<3>(VECTOR_BLOCKS[b]).into_owned()
}

/// Cross-section point in material coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CrossSectionPoint {
    pub y_bar: f64,
    pub z_bar: f64,
}

/// Stress-free values of the strain measures at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceStrain {
    pub stretch: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub tau: f64,
}

impl Default for ReferenceStrain {
    /// Straight, unstretched, untwisted.
    fn default() -> Self {
        Self { stretch: 1.0, gamma1: 0.0, gamma2: 0.0, tau: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeformationMode {
    Small,
    #[default]
    Large,
}

/// Strain measures at one station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainState {
    pub stretch: f64,
    pub eps_bar: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub tau_m: f64,
    /// Coefficients `(|r'| - 1, gamma1, gamma2)` of the small-strain axial field.
    pub eps11_small: [f64; 3],
}

impl StrainState {
    pub fn new(stretch: f64, gamma1: f64, gamma2: f64, tau_m: f64) -> Self {
        Self {
            stretch,
            eps_bar: stretch * stretch - 1.0,
            gamma1,
            gamma2,
            tau_m,
            eps11_small: [stretch - 1.0, gamma1, gamma2],
        }
    }

    /// Small-strain axial strain at a section point.
    pub fn eps11_small_at(&self, p: &CrossSectionPoint) -> f64 {
        self.eps11_small[0] + self.eps11_small[1] * p.y_bar + self.eps11_small[2] * p.z_bar
    }
}

/// Strain measures at a station with their derivatives with respect to `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrainMeasures {
    pub state: StrainState,
    pub d_stretch: JacRow,
    pub d_gamma1: JacRow,
    pub d_gamma2: JacRow,
    pub d_tau: JacRow,
    /// `dr'/dq`, the shape-function derivative matrix.
    pub d_r_prime: Matrix3x14,
}

/// Hermite shape functions and their derivatives at one station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub s: [f64; 4],
    pub ds: [f64; 4],
    pub dds: [f64; 4],
    pub sbar: [f64; 2],
    pub dsbar: [f64; 2],
}

impl ShapeEval {
    pub fn at(x: f64, l: f64) -> Result<Self> {
        let tol = 1e-12 * l;
        if !(x >= -tol && x <= l + tol) {
            return Err(Error::Domain { x, length: l });
        }
        let xi = (x / l).clamp(0.0, 1.0);
        let (x2, x3) = (xi * xi, xi * xi * xi);
        Ok(Self {
            s: [1.0 - 3.0 * x2 + 2.0 * x3, l * (xi - 2.0 * x2 + x3), 3.0 * x2 - 2.0 * x3, l * (x3 - x2)],
            ds: [6.0 * (x2 - xi) / l, 1.0 - 4.0 * xi + 3.0 * x2, 6.0 * (xi - x2) / l, 3.0 * x2 - 2.0 * xi],
            dds: [(12.0 * xi - 6.0) / (l * l), (6.0 * xi - 4.0) / l, (6.0 - 12.0 * xi) / (l * l), (6.0 * xi - 2.0) / l],
            sbar: [1.0 - xi, xi],
            dsbar: [-1.0 / l, 1.0 / l],
        })
    }

    fn matrix_of(c: &[f64; 4]) -> Matrix3x14 {
        let mut m = Matrix3x14::zeros();
        for (b, &off) in VECTOR_BLOCKS.iter().enumerate() {
            m.fixed_view_mut::<3, 3>(0, off).copy_from(&(Matrix3::identity() * c[b]));
        }
        m
    }

    fn row_of(c: &[f64; 2]) -> Row14 {
        let mut r = Row14::zeros();
        r[THETA_I] = c[0];
        r[THETA_J] = c[1];
        r
    }

    pub fn s_matrix(&self) -> Matrix3x14 {
        Self::matrix_of(&self.s)
    }

    pub fn s_prime(&self) -> Matrix3x14 {
        Self::matrix_of(&self.ds)
    }

    pub fn s_dprime(&self) -> Matrix3x14 {
        Self::matrix_of(&self.dds)
    }

    pub fn sbar(&self) -> Row14 {
        Self::row_of(&self.sbar)
    }

    pub fn sbar_prime(&self) -> Row14 {
        Self::row_of(&self.dsbar)
    }

    /// `sum_b c_b * block_b(q)`.
    pub fn combine(c: &[f64; 4], q: &Vector14) -> Vector3<f64> {
        (0..4).fold(Vector3::zeros(), |acc, b| acc + block(q, b) * c[b])
    }

    pub fn position(&self, q: &Vector14) -> Vector3<f64> {
        Self::combine(&self.s, q)
    }

    pub fn r_prime(&self, q: &Vector14) -> Vector3<f64> {
        Self::combine(&self.ds, q)
    }

    pub fn r_dprime(&self, q: &Vector14) -> Vector3<f64> {
        Self::combine(&self.dds, q)
    }

    pub fn theta(&self, q: &Vector14) -> f64 {
        self.sbar[0] * q[THETA_I] + self.sbar[1] * q[THETA_J]
    }

    pub fn theta_prime(&self, q: &Vector14) -> f64 {
        self.dsbar[0] * q[THETA_I] + self.dsbar[1] * q[THETA_J]
    }
}

pub fn shape_eval(x: f64, l: f64) -> Result<ShapeEval> {
    ShapeEval::at(x, l)
}

/// Global position of a section point: centre-line plus `R h`.
pub fn position_field(q: &Vector14, x: f64, l: f64, p: &CrossSectionPoint, material: &FrameTriad) -> Result<Vector3<f64>> {
    let sh = ShapeEval::at(x, l)?;
    Ok(sh.position(q) + material.a2 * p.y_bar + material.a3 * p.z_bar)
}

/// Closed-form consistent mass matrix.
pub fn mass_matrix(spec: &BeamSpec) -> Matrix14 {
    let l = spec.length;
    let ca = spec.rho * spec.area * l / 420.0;
    let cj = spec.rho * spec.j_polar * l / 420.0;
    let v = [
        [156.0, 22.0 * l, 54.0, -13.0 * l],
        [22.0 * l, 4.0 * l * l, 13.0 * l, -3.0 * l * l],
        [54.0, 13.0 * l, 156.0, -22.0 * l],
        [-13.0 * l, -3.0 * l * l, -22.0 * l, 4.0 * l * l],
    ];
    let mut m = Matrix14::zeros();
    for (a, &oa) in VECTOR_BLOCKS.iter().enumerate() {
        for (b, &ob) in VECTOR_BLOCKS.iter().enumerate() {
            for k in 0..3 {
                m[(oa + k, ob + k)] = ca * v[a][b];
            }
        }
    }
    m[(THETA_I, THETA_I)] = 140.0 * cj;
    m[(THETA_J, THETA_J)] = 140.0 * cj;
    m[(THETA_I, THETA_J)] = 70.0 * cj;
    m[(THETA_J, THETA_I)] = 70.0 * cj;
    m
}

/// Generalized gravity force (the load itself, pointing along `g`).
pub fn gravity_force(spec: &BeamSpec, g: &Vector3<f64>) -> Vector14 {
    let l = spec.length;
    let c = spec.rho * spec.area * l / 12.0;
    let mut f = Vector14::zeros();
    for (b, k) in [6.0, l, 6.0, -l].into_iter().enumerate() {
        f.fixed_rows_mut::<3>(VECTOR_BLOCKS[b]).copy_from(&(g * (c * k)));
    }
    f
}

pub fn kinetic_energy(q_dot: &Vector14, spec: &BeamSpec) -> f64 {
    0.5 * q_dot.dot(&(mass_matrix(spec) * q_dot))
}

/// Strain energy per unit parameter length at one point.
pub fn energy_density(mode: DeformationMode, spec: &BeamSpec, r: &ReferenceStrain, s: &StrainState) -> f64 {
    let l0 = r.stretch;
    let k1 = (s.gamma1 - r.gamma1) / l0;
    let k2 = (s.gamma2 - r.gamma2) / l0;
    let tw = (s.tau_m - r.tau) / l0;
    let (ea, eiz, eiy, gj) = (spec.e * spec.area, spec.e * spec.i_z, spec.e * spec.i_y, spec.g * spec.j_t);
    match mode {
        DeformationMode::Small => {
            let e = (s.stretch - l0) / l0;
            0.5 * l0 * (ea * e * e + eiz * k1 * k1 + eiy * k2 * k2 + gj * tw * tw)
        }
        DeformationMode::Large => {
            let st = s.stretch / l0;
            let eb = st * st - 1.0;
            let bend = 3.0 * st * st - 1.0;
            l0 * (ea / 8.0 * eb * eb
                + 0.25 * (eiz * k1 * k1 + eiy * k2 * k2) * bend
                + 0.5 * gj * tw * tw
                + 0.25 * spec.e * spec.j_t * tw * tw * eb)
        }
    }
}

/// Partial derivatives of `energy_density` with respect to `(|r'|, gamma1, gamma2, tau_m)`.
pub fn energy_density_gradient(mode: DeformationMode, spec: &BeamSpec, r: &ReferenceStrain, s: &StrainState) -> [f64; 4] {
    let l0 = r.stretch;
    let k1 = (s.gamma1 - r.gamma1) / l0;
    let k2 = (s.gamma2 - r.gamma2) / l0;
    let tw = (s.tau_m - r.tau) / l0;
    let (ea, eiz, eiy, gj) = (spec.e * spec.area, spec.e * spec.i_z, spec.e * spec.i_y, spec.g * spec.j_t);
    match mode {
        DeformationMode::Small => [ea * (s.stretch - l0) / l0, eiz * k1, eiy * k2, gj * tw],
        DeformationMode::Large => {
            let st = s.stretch / l0;
            let eb = st * st - 1.0;
            let bend = 3.0 * st * st - 1.0;
            let ejt = spec.e * spec.j_t;
            [
                st * (0.5 * ea * eb + 1.5 * (eiz * k1 * k1 + eiy * k2 * k2) + 0.5 * ejt * tw * tw),
                0.5 * eiz * k1 * bend,
                0.5 * eiy * k2 * bend,
                gj * tw + 0.5 * ejt * tw * eb,
            ]
        }
    }
}

/// A single free element with its own quadrature, stress-free state and stored director.
#[derive(Debug, Clone, PartialEq)]
pub struct Ancf14Element {
    pub spec: BeamSpec,
    /// Rule on `[0, 1]`, scaled by the element length on use.
    pub unit_rule: QuadratureRule,
    pub reference: Vec<ReferenceStrain>,
    /// Director triad at node i, treated as independent of `q`.
    pub director: FrameTriad,
}

impl Ancf14Element {
    pub fn new(spec: BeamSpec) -> Result<Self> {
        spec.validate()?;
        let unit_rule = QuadratureRule::gauss_legendre(QuadratureRule::DEFAULT_ORDER, 1.0)?;
        let reference = vec![ReferenceStrain::default(); unit_rule.order()];
        Ok(Self { spec, unit_rule, reference, director: FrameTriad::canonical() })
    }

    pub fn with_quadrature(mut self, order: usize) -> Result<Self> {
        self.unit_rule = QuadratureRule::gauss_legendre(order, 1.0)?;
        self.reference = vec![ReferenceStrain::default(); order];
        Ok(self)
    }

    pub fn with_director(mut self, director: FrameTriad) -> Self {
        self.director = director;
        self
    }

    /// Makes `q0` the stress-free configuration.
    pub fn with_reference_configuration(mut self, q0: &Vector14) -> Result<Self> {
        let out = self.evaluate(q0, ChainRequest { strains: true, ..Default::default() })?;
        self.reference = out.strains[0]
            .iter()
            .map(|s| ReferenceStrain { stretch: s.stretch, gamma1: s.gamma1, gamma2: s.gamma2, tau: s.tau_m })
            .collect();
        Ok(self)
    }

    pub fn quadrature(&self) -> QuadratureRule {
        self.unit_rule.rescaled(self.spec.length)
    }

    fn evaluate(&self, q: &Vector14, req: ChainRequest) -> Result<crate::chain::ChainOutput> {
        let el = [ChainElement { spec: &self.spec, reference: &self.reference }];
        evaluate_chain(&el, &self.unit_rule, &self.director, q.as_slice(), &req)
    }

    pub fn elastic_energy(&self, q: &Vector14, mode: DeformationMode) -> Result<f64> {
        Ok(self.evaluate(q, ChainRequest { energy: Some(mode), ..Default::default() })?.energy)
    }

    pub fn internal_force(&self, q: &Vector14, mode: DeformationMode) -> Result<Vector14> {
        let out = self.evaluate(q, ChainRequest { energy: Some(mode), force: true, ..Default::default() })?;
        Ok(Vector14::from_column_slice(out.force.as_slice()))
    }

    /// Strain states at the quadrature points.
    pub fn strain_states(&self, q: &Vector14) -> Result<Vec<StrainState>> {
        Ok(self.evaluate(q, ChainRequest { strains: true, ..Default::default() })?.strains.remove(0))
    }

    /// Bishop frames and sensitivities at arbitrary stations (first station must be 0).
    pub fn bishop_frames(&self, q: &Vector14, stations: &[f64]) -> Result<Vec<(FrameTriad, FrameSensitivity)>> {
        crate::chain::element_stations(&self.spec, &self.director, q, stations)
    }

    /// Strain measures and their sensitivities at station `x`.
    pub fn strain_measures(&self, q: &Vector14, x: f64) -> Result<StrainMeasures> {
        crate::chain::strain_measures_at(&self.spec, &self.director, q, x)
    }

    pub fn mass_matrix(&self) -> Matrix14 {
        mass_matrix(&self.spec)
    }
}

pub fn elastic_energy_small(q: &Vector14, element: &Ancf14Element) -> Result<f64> {
    element.elastic_energy(q, DeformationMode::Small)
}

pub fn elastic_energy_large(q: &Vector14, element: &Ancf14Element) -> Result<f64> {
    element.elastic_energy(q, DeformationMode::Large)
}

pub fn internal_force_small(q: &Vector14, element: &Ancf14Element) -> Result<Vector14> {
    element.internal_force(q, DeformationMode::Small)
}

pub fn internal_force_large(q: &Vector14, element: &Ancf14Element) -> Result<Vector14> {
    element.internal_force(q, DeformationMode::Large)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::material_frame;
    use approx::assert_relative_eq;
    use nalgebra::{Rotation3, Unit};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn spec() -> BeamSpec {
        BeamSpec::new(2.0e11, 0.3, 7800.0, CrossSection::rectangle(0.02, 0.05), 0.8)
    }

    fn random_spec(rng: &mut StdRng) -> BeamSpec {
        let section = CrossSection::rectangle(rng.gen_range(1e-3..0.1), rng.gen_range(1e-3..0.1));
        BeamSpec::new(rng.gen_range(1e9..3e11), rng.gen_range(0.0..0.45), rng.gen_range(1e3..1e4), section, rng.gen_range(0.05..3.0))
    }

    fn perturbed(rng: &mut StdRng, l: f64, amp: f64) -> Vector14 {
        let mut q = NodalState::straight(Vector3::zeros(), Vector3::x(), l, 0.0).q;
        for i in 0..14 {
            let scale = if VECTOR_BLOCKS.contains(&i) || VECTOR_BLOCKS.contains(&(i.wrapping_sub(1))) || VECTOR_BLOCKS.contains(&(i.wrapping_sub(2))) {
                if (3..6).contains(&i) || (10..13).contains(&i) { 1.0 } else { l }
            } else {
                1.0
            };
            q[i] += amp * scale * rng.gen_range(-1.0..1.0);
        }
        q
    }

    fn rel_err_vec(a: &[f64], b: &[f64]) -> f64 {
        let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
    }

    fn fd_gradient(f: impl Fn(&Vector14) -> f64, q: &Vector14) -> Vector14 {
        let mut g = Vector14::zeros();
        for i in 0..14 {
            let h = 1e-6 * q[i].abs().max(1.0);
            let (mut a, mut b) = (*q, *q);
            a[i] += h;
            b[i] -= h;
            g[i] = (f(&a) - f(&b)) / (2.0 * h);
        }
        g
    }

    #[test]
    fn shape_end_conditions() {
        let l = 1.7;
        let a = ShapeEval::at(0.0, l).unwrap();
        assert_eq!((a.s, a.sbar), ([1.0, 0.0, 0.0, 0.0], [1.0, 0.0]));
        let b = ShapeEval::at(l, l).unwrap();
        assert_eq!((b.s, b.sbar), ([0.0, 0.0, 1.0, 0.0], [0.0, 1.0]));
        let m = ShapeEval::at(l / 2.0, l).unwrap();
        assert_relative_eq!(m.s[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.s[2], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.s[1], l / 8.0, epsilon = 1e-15);
        assert_relative_eq!(m.s[3], -l / 8.0, epsilon = 1e-15);
        assert!(matches!(ShapeEval::at(1.01 * l, l), Err(Error::Domain { .. })));
        assert!(ShapeEval::at(-0.1, l).is_err());
    }

    #[test]
    fn shape_matrices_pick_nodes() {
        let q = Vector14::from_fn(|i, _| i as f64 + 1.0);
        let a = ShapeEval::at(0.0, 2.0).unwrap();
        assert_eq!(a.s_matrix() * q, block(&q, 0));
        assert_eq!(a.s_prime() * q, block(&q, 1));
        assert_eq!((a.sbar() * q)[0], q[THETA_I]);
        let b = ShapeEval::at(2.0, 2.0).unwrap();
        assert_eq!(b.s_matrix() * q, block(&q, 2));
        assert_eq!(b.s_prime() * q, block(&q, 3));
        assert_eq!((b.sbar() * q)[0], q[THETA_J]);
    }

    #[test]
    fn shape_derivatives_match_finite_differences() {
        let l = 0.9;
        for &x in &[0.1, 0.33, 0.6, 0.85] {
            let h = 1e-6;
            let (a, b, c) = (ShapeEval::at(x - h, l).unwrap(), ShapeEval::at(x, l).unwrap(), ShapeEval::at(x + h, l).unwrap());
            for k in 0..4 {
                assert_relative_eq!((c.s[k] - a.s[k]) / (2.0 * h), b.ds[k], epsilon = 1e-8);
                assert_relative_eq!((c.ds[k] - a.ds[k]) / (2.0 * h), b.dds[k], epsilon = 1e-6);
            }
            assert_relative_eq!(b.s[0] + b.s[2], 1.0, epsilon = 1e-15);
            assert_relative_eq!((c.sbar[1] - a.sbar[1]) / (2.0 * h), b.dsbar[1], epsilon = 1e-8);
        }
    }

    #[test]
    fn position_field_examples() {
        let l = 2.0;
        let q = NodalState::straight(Vector3::zeros(), Vector3::x(), l, 0.0).q;
        let p = CrossSectionPoint { y_bar: 0.1, z_bar: -0.2 };
        let f = FrameTriad::canonical();
        let x = 0.7;
        assert_relative_eq!(position_field(&q, x, l, &CrossSectionPoint::default(), &f).unwrap(), Vector3::new(x, 0.0, 0.0));
        assert_relative_eq!(position_field(&q, x, l, &p, &f).unwrap(), Vector3::new(x, 0.1, -0.2), epsilon = 1e-15);
        let m = material_frame(&f, std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(position_field(&q, x, l, &p, &m).unwrap(), Vector3::new(x, 0.2, 0.1), epsilon = 1e-15);
    }

    #[test]
    fn mass_matrix_matches_quadrature_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let s = random_spec(&mut rng);
            let rule = QuadratureRule::gauss_legendre(10, s.length).unwrap();
            let mut oracle = Matrix14::zeros();
            for &(x, w) in &rule.points {
                let sh = ShapeEval::at(x, s.length).unwrap();
                let sm = sh.s_matrix();
                let sb = sh.sbar();
                oracle += (sm.transpose() * sm * (s.rho * s.area) + sb.transpose() * sb * (s.rho * s.j_polar)) * w;
            }
            let m = mass_matrix(&s);
            assert!((m - oracle).amax() <= 1e-12 * oracle.amax());
        }
    }

    #[test]
    fn mass_matrix_entries_and_definiteness() {
        let s = spec();
        let m = mass_matrix(&s);
        assert_relative_eq!(m[(0, 0)], 156.0 * s.rho * s.area * s.length / 420.0, max_relative = 1e-15);
        assert_relative_eq!(m[(THETA_I, THETA_J)], 70.0 * s.rho * s.j_polar * s.length / 420.0, max_relative = 1e-15);
        assert_eq!(m, m.transpose());
        assert!(m.symmetric_eigenvalues().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn gravity_force_examples() {
        let s = spec();
        let g = Vector3::new(0.0, 0.0, -9.81);
        let f = gravity_force(&s, &g);
        let half = s.rho * s.area * s.length * 0.5;
        assert_relative_eq!(block(&f, 0), g * half, max_relative = 1e-14);
        assert_eq!((f[THETA_I], f[THETA_J]), (0.0, 0.0));
        let rule = QuadratureRule::gauss_legendre(6, s.length).unwrap();
        let mut oracle = Vector14::zeros();
        for &(x, w) in &rule.points {
            oracle += ShapeEval::at(x, s.length).unwrap().s_matrix().transpose() * g * (s.rho * s.area * w);
        }
        assert!((f - oracle).amax() <= 1e-12 * oracle.amax());
    }

    #[test]
    fn kinetic_energy_examples() {
        let s = spec();
        assert_eq!(kinetic_energy(&Vector14::zeros(), &s), 0.0);
        let v = Vector3::new(1.0, -2.0, 0.5);
        let qd = pack(&v, &Vector3::zeros(), 0.0, &v, &Vector3::zeros(), 0.0);
        assert_relative_eq!(kinetic_energy(&qd, &s), 0.5 * s.rho * s.area * s.length * v.norm_squared(), max_relative = 1e-14);
        let w = 3.0;
        let qd = pack(&Vector3::zeros(), &Vector3::zeros(), w, &Vector3::zeros(), &Vector3::zeros(), w);
        assert_relative_eq!(kinetic_energy(&qd, &s), 0.5 * s.rho * s.j_polar * s.length * w * w, max_relative = 1e-14);
    }

    #[test]
    fn closed_form_energies() {
        let s = spec();
        let el = Ancf14Element::new(s).unwrap();
        let l = s.length;
        let q0 = NodalState::straight(Vector3::zeros(), Vector3::x(), l, 0.0).q;
        for mode in [DeformationMode::Small, DeformationMode::Large] {
            assert!(el.elastic_energy(&q0, mode).unwrap().abs() < 1e-20);
            assert!(el.internal_force(&q0, mode).unwrap().amax() < 1e-6);
        }
        let phi = 0.3;
        let mut qt = q0;
        qt[THETA_J] = phi;
        let gj = s.g * s.j_t;
        for mode in [DeformationMode::Small, DeformationMode::Large] {
            assert_relative_eq!(el.elastic_energy(&qt, mode).unwrap(), gj * phi * phi / (2.0 * l), max_relative = 1e-12);
            let f = el.internal_force(&qt, mode).unwrap();
            assert_relative_eq!(f[THETA_J], gj * phi / l, max_relative = 1e-12);
            if mode == DeformationMode::Small {
                assert!(block(&f, 0).amax() < 1e-9 * gj && block(&f, 2).amax() < 1e-9 * gj);
            }
        }
        let alpha = 1.01;
        let d = Vector3::x() * alpha;
        let qs = pack(&Vector3::zeros(), &d, 0.0, &(Vector3::x() * alpha * l), &d, 0.0);
        let ea = s.e * s.area;
        assert_relative_eq!(el.elastic_energy(&qs, DeformationMode::Small).unwrap(), ea * l * (alpha - 1.0f64).powi(2) / 2.0, max_relative = 1e-10);
        assert_relative_eq!(
            el.elastic_energy(&qs, DeformationMode::Large).unwrap(),
            ea * l / 8.0 * (alpha * alpha - 1.0f64).powi(2),
            max_relative = 1e-10
        );
        for st in el.strain_states(&qs).unwrap() {
            assert_relative_eq!(st.stretch, alpha, max_relative = 1e-14);
            assert_eq!(st.eps_bar, st.stretch * st.stretch - 1.0);
        }
    }

    #[test]
    fn forces_match_energy_gradients() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..20 {
            let s = random_spec(&mut rng);
            let el = Ancf14Element::new(s).unwrap();
            let q = perturbed(&mut rng, s.length, 0.1);
            for mode in [DeformationMode::Small, DeformationMode::Large] {
                let f = el.internal_force(&q, mode).unwrap();
                let g = fd_gradient(|q| el.elastic_energy(q, mode).unwrap(), &q);
                let e = rel_err_vec(f.as_slice(), g.as_slice());
                assert!(e < 1e-6, "{mode:?}: rel err {e:e}");
            }
        }
    }

    #[test]
    fn strain_sensitivities_match_finite_differences() {
        let mut rng = StdRng::seed_from_u64(9);
        let s = spec();
        let el = Ancf14Element::new(s).unwrap();
        for _ in 0..20 {
            let q = perturbed(&mut rng, s.length, 0.1);
            let x = rng.gen_range(0.0..s.length);
            let sm = el.strain_measures(&q, x).unwrap();
            let pick = |q: &Vector14, k: usize| {
                let st = el.strain_measures(q, x).unwrap().state;
                [st.stretch, st.gamma1, st.gamma2, st.tau_m][k]
            };
            for (k, row) in [&sm.d_stretch, &sm.d_gamma1, &sm.d_gamma2, &sm.d_tau].into_iter().enumerate() {
                let g = fd_gradient(|q| pick(q, k), &q);
                let e = rel_err_vec(row.as_slice(), g.as_slice());
                assert!(e < 1e-5, "measure {k}: {e:e}");
            }
        }
    }

    #[test]
    fn straight_element_twist_dofs_leave_directors_fixed() {
        let s = spec();
        let el = Ancf14Element::new(s).unwrap();
        let mut q = NodalState::straight(Vector3::zeros(), Vector3::x(), s.length, 0.0).q;
        q[THETA_I] = 0.4;
        q[THETA_J] = -0.2;
        for (f, sens) in el.bishop_frames(&q, &[0.0, 0.2, 0.5, 0.8]).unwrap() {
            assert_eq!(f, FrameTriad::canonical());
            for m in [&sens.d_t, &sens.d_a2, &sens.d_a3] {
                assert_eq!(m.column(THETA_I).amax(), 0.0);
                assert_eq!(m.column(THETA_J).amax(), 0.0);
            }
        }
    }

    #[test]
    fn rigid_motion_has_zero_energy() {
        let mut rng = StdRng::seed_from_u64(21);
        let s = spec();
        let l = s.length;
        let q0 = NodalState::straight(Vector3::zeros(), Vector3::x(), l, 0.0).q;
        let theta = 0.37;
        for _ in 0..50 {
            let axis = Unit::new_normalize(Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let r = Rotation3::from_axis_angle(&axis, rng.gen_range(-3.1..3.1)).into_inner();
            let shift = Vector3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let q = pack(&(r * block(&q0, 0) + shift), &(r * block(&q0, 1)), theta, &(r * block(&q0, 2) + shift), &(r * block(&q0, 3)), theta);
            let el = Ancf14Element::new(s).unwrap().with_director(FrameTriad::canonical().rotated(&r));
            for mode in [DeformationMode::Small, DeformationMode::Large] {
                let u = el.elastic_energy(&q, mode).unwrap();
                assert!(u.abs() < 1e-10 * s.e * s.area * l, "{u:e}");
            }
            let st = el.strain_measures(&q, 0.3).unwrap().state;
            assert_relative_eq!(st.stretch, 1.0, epsilon = 1e-14);
            assert!(st.gamma1.abs() < 1e-12 && st.gamma2.abs() < 1e-12 && st.tau_m == 0.0);
        }
    }

    #[test]
    fn forces_rotate_covariantly() {
        let mut rng = StdRng::seed_from_u64(4);
        let s = spec();
        for _ in 0..5 {
            let q = perturbed(&mut rng, s.length, 0.05);
            let axis = Unit::new_normalize(Vector3::new(0.3, -0.8, 0.5));
            let r = Rotation3::from_axis_angle(&axis, rng.gen_range(-3.0..3.0)).into_inner();
            let mut qr = q;
            for (b, &row) in VECTOR_BLOCKS.iter().enumerate() {
                qr.fixed_rows_mut::<3>(row).copy_from(&(r * block(&q, b)));
            }
            let el = Ancf14Element::new(s).unwrap();
            let elr = el.clone().with_director(FrameTriad::canonical().rotated(&r));
            let f = el.internal_force(&q, DeformationMode::Large).unwrap();
            let fr = elr.internal_force(&qr, DeformationMode::Large).unwrap();
            assert_relative_eq!(
                el.elastic_energy(&q, DeformationMode::Large).unwrap(),
                elr.elastic_energy(&qr, DeformationMode::Large).unwrap(),
                max_relative = 1e-9
            );
            for b in 0..4 {
                assert!((r * block(&f, b) - block(&fr, b)).amax() < 1e-8 * f.amax());
            }
            assert!((f[THETA_J] - fr[THETA_J]).abs() < 1e-8 * f.amax());
        }
    }

    #[test]
    fn small_and_large_agree_for_tiny_strains() {
        let mut rng = StdRng::seed_from_u64(8);
        let s = spec();
        let el = Ancf14Element::new(s).unwrap();
        for _ in 0..10 {
            let q = perturbed(&mut rng, s.length, 2e-5);
            let us = el.elastic_energy(&q, DeformationMode::Small).unwrap();
            let ul = el.elastic_energy(&q, DeformationMode::Large).unwrap();
            assert!(((us - ul) / us).abs() < 1e-3);
        }
    }

    #[test]
    fn quadrature_orders_agree_on_smooth_states() {
        let mut rng = StdRng::seed_from_u64(12);
        let s = spec();
        let e5 = Ancf14Element::new(s).unwrap();
        let e7 = Ancf14Element::new(s).unwrap().with_quadrature(7).unwrap();
        for _ in 0..10 {
            let q = perturbed(&mut rng, s.length, 1e-3);
            for mode in [DeformationMode::Small, DeformationMode::Large] {
                let (a, b) = (e5.elastic_energy(&q, mode).unwrap(), e7.elastic_energy(&q, mode).unwrap());
                assert!(((a - b) / b).abs() < 1e-8, "{mode:?} {a} {b}");
            }
        }
    }

    #[test]
    fn mechanical_twist_matches_numerical_frame_rotation() {
        let mut rng = StdRng::seed_from_u64(13);
        let s = spec();
        let el = Ancf14Element::new(s).unwrap();
        let q = perturbed(&mut rng, s.length, 0.1);
        let x = 0.4;
        let errs: Vec<f64> = [1e-2, 5e-3].iter().map(|&dx| {
            let st = [x - dx, x, x + dx];
            let f = el.bishop_frames(&q, &[0.0, st[0], st[1], st[2]]).unwrap();
            let sh: Vec<_> = st.iter().map(|&x| ShapeEval::at(x, s.length).unwrap()).collect();
            let m: Vec<_> = (0..3).map(|k| material_frame(&f[k + 1].0, sh[k].theta(&q))).collect();
            let num = crate::frame::numerical_twist_rate(&m[0], &m[1], &m[2], dx);
            (num - sh[1].theta_prime(&q)).abs()
        }).collect();
        assert!(errs[1] < errs[0] / 3.0, "{errs:?}");
        assert!(errs[1] < 1e-4);
    }

    #[test]
    fn spec_validation() {
        assert!(spec().validate().is_ok());
        let mut bad = spec();
        bad.i_yz = 1e-9;
        assert!(bad.validate().is_err());
        let mut bad = spec();
        bad.j_polar = bad.i_y * 0.5;
        assert!(bad.validate().is_err());
        let mut bad = spec();
        bad.length = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn degenerate_tangent_detected() {
        let el = Ancf14Element::new(spec()).unwrap();
        let q = Vector14::zeros();
        let r = el.elastic_energy(&q, DeformationMode::Small);
        assert!(matches!(r, Err(Error::Element { index: 0, .. })), "{r:?}");
    }
}
