//! Serret-Frenet, Bishop and material frames along a spatial curve, with
//! sensitivities of the Bishop directors with respect to generalized coordinates.

use nalgebra::{Matrix3, Matrix3xX, RowDVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense `3 x n` derivative block (one column per generalized coordinate).
pub type Jac3 = Matrix3xX<f64>;
/// Dense `1 x n` derivative row.
pub type JacRow = RowDVector<f64>;

/// Below this `|t_prev x t|` the directors are carried over unchanged.
pub const EPS_PARALLEL: f64 = 1e-12;
/// Serret-Frenet singularity threshold on `|r' x r''|`.
pub const EPS_SF: f64 = 1e-10;
/// Tangents with `t_prev . t <= -1 + EPS_ANTIPODAL` have no unique minimal rotation.
pub const EPS_ANTIPODAL: f64 = 1e-9;
/// Smallest admissible `|r'|`.
pub const EPS_STRETCH: f64 = 1e-9;
/// `sin(phi)` above which the axis-angle derivative is used in `DerivativeForm::Auto`.
const AXIS_ANGLE_MIN_SIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub x: f64,
    pub r_prime: Vector3<f64>,
    pub r_dprime: Vector3<f64>,
}

impl CurveSample {
    pub fn new(x: f64, r_prime: Vector3<f64>, r_dprime: Vector3<f64>) -> Self {
        Self { x, r_prime, r_dprime }
    }

    pub fn tangent(&self) -> Result<Vector3<f64>> {
        unit_tangent(&self.r_prime, self.x)
    }
}

/// Right-handed orthonormal triad `{t, a2, a3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTriad {
    pub t: Vector3<f64>,
    pub a2: Vector3<f64>,
    pub a3: Vector3<f64>,
}

impl FrameTriad {
    pub fn new(t: Vector3<f64>, a2: Vector3<f64>, a3: Vector3<f64>) -> Self {
        Self { t, a2, a3 }
    }

    /// The global basis `(X, Y, Z)`.
    pub fn canonical() -> Self {
        Self::new(Vector3::x(), Vector3::y(), Vector3::z())
    }

    /// Triad with the given tangent and `a2` taken from the global axis least aligned with it.
    pub fn from_tangent(t: &Vector3<f64>) -> Result<Self> {
        let t = unit_tangent(t, 0.0)?;
        let axis = (0..3)
            .min_by(|&i, &j| t[i].abs().total_cmp(&t[j].abs()))
            .map(|i| Vector3::ith(i, 1.0))
            .unwrap_or_else(Vector3::y);
        let a2 = (axis - t * t.dot(&axis)).normalize();
        Ok(Self::new(t, a2, t.cross(&a2)))
    }

    /// Triad with tangent `t` whose `a2` is the projection of `hint`.
    pub fn from_tangent_and_hint(t: &Vector3<f64>, hint: &Vector3<f64>) -> Result<Self> {
        let t = unit_tangent(t, 0.0)?;
        let p = hint - t * t.dot(hint);
        let n = p.norm();
        if n < 1e-8 * hint.norm().max(1.0) {
            return Err(Error::InvalidInput("director hint is parallel to the tangent".into()));
        }
        let a2 = p / n;
        Ok(Self::new(t, a2, t.cross(&a2)))
    }

    /// Columns `[t a2 a3]`.
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[self.t, self.a2, self.a3])
    }

    pub fn axis(&self, i: usize) -> Vector3<f64> {
        match i {
            0 => self.t,
            1 => self.a2,
            _ => self.a3,
        }
    }

    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        Self::new(r * self.t, r * self.a2, r * self.a3)
    }

    /// Largest violation of unit norm, orthogonality and `t x a2 = a3`.
    pub fn orthonormality_defect(&self) -> f64 {
        let norms = [self.t, self.a2, self.a3].map(|v| (v.norm() - 1.0).abs());
        let dots = [self.t.dot(&self.a2), self.t.dot(&self.a3), self.a2.dot(&self.a3)].map(f64::abs);
        let hand = (self.t.cross(&self.a2) - self.a3).amax();
        norms.into_iter().chain(dots).fold(hand, f64::max)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let defect = self.orthonormality_defect();
        if defect.is_finite() && defect <= tol {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("frame is not orthonormal (defect {defect:e})")))
        }
    }

    /// Modified Gram-Schmidt that keeps the direction of `t` exact.
    pub fn reorthonormalized(&self) -> Self {
        let t = self.t.normalize();
        let a2 = (self.a2 - t * t.dot(&self.a2)).normalize();
        Self::new(t, a2, t.cross(&a2))
    }
}

/// Darboux-vector components of an adapted frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DarbouxComponents {
    pub kappa1: f64,
    pub kappa2: f64,
    pub tau: f64,
}

/// Derivatives of a triad's axes with respect to the generalized coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSensitivity {
    pub d_t: Jac3,
    pub d_a2: Jac3,
    pub d_a3: Jac3,
}

impl FrameSensitivity {
    pub fn zeros(n: usize) -> Self {
        Self { d_t: Jac3::zeros(n), d_a2: Jac3::zeros(n), d_a3: Jac3::zeros(n) }
    }

    pub fn ncols(&self) -> usize {
        self.d_t.ncols()
    }

    pub fn axis(&self, i: usize) -> &Jac3 {
        match i {
            0 => &self.d_t,
            1 => &self.d_a2,
            _ => &self.d_a3,
        }
    }
}

/// Which analytic form differentiates the minimal rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeForm {
    /// Axis-angle form for well-separated tangents, cross-product form otherwise.
    #[default]
    Auto,
    /// Axis-angle form only; fails for nearly parallel tangents.
    AxisAngle,
    /// Cross-product form `w + c x w + c x (c x w) / (1 + d)` everywhere.
    Cross,
}

/// Minimal rotation carrying unit vector `from` onto unit vector `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimalRotation {
    from: Vector3<f64>,
    to: Vector3<f64>,
    c: Vector3<f64>,
    d: f64,
    sin_phi: f64,
}

impl MinimalRotation {
    /// `x_from`/`x_to` only label the error.
    pub fn between(from: &Vector3<f64>, to: &Vector3<f64>, x_from: f64, x_to: f64) -> Result<Self> {
        let c = from.cross(to);
        let d = from.dot(to);
        if d <= -1.0 + EPS_ANTIPODAL {
            return Err(Error::AntipodalTangent { from: x_from, to: x_to, dot: d });
        }
        Ok(Self { from: *from, to: *to, c, d, sin_phi: c.norm() })
    }

    pub fn is_parallel(&self) -> bool {
        self.sin_phi < EPS_PARALLEL
    }

    /// Rotation angle.
    pub fn angle(&self) -> f64 {
        self.sin_phi.atan2(self.d)
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_columns(&[
            self.apply(&Vector3::x()),
            self.apply(&Vector3::y()),
            self.apply(&Vector3::z()),
        ])
    }

    /// Rodrigues rotation of `w` about `from x to` by the angle between the vectors.
    pub fn apply(&self, w: &Vector3<f64>) -> Vector3<f64> {
        if self.is_parallel() {
            return *w;
        }
        let n = self.c / self.sin_phi;
        let phi = self.angle();
        let (s, c) = phi.sin_cos();
        w * c + n.cross(w) * s + n * n.dot(w) * (1.0 - c)
    }

    /// Derivative of `apply(w)` given derivatives of `w`, `from` and `to`.
    pub fn derivative(
        &self,
        w: &Vector3<f64>,
        dw: &Jac3,
        dfrom: &Jac3,
        dto: &Jac3,
        form: DerivativeForm,
        x: f64,
    ) -> Result<Jac3> {
        let dc = self.from.cross_matrix() * dto - self.to.cross_matrix() * dfrom;
        let dd = self.to.transpose() * dfrom + self.from.transpose() * dto;
        let use_axis_angle = match form {
            DerivativeForm::Cross => false,
            DerivativeForm::Auto => self.sin_phi >= AXIS_ANGLE_MIN_SIN,
            DerivativeForm::AxisAngle => {
                if 1.0 - self.d.abs() < 1e-10 {
                    return Err(Error::DerivativeSingularity { x, dot: self.d });
                }
                true
            }
        };
        if use_axis_angle {
            Ok(self.axis_angle_derivative(w, dw, &dc, &dd))
        } else {
            Ok(self.cross_derivative(w, dw, &dc, &dd))
        }
    }

    fn cross_derivative(&self, w: &Vector3<f64>, dw: &Jac3, dc: &Jac3, dd: &JacRow) -> Jac3 {
        let c = &self.c;
        let k = 1.0 / (1.0 + self.d);
        let cw = c.cross(w);
        let ccw = c.cross(&cw);
        let cx = c.cross_matrix();
        let d_cw = cx * dw - w.cross_matrix() * dc;
        let d_ccw = cx * &d_cw - cw.cross_matrix() * dc;
        dw + d_cw + d_ccw * k - ccw * dd * (k * k)
    }

    fn axis_angle_derivative(&self, w: &Vector3<f64>, dw: &Jac3, dc: &Jac3, dd: &JacRow) -> Jac3 {
        let s = self.sin_phi;
        let n = self.c / s;
        let (sp, cp) = self.angle().sin_cos();
        let dn = (Matrix3::identity() - n * n.transpose()) * dc / s;
        let dphi = dd * (-1.0 / (1.0 - self.d * self.d).sqrt());
        let nw = n.dot(w);
        let nxw = n.cross(w);
        let d_nw = w.transpose() * &dn + n.transpose() * dw;
        let mut out = dw * cp;
        out += (n.cross_matrix() * dw - w.cross_matrix() * &dn) * sp;
        out += (&dn * nw + n * d_nw) * (1.0 - cp);
        out += (nxw * cp - w * sp + n * (nw * sp)) * dphi;
        out
    }
}

/// `r' / |r'|`, failing for a collapsed tangent.
pub fn unit_tangent(r_prime: &Vector3<f64>, x: f64) -> Result<Vector3<f64>> {
    let rho = r_prime.norm();
    if rho.is_nan() || rho < EPS_STRETCH {
        return Err(Error::DegenerateTangent { x, stretch: rho });
    }
    Ok(r_prime / rho)
}

/// `dt/dq = (I - t t^T) dr'/dq / |r'|`.
pub fn tangent_sensitivity(r_prime: &Vector3<f64>, d_r_prime: &Jac3) -> Jac3 {
    let rho = r_prime.norm();
    let t = r_prime / rho;
    (Matrix3::identity() - t * t.transpose()) * d_r_prime / rho
}

/// Arclength-parameter derivative of the unit tangent, `t' = (I - t t^T) r'' / |r'|`.
pub fn tangent_prime(r_prime: &Vector3<f64>, r_dprime: &Vector3<f64>) -> Vector3<f64> {
    let rho = r_prime.norm();
    let t = r_prime / rho;
    (r_dprime - t * t.dot(r_dprime)) / rho
}

pub fn sf_frame(sample: &CurveSample) -> Result<FrameTriad> {
    let t = sample.tangent()?;
    let cross = sample.r_prime.cross(&sample.r_dprime);
    let cn = cross.norm();
    if cn <= EPS_SF {
        return Err(Error::InflectionPoint { x: sample.x, cross_norm: cn });
    }
    let b = cross / cn;
    Ok(FrameTriad::new(t, b.cross(&t), b))
}

/// Curvature and torsion; `r_tprime` is the third derivative.
pub fn sf_curvature_torsion(sample: &CurveSample, r_tprime: &Vector3<f64>) -> Result<(f64, f64)> {
    let rho = sample.tangent().map(|_| sample.r_prime.norm())?;
    let cross = sample.r_prime.cross(&sample.r_dprime);
    let cn = cross.norm();
    if cn <= EPS_SF {
        return Err(Error::InflectionPoint { x: sample.x, cross_norm: cn });
    }
    Ok((cn / rho.powi(3), cross.dot(r_tprime) / (cn * cn)))
}

/// One Bishop step: rotate the directors of `prev` onto the tangent `t`.
pub fn bishop_step(prev: &FrameTriad, t: &Vector3<f64>, x_prev: f64, x: f64) -> Result<(FrameTriad, MinimalRotation)> {
    let rot = MinimalRotation::between(&prev.t, t, x_prev, x)?;
    let next = FrameTriad::new(*t, rot.apply(&prev.a2), rot.apply(&prev.a3)).reorthonormalized();
    Ok((next, rot))
}

fn check_march_input(initial: &FrameTriad, stations: &[f64]) -> Result<()> {
    initial.validate(1e-9)?;
    if stations.iter().any(|x| !x.is_finite()) || stations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("stations must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Rotation-method Bishop frames at `stations`, starting from `initial`.
///
/// A stale `initial.t` is aligned to the first station's tangent by one minimal rotation.
pub fn bishop_march<F>(curve: F, initial: &FrameTriad, stations: &[f64]) -> Result<Vec<FrameTriad>>
where
    F: Fn(f64) -> CurveSample,
{
    check_march_input(initial, stations)?;
    let mut out = Vec::with_capacity(stations.len());
    let mut prev = *initial;
    let mut x_prev = stations.first().copied().unwrap_or(0.0);
    for &x in stations {
        let t = curve(x).tangent()?;
        let (next, _) = bishop_step(&prev, &t, x_prev, x)?;
        out.push(next);
        prev = next;
        x_prev = x;
    }
    Ok(out)
}

/// Bishop frames together with their sensitivities.
///
/// `d_curve(x)` returns `(dr'/dq, dr''/dq)`; the initial triad is q-independent.
pub fn bishop_march_with_sensitivities<F, D>(
    curve: F,
    d_curve: D,
    initial: &FrameTriad,
    stations: &[f64],
    form: DerivativeForm,
) -> Result<Vec<(FrameTriad, FrameSensitivity)>>
where
    F: Fn(f64) -> CurveSample,
    D: Fn(f64) -> (Jac3, Jac3),
{
    check_march_input(initial, stations)?;
    let mut out: Vec<(FrameTriad, FrameSensitivity)> = Vec::with_capacity(stations.len());
    let mut x_prev = stations.first().copied().unwrap_or(0.0);
    for &x in stations {
        let sample = curve(x);
        let t = sample.tangent()?;
        let (d_r1, _) = d_curve(x);
        let d_t = tangent_sensitivity(&sample.r_prime, &d_r1);
        let n = d_t.ncols();
        let zeros;
        let (prev, prev_sens) = match out.last() {
            Some((f, s)) => (f, s),
            None => {
                zeros = FrameSensitivity::zeros(n);
                (initial, &zeros)
            }
        };
        let (next, rot) = bishop_step(prev, &t, x_prev, x)?;
        let d_a2 = rot.derivative(&prev.a2, &prev_sens.d_a2, &prev_sens.d_t, &d_t, form, x)?;
        let d_a3 = rot.derivative(&prev.a3, &prev_sens.d_a3, &prev_sens.d_t, &d_t, form, x)?;
        out.push((next, FrameSensitivity { d_t, d_a2, d_a3 }));
        x_prev = x;
    }
    Ok(out)
}

pub fn bishop_sensitivities<F, D>(curve: F, d_curve: D, initial: &FrameTriad, stations: &[f64]) -> Result<Vec<FrameSensitivity>>
where
    F: Fn(f64) -> CurveSample,
    D: Fn(f64) -> (Jac3, Jac3),
{
    Ok(bishop_march_with_sensitivities(curve, d_curve, initial, stations, DerivativeForm::Auto)?
        .into_iter()
        .map(|(_, s)| s)
        .collect())
}

/// Bishop triad rotated about `t` by `theta`: `y = cos u + sin v`, `z = -sin u + cos v`.
pub fn material_frame(bishop: &FrameTriad, theta: f64) -> FrameTriad {
    let (s, c) = theta.sin_cos();
    FrameTriad::new(bishop.t, bishop.a2 * c + bishop.a3 * s, bishop.a3 * c - bishop.a2 * s)
}

/// Sensitivities of the material frame given Bishop sensitivities and `dtheta/dq`.
pub fn material_frame_sensitivity(
    bishop: &FrameTriad,
    sens: &FrameSensitivity,
    theta: f64,
    d_theta: &JacRow,
) -> FrameSensitivity {
    let (s, c) = theta.sin_cos();
    let m = material_frame(bishop, theta);
    FrameSensitivity {
        d_t: sens.d_t.clone(),
        d_a2: &sens.d_a2 * c + &sens.d_a3 * s + m.a3 * d_theta,
        d_a3: &sens.d_a3 * c - &sens.d_a2 * s - m.a2 * d_theta,
    }
}

/// Material curvatures `t'.y`, `t'.z` and mechanical twist `theta'`.
pub fn material_twist_curvatures(material: &FrameTriad, t_prime: &Vector3<f64>, theta_prime: f64) -> DarbouxComponents {
    DarbouxComponents { kappa1: t_prime.dot(&material.a2), kappa2: t_prime.dot(&material.a3), tau: theta_prime }
}

/// Central-difference estimate of `y'.z` from neighbouring material frames.
pub fn numerical_twist_rate(before: &FrameTriad, here: &FrameTriad, after: &FrameTriad, dx: f64) -> f64 {
    ((after.a2 - before.a2) / (2.0 * dx)).dot(&here.a3)
}
