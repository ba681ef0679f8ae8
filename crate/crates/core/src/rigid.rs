//! Rigid bodies parameterized by position and a scalar-first quaternion.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, SMatrix, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rigid body with its centre of mass as reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidBody {
    pub mass: f64,
    /// Inertia tensor about the centre of mass in body axes.
    pub inertia: Matrix3<f64>,
    pub position: Vector3<f64>,
    /// Unit quaternion `(q0, q1, q2, q3)`, scalar first.
    pub orientation: Vector4<f64>,
    #[serde(default)]
    pub velocity: Vector3<f64>,
    /// Angular velocity in body axes.
    #[serde(default)]
    pub angular_velocity: Vector3<f64>,
}

impl RigidBody {
    pub fn new(mass: f64, inertia: Matrix3<f64>) -> Self {
        Self {
            mass,
            inertia,
            position: Vector3::zeros(),
            orientation: Vector4::new(1.0, 0.0, 0.0, 0.0),
            velocity: Vector3::zeros(),
            angular_velocity: Vector3::zeros(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::InvalidInput(format!("rigid body mass {} must be positive", self.mass)));
        }
        if (self.inertia - self.inertia.transpose()).amax() > 1e-12 * self.inertia.amax() {
            return Err(Error::InvalidInput("rigid body inertia must be symmetric".into()));
        }
        if !self.inertia.symmetric_eigenvalues().iter().all(|&v| v > 0.0) {
            return Err(Error::InvalidInput("rigid body inertia must be positive definite".into()));
        }
        if (self.orientation.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("rigid body quaternion must have unit norm".into()));
        }
        Ok(())
    }

    /// Generalized velocity `(v, Q_dot)`.
    pub fn coordinate_rates(&self) -> (Vector3<f64>, Vector4<f64>) {
        (self.velocity, 0.5 * g_matrix(&self.orientation).transpose() * self.angular_velocity)
    }
}

/// `G(Q)` with body angular velocity `omega = 2 G(Q) Q_dot`.
pub fn g_matrix(q: &Vector4<f64>) -> Matrix3x4<f64> {
    let (q0, q1, q2, q3) = (q[0], q[1], q[2], q[3]);
    Matrix3x4::new(-q1, q0, q3, -q2, -q2, -q3, q0, q1, -q3, q2, -q1, q0)
}

/// Rotation matrix of a (unit) quaternion; quadratic in `q`.
pub fn rotation(q: &Vector4<f64>) -> Matrix3<f64> {
    let v = Vector3::new(q[1], q[2], q[3]);
    Matrix3::identity() * (q[0] * q[0] - v.dot(&v)) + v * v.transpose() * 2.0 + v.cross_matrix() * (2.0 * q[0])
}

/// `d(R(q) w)/dq`.
pub fn rotation_derivative(q: &Vector4<f64>, w: &Vector3<f64>) -> Matrix3x4<f64> {
    let v = Vector3::new(q[1], q[2], q[3]);
    let mut m = Matrix3x4::zeros();
    m.set_column(0, &((w * q[0] + v.cross(w)) * 2.0));
    let dv = (Matrix3::identity() * v.dot(w) + v * w.transpose() - w * v.transpose() - w.cross_matrix() * q[0]) * 2.0;
    m.fixed_view_mut::<3, 3>(0, 1).copy_from(&dv);
    m
}

/// Quaternion of a rotation matrix (Shepperd's method).
pub fn quaternion_from_rotation(r: &Matrix3<f64>) -> Vector4<f64> {
    let uq = nalgebra::UnitQuaternion::from_matrix(r);
    let q = uq.quaternion();
    let out = Vector4::new(q.w, q.i, q.j, q.k);
    if out[0] < 0.0 {
        -out
    } else {
        out
    }
}

/// Configuration-dependent 4x4 rotational mass `4 G^T J G`.
pub fn quaternion_mass(q: &Vector4<f64>, inertia: &Matrix3<f64>) -> Matrix4<f64> {
    let g = g_matrix(q);
    g.transpose() * inertia * g * 4.0
}

/// `dT/dQ` at fixed `Q_dot` for `T = 2 (G Q_dot)^T J (G Q_dot)`.
pub fn kinetic_gradient(q: &Vector4<f64>, q_dot: &Vector4<f64>, inertia: &Matrix3<f64>) -> Vector4<f64> {
    let w = inertia * (g_matrix(q) * q_dot);
    Vector4::from_fn(|i, _| 4.0 * (g_matrix(&Vector4::ith(i, 1.0)) * q_dot).dot(&w))
}

pub fn rotational_kinetic_energy(q: &Vector4<f64>, q_dot: &Vector4<f64>, inertia: &Matrix3<f64>) -> f64 {
    let w = g_matrix(q) * q_dot * 2.0;
    0.5 * w.dot(&(inertia * w))
}

pub type Matrix7 = SMatrix<f64, 7, 7>;
