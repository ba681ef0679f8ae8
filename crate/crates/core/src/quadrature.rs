use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss-Legendre rule mapped to `[0, l]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    /// `(x, w)` pairs with `x` in metres and weights summing to `l`.
    pub points: Vec<(f64, f64)>,
}

impl QuadratureRule {
    pub const DEFAULT_ORDER: usize = 5;

    pub fn gauss_legendre(order: usize, length: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("quadrature order must be at least 1".into()));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("quadrature length {length} must be positive")));
        }
        let points = reference_rule(order)
            .into_iter()
            .map(|(xi, w)| (0.5 * length * (xi + 1.0), 0.5 * length * w))
            .collect();
        Ok(Self { points })
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn length(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    /// Same rule rescaled to a different element length.
    pub fn rescaled(&self, length: f64) -> Self {
        let s = length / self.length();
        Self { points: self.points.iter().map(|&(x, w)| (x * s, w * s)).collect() }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points.iter().map(|&(x, w)| w * f(x)).sum()
    }
}

/// Nodes and weights on `[-1, 1]`, ascending, from Newton iteration on `P_n`.
fn reference_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let dp = legendre(n, x).1;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = 0.0;
    }
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
