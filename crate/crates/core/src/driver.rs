//! Scalar motion drivers evaluated at the drive parameter (time in dynamics,
//! load factor in statics).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Driver {
    Constant { value: f64 },
    /// `start + rate * s`.
    Linear { start: f64, rate: f64 },
    /// Angle of a shaft spun up in stages to `1.2 * omega` (integral of the piecewise speed profile).
    ShaftSpinUp { omega: f64 },
    /// `0.5 * pi * (1 - cos(pi s / period))`, held at `pi` after `s = period`.
    CrankHalfTurn { period: f64 },
}

impl Driver {
    pub fn value(&self, s: f64) -> f64 {
        match *self {
            Driver::Constant { value } => value,
            Driver::Linear { start, rate } => start + rate * s,
            Driver::ShaftSpinUp { omega } => shaft_angle(omega, s),
            Driver::CrankHalfTurn { period } => {
                let s = s.clamp(0.0, period);
                0.5 * PI * (1.0 - (PI * s / period).cos())
            }
        }
    }

    /// First derivative with respect to the drive parameter.
    pub fn rate(&self, s: f64) -> f64 {
        match *self {
            Driver::Constant { .. } => 0.0,
            Driver::Linear { rate, .. } => rate,
            Driver::ShaftSpinUp { omega } => shaft_speed(omega, s),
            Driver::CrankHalfTurn { period } => {
                if (0.0..=period).contains(&s) {
                    0.5 * PI * PI / period * (PI * s / period).sin()
                } else {
                    0.0
                }
            }
        }
    }
}

/// Piecewise spin-up speed profile.
pub fn shaft_speed(omega: f64, t: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else if t < 0.5 {
        0.4 * omega * (1.0 - (2.0 * PI * t).cos())
    } else if t < 1.0 {
        0.8 * omega
    } else if t < 1.25 {
        0.2 * omega * (5.0 - (4.0 * PI * (t - 1.0)).cos())
    } else {
        1.2 * omega
    }
}

/// Closed-form integral of `shaft_speed` from 0.
pub fn shaft_angle(omega: f64, t: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else if t < 0.5 {
        0.4 * omega * (t - (2.0 * PI * t).sin() / (2.0 * PI))
    } else if t < 1.0 {
        0.2 * omega + 0.8 * omega * (t - 0.5)
    } else if t < 1.25 {
        let u = t - 1.0;
        0.6 * omega + 0.2 * omega * (5.0 * u - (4.0 * PI * u).sin() / (4.0 * PI))
    } else {
        0.85 * omega + 1.2 * omega * (t - 1.25)
    }
}
