//! Two-atom families with explicit `Ψ` and `C`, and the Kemperman field.

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::ordering::GridFunction3;

fn interior(t: f64, tp: f64) -> bool {
    t > 0.0 && tp > 0.0
}

/// Diatomic family: `δ_r` on the axes, otherwise
/// `t'/(t+t') δ_{r−(1−ε)t} + t/(t+t') δ_{r+t'}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diatomic {
    pub eps: f64,
    pub r: f64,
}

impl Diatomic {
    pub fn new(eps: f64, r: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "diatomic family needs ε in (0,1) and finite r, got ε={eps}, r={r}"
            )));
        }
        Ok(Self { eps, r })
    }

    /// `ε t t' / (t + t')`, zero on the axes.
    fn drift(&self, t: f64, tp: f64) -> f64 {
        if interior(t, tp) {
            self.eps * t * tp / (t + tp)
        } else {
            0.0
        }
    }

    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        if !interior(t, tp) {
            return Measure::dirac(self.r);
        }
        let d = t + tp;
        Measure::from_atoms(&[
            (self.r - (1.0 - self.eps) * t, tp / d),
            (self.r + tp, t / d),
        ])
    }

    pub fn mean(&self, t: f64, tp: f64) -> f64 {
        self.r + self.drift(t, tp)
    }

    pub fn psi(&self, t: f64, tp: f64, x: f64) -> f64 {
        if !interior(t, tp) {
            return if x <= self.r { self.r } else { x };
        }
        if x <= self.r - (1.0 - self.eps) * t {
            self.r + self.drift(t, tp)
        } else if x <= self.r + tp {
            self.r + tp
        } else {
            x
        }
    }

    pub fn c(&self, t: f64, tp: f64, x: f64) -> f64 {
        if !interior(t, tp) {
            return (self.r - x).max(0.0);
        }
        if x < self.r - (1.0 - self.eps) * t {
            self.r - x + self.drift(t, tp)
        } else if x < self.r + tp {
            t * (tp + self.r - x) / (t + tp)
        } else {
            0.0
        }
    }

    pub fn moment_bound(&self) -> f64 {
        self.r.abs() + 2.0
    }
}

/// MRL family whose `C` is not TP2 in `(t, t')`: `δ_0` on the axes, otherwise
/// `(t+t')/(2t+t') δ_{−t} + t/(2t+t') δ_{t+t'}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example33;

impl Example33 {
    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        if !interior(t, tp) {
            return Measure::dirac(0.0);
        }
        let d = 2.0 * t + tp;
        Measure::from_atoms(&[(-t, (t + tp) / d), (t + tp, t / d)])
    }

    pub fn psi(&self, t: f64, tp: f64, x: f64) -> f64 {
        if !interior(t, tp) {
            return x.max(0.0);
        }
        if x <= -t {
            0.0
        } else if x <= t + tp {
            t + tp
        } else {
            x
        }
    }

    pub fn c(&self, t: f64, tp: f64, x: f64) -> f64 {
        if !interior(t, tp) {
            return (-x).max(0.0);
        }
        if x < -t {
            -x
        } else if x < t + tp {
            t * (t + tp - x) / (2.0 * t + tp)
        } else {
            0.0
        }
    }

    pub fn moment_bound(&self) -> f64 {
        2.0
    }
}

/// Kemperman's field on `[0,2]³`: `u` on `[0,1]×[0,1]×(1,2]`, `v` on
/// `(1,2]×(1,2]×[0,1]`, zero elsewhere.
pub fn kemperman_value(u: f64, v: f64, t: f64, tp: f64, x: f64) -> f64 {
    let low = |s: f64| (0.0..=1.0).contains(&s);
    let high = |s: f64| s > 1.0 && s <= 2.0;
    if low(t) && low(tp) && high(x) {
        u
    } else if high(t) && high(tp) && low(x) {
        v
    } else {
        0.0
    }
}

/// Samples the Kemperman field; each axis must lie in `[0,2]` and meet both
/// `[0,1]` and `(1,2]`.
pub fn kemperman_phi(u: f64, v: f64, t: Vec<f64>, tp: Vec<f64>, x: Vec<f64>) -> Result<GridFunction3> {
    if !(u > 0.0 && v > 0.0 && u.is_finite() && v.is_finite()) {
        return Err(Error::InvalidArgument(format!("u and v must be positive, got {u}, {v}")));
    }
    for (name, ax) in [("t", &t), ("tprime", &tp), ("x", &x)] {
        let inside = ax.iter().all(|&s| (0.0..=2.0).contains(&s));
        let low = ax.iter().any(|&s| s <= 1.0);
        let high = ax.iter().any(|&s| s > 1.0);
        if !(inside && low && high) {
            return Err(Error::Grid(format!(
                "axis {name} must lie in [0,2] and meet both [0,1] and (1,2]"
            )));
        }
    }
    GridFunction3::from_fn(t, tp, x, |a, b, c| kemperman_value(u, v, a, b, c))
}
