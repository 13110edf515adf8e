//! Convolution of a measure with a log-concave density.
//!
//! The output `ξ(dy) = (∫ f(y − z) μ(dz)) dy` is sampled on an equally
//! spaced grid covering the support of `μ` widened by the truncation window
//! of `f`, and stored as a single piecewise-linear density run. The
//! integral over each linear cell of `μ` is done by composite Simpson,
//! split at the kernel's peak.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Measure, Segment};
use crate::montecarlo::inverse_normal_cdf;

/// Largest admissible mass of `f` outside its truncation window.
pub const MAX_TAIL_MASS: f64 = 1e-8;

/// Log-concave density, named or tabulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Gaussian { sigma: f64 },
    Laplace { b: f64 },
    Logistic { s: f64 },
    /// Log-density at equally spaced points of `[left, right]`, linearly
    /// interpolated and exponentiated; zero outside.
    LogGrid {
        left: f64,
        right: f64,
        log_density: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolveOptions {
    /// Number of output grid points.
    #[serde(default = "default_points")]
    pub points: usize,
    /// Mass of `f` allowed outside the truncation window.
    #[serde(default = "default_tail")]
    pub tail_mass: f64,
}

fn default_points() -> usize {
    2001
}

fn default_tail() -> f64 {
    1e-10
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        Self {
            points: default_points(),
            tail_mass: default_tail(),
        }
    }
}

/// A validated density with its truncation window.
#[derive(Debug, Clone)]
pub struct LogConcaveDensity {
    spec: DensitySpec,
    lo: f64,
    hi: f64,
    /// Length scale used to size quadrature steps.
    scale: f64,
    norm: f64,
}

impl LogConcaveDensity {
    pub fn new(spec: &DensitySpec, tail_mass: f64) -> Result<Self> {
        if !(tail_mass > 0.0 && tail_mass <= MAX_TAIL_MASS) {
            return Err(Error::Truncation(format!(
                "tail mass {tail_mass} outside (0, {MAX_TAIL_MASS}]"
            )));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")))
            }
        };
        let (lo, hi, scale, norm) = match spec {
            DensitySpec::Gaussian { sigma } => {
                let s = positive("sigma", *sigma)?;
                let l = -s * inverse_normal_cdf(0.5 * tail_mass);
                (-l, l, s, 1.0)
            }
            DensitySpec::Laplace { b } => {
                let b = positive("b", *b)?;
                let l = b * (1.0 / tail_mass).ln();
                (-l, l, b, 1.0)
            }
            DensitySpec::Logistic { s } => {
                let s = positive("s", *s)?;
                let l = s * (2.0 / tail_mass - 1.0).ln();
                (-l, l, s, 1.0)
            }
            DensitySpec::LogGrid {
                left,
                right,
                log_density,
            } => {
                let n = log_density.len();
                if n < 2 || !(right > left) || !left.is_finite() || !right.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "log-density grid on [{left}, {right}] with {n} values"
                    )));
                }
                if log_density.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "log-density values must be finite".into(),
                    ));
                }
                let top = log_density.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                if let Some(k) = (1..n - 1).find(|&k| {
                    log_density[k - 1] - 2.0 * log_density[k] + log_density[k + 1]
                        > 1e-12 * (1.0 + top)
                }) {
                    return Err(Error::NotLogConcave(format!(
                        "positive second difference at grid index {k}"
                    )));
                }
                let h = (right - left) / (n - 1) as f64;
                let norm = log_density
                    .windows(2)
                    .map(|w| exp_linear_integral(w[0], w[1], h))
                    .sum::<f64>();
                (*left, *right, h, norm)
            }
        };
        Ok(Self {
            spec: spec.clone(),
            lo,
            hi,
            scale,
            norm,
        })
    }

    /// Truncation window `[lo, hi]`.
    pub fn window(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match &self.spec {
            DensitySpec::Gaussian { sigma } => {
                let z = x / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            DensitySpec::Laplace { b } => (-x.abs() / b).exp() / (2.0 * b),
            DensitySpec::Logistic { s } => {
                let e = (-x.abs() / s).exp();
                e / (s * (1.0 + e) * (1.0 + e))
            }
            DensitySpec::LogGrid {
                left,
                right,
                log_density,
            } => {
                if x < *left || x > *right {
                    return 0.0;
                }
                let n = log_density.len();
                let u = (x - left) / (right - left) * (n - 1) as f64;
                let k = (u.floor() as usize).min(n - 2);
                let w = u - k as f64;
                (log_density[k] * (1.0 - w) + log_density[k + 1] * w).exp() / self.norm
            }
        }
    }

    /// Location of the mode, where the kernel may have a kink.
    fn peak(&self) -> f64 {
        match &self.spec {
            DensitySpec::LogGrid {
                left,
                right,
                log_density,
            } => {
                let n = log_density.len();
                let k = (0..n)
                    .max_by(|&a, &b| log_density[a].total_cmp(&log_density[b]))
                    .unwrap_or(0);
                left + (right - left) * k as f64 / (n - 1) as f64
            }
            _ => 0.0,
        }
    }

    /// Mean of the density (zero for the symmetric named families).
    pub fn mean(&self) -> f64 {
        match &self.spec {
            DensitySpec::LogGrid { .. } => {
                let n = 20_000;
                simpson(self.lo, self.hi, n, |x| x * self.pdf(x))
            }
            _ => 0.0,
        }
    }
}

/// `∫_0^h exp(la + (lb − la) u/h) du`.
fn exp_linear_integral(la: f64, lb: f64, h: f64) -> f64 {
    let d = lb - la;
    if d.abs() < 1e-8 {
        h * la.exp() * (1.0 + 0.5 * d + d * d / 6.0)
    } else {
        h * (lb.exp() - la.exp()) / d
    }
}

/// Composite Simpson on `[a, b]` with `n` (rounded up to even) intervals.
pub(crate) fn simpson<F: Fn(f64) -> f64>(a: f64, b: f64, n: usize, f: F) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let x = a + h * k as f64;
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Result of [`convolve`].
#[derive(Debug, Clone)]
pub struct Convolution {
    pub measure: Measure,
    /// Factor applied to the sampled density so that it has unit mass.
    pub renormalization: f64,
}

/// `μ ⋆ f` on a grid of `opts.points` points.
pub fn convolve(m: &Measure, f: &DensitySpec, opts: &ConvolveOptions) -> Result<Convolution> {
    let dens = LogConcaveDensity::new(f, opts.tail_mass)?;
    if opts.points < 3 {
        return Err(Error::InvalidArgument("need at least 3 output points".into()));
    }
    let (wl, wr) = dens.window();
    let y0 = m.lower_support() + wl;
    let y1 = m.upper_support() + wr;
    let n = opts.points;
    let dy = (y1 - y0) / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|k| y0 + dy * k as f64).collect();
    let peak = dens.peak();
    let step = dens.scale / 32.0;
    let cells: Vec<(f64, f64, f64, f64)> = m
        .segments()
        .iter()
        .flat_map(|s| {
            let b = s.breaks();
            let d = s.density();
            (1..b.len()).map(move |k| (b[k - 1], b[k], d[k - 1], d[k]))
        })
        .filter(|c| c.2 > 0.0 || c.3 > 0.0)
        .collect();
    let mut values: Vec<f64> = ys
        .iter()
        .map(|&y| {
            let mut v: f64 = m
                .atoms()
                .iter()
                .filter(|(a, _)| y - a >= wl && y - a <= wr)
                .map(|&(a, w)| w * dens.pdf(y - a))
                .sum();
            for &(a, b, fa, fb) in &cells {
                // z ranges over the cell intersected with y − [wl, wr]
                let lo = a.max(y - wr);
                let hi = b.min(y - wl);
                if !(hi > lo) {
                    continue;
                }
                let g = |z: f64| (fa + (fb - fa) * (z - a) / (b - a)) * dens.pdf(y - z);
                let kink = y - peak;
                let mut pieces = vec![lo];
                if kink > lo && kink < hi {
                    pieces.push(kink);
                }
                pieces.push(hi);
                for p in pieces.windows(2) {
                    let k = ((p[1] - p[0]) / step).ceil() as usize;
                    v += simpson(p[0], p[1], k.max(2), g);
                }
            }
            v
        })
        .collect();
    values[0] = 0.0_f64.max(values[0]);
    let mass: f64 = values.windows(2).map(|w| 0.5 * dy * (w[0] + w[1])).sum();
    if !((mass - 1.0).abs() <= 1e-6) {
        return Err(Error::Truncation(format!(
            "sampled convolution has mass {mass}; refine the output grid"
        )));
    }
    let factor = 1.0 / mass;
    for v in &mut values {
        *v *= factor;
    }
    let measure = Measure::new(vec![], vec![Segment::new(ys, values)?])?;
    Ok(Convolution {
        measure,
        renormalization: factor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_hold_the_requested_mass() {
        let g = LogConcaveDensity::new(&DensitySpec::Gaussian { sigma: 2.0 }, 1e-10).unwrap();
        let (lo, hi) = g.window();
        assert!((hi + lo).abs() < 1e-15);
        assert!((hi / 2.0 - 6.466_951_087_240_516).abs() < 1e-9);
        let l = LogConcaveDensity::new(&DensitySpec::Laplace { b: 1.0 }, 1e-10).unwrap();
        assert!((l.window().1 - 10.0 * std::f64::consts::LN_10).abs() < 1e-12);
        assert!(LogConcaveDensity::new(&DensitySpec::Laplace { b: 1.0 }, 1e-6).is_err());
    }

    #[test]
    fn log_grid_must_be_concave() {
        let bad = DensitySpec::LogGrid {
            left: -1.0,
            right: 1.0,
            log_density: vec![0.0, -1.0, 0.0],
        };
        assert!(matches!(
            LogConcaveDensity::new(&bad, 1e-10),
            Err(Error::NotLogConcave(_))
        ));
        let good = DensitySpec::LogGrid {
            left: -1.0,
            right: 1.0,
            log_density: vec![-1.0, 0.0, -1.0],
        };
        let d = LogConcaveDensity::new(&good, 1e-10).unwrap();
        assert!((simpson(-1.0, 1.0, 4000, |x| d.pdf(x)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(0.0, 2.0, 2, |x| x * x * x - x);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
