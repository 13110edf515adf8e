//! Random streams, Brownian-bridge extrema and distances between an
//! empirical law and a [`Measure`].
//!
//! Every sample owns a ChaCha8 stream keyed by `(master_seed, sample_index)`,
//! so results never depend on how samples are spread over workers. Gaussian
//! increments come from Wichura's AS241 inverse normal CDF applied to one
//! uniform draw each.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure;

/// Discretization and sampling parameters for path simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathConfig {
    /// Smallest time step; the step used near a barrier.
    pub dt: f64,
    pub max_steps: u64,
    pub n_samples: usize,
    pub master_seed: u64,
    /// Sample the Brownian-bridge extremum inside each step.
    #[serde(default = "yes")]
    pub bridge_correction: bool,
    /// Grow the step with the distance to the nearest barrier.
    #[serde(default = "yes")]
    pub adaptive: bool,
}

fn yes() -> bool {
    true
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            max_steps: 10_000_000,
            n_samples: 100_000,
            master_seed: 0,
            bridge_correction: true,
            adaptive: true,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1e-2) {
            return Err(Error::InvalidArgument(format!(
                "dt must lie in (0, 1e-2], got {}",
                self.dt
            )));
        }
        if self.n_samples == 0 || self.max_steps == 0 {
            return Err(Error::InvalidArgument(
                "n_samples and max_steps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// The random stream of one sample.
pub fn sample_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw in the open interval `(0, 1)`.
#[inline]
pub fn uniform_open<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn std_normal<R: RngCore>(rng: &mut R) -> f64 {
    inverse_normal_cdf(uniform_open(rng))
}

/// Wichura's AS241 (PPND16) inverse of the standard normal CDF; relative
/// accuracy about 1e-16 on `(0, 1)`.
pub fn inverse_normal_cdf(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_545e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];
    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let z = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -z
    } else {
        z
    }
}

/// Maximum of a Brownian bridge from `a` to `b` over a step of length `dt`,
/// drawn by inversion of `P(M ≥ m) = exp(−2(m−a)(m−b)/dt)` with `u ∈ (0,1)`.
#[inline]
pub fn bridge_max_step(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    let d = b - a;
    0.5 * (a + b + (d * d - 2.0 * dt * u.ln()).sqrt())
}

/// Minimum of the same bridge, by symmetry.
#[inline]
pub fn bridge_min_step(a: f64, b: f64, dt: f64, u: f64) -> f64 {
    -bridge_max_step(-a, -b, dt, u)
}

/// Probability that a bridge from `a` to `b` over `dt` touches `level`
/// from above; one when either endpoint is at or below it.
#[inline]
pub fn bridge_cross_below(a: f64, b: f64, level: f64, dt: f64) -> f64 {
    if a <= level || b <= level {
        1.0
    } else {
        (-2.0 * (a - level) * (b - level) / dt).exp()
    }
}

/// Probability that the bridge reaches `level` from below.
#[inline]
pub fn bridge_cross_above(a: f64, b: f64, level: f64, dt: f64) -> f64 {
    bridge_cross_below(-a, -b, -level, dt)
}

/// Runs `f(i)` for `i in 0..n`, in order, optionally on a dedicated pool.
pub fn par_map<T, F>(n: usize, workers: Option<usize>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match workers {
        Some(w) if w >= 1 => match rayon::ThreadPoolBuilder::new().num_threads(w).build() {
            Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
            Err(_) => (0..n).into_par_iter().map(f).collect(),
        },
        _ => (0..n).into_par_iter().map(f).collect(),
    }
}

/// Sorted sample with uniform weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw {
    values: Vec<f64>,
}

impl EmpiricalLaw {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty sample".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sample value".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Right-continuous ECDF.
    pub fn cdf(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    pub fn cdf_left(&self, x: f64) -> f64 {
        self.values.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Standard error of the sample mean.
    pub fn stderr(&self) -> f64 {
        let n = self.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let m = self.mean();
        let var = self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    }

    /// `C_n(x) = (1/n) Σ (v − x)⁺`.
    pub fn integrated_survival(&self, x: f64) -> f64 {
        let i = self.values.partition_point(|&v| v < x);
        self.values[i..].iter().map(|v| v - x).sum::<f64>() / self.len() as f64
    }
}

/// Kolmogorov–Smirnov distance, evaluated with both one-sided limits at
/// every sample point and every atom of `m`.
pub fn ks_distance(e: &EmpiricalLaw, m: &Measure) -> f64 {
    let mut worst: f64 = 0.0;
    let mut check = |x: f64| {
        worst = worst
            .max((e.cdf(x) - m.cdf(x)).abs())
            .max((e.cdf_left(x) - m.cdf_left(x)).abs());
    };
    let mut prev = f64::NAN;
    for &v in e.values() {
        if v != prev {
            check(v);
            prev = v;
        }
    }
    for &(a, _) in m.atoms() {
        check(a);
    }
    worst
}

/// Wasserstein-1 distance `∫ |F_n − F|`, integrated exactly: on each
/// interval where `F_n` is constant, `∫F` follows from `C` and the single
/// possible crossing of the level is located with the quantile function.
pub fn w1_distance(e: &EmpiricalLaw, m: &Measure) -> f64 {
    let mut xs: Vec<f64> = e.values().to_vec();
    xs.extend(m.atoms().iter().map(|a| a.0));
    xs.push(m.lower_support());
    xs.push(m.upper_support());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let knots = m.knots();
    // ∫_{x0}^{x1} F = (x1 − x0) − (C(x0) − C(x1)) for a continuous stretch.
    let int_f = |x0: f64, x1: f64| (x1 - x0) - (m.integrated_survival(x0) - m.integrated_survival(x1));
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let c = e.cdf(x0);
        let f0 = m.cdf(x0);
        let f1 = m.cdf_left(x1);
        if (f0 - c) * (f1 - c) < 0.0 {
            let xc = knots.quantile(m, c).clamp(x0, x1);
            total += ((xc - x0) * c - int_f(x0, xc)).abs();
            total += ((x1 - xc) * c - int_f(xc, x1)).abs();
        } else {
            total += ((x1 - x0) * c - int_f(x0, x1)).abs();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_normal_reference_values() {
        assert!(inverse_normal_cdf(0.5).abs() < 1e-16);
        assert!((inverse_normal_cdf(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((inverse_normal_cdf(1e-10) + 6.361_340_902_404_056).abs() < 1e-12);
    }

    #[test]
    fn bridge_max_bounds() {
        assert!(bridge_max_step(0.0, 0.0, 1e-4, 1.0 - 1e-16) < 1e-9);
        for &(a, b, u) in &[(0.0, 1.0, 0.3), (2.0, -1.0, 0.9), (0.5, 0.5, 1e-9)] {
            let m = bridge_max_step(a, b, 0.01, u);
            assert!(m >= a.max(b));
            assert!(bridge_min_step(a, b, 0.01, u) <= a.min(b));
        }
    }

    #[test]
    fn ks_trivial_cases() {
        let m = Measure::from_atoms(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let e = EmpiricalLaw::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(ks_distance(&e, &m), 0.0);
        let z = EmpiricalLaw::new(vec![0.0; 10]).unwrap();
        assert_eq!(ks_distance(&z, &Measure::dirac(1.0).unwrap()), 1.0);
    }

    #[test]
    fn w1_trivial_cases() {
        let m = Measure::from_atoms(&[(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let e = EmpiricalLaw::new(vec![0.0, 1.0]).unwrap();
        assert!(w1_distance(&e, &m).abs() < 1e-15);
        let z = EmpiricalLaw::new(vec![0.25; 3]).unwrap();
        assert!((w1_distance(&z, &Measure::dirac(2.0).unwrap()) - 1.75).abs() < 1e-15);
        let u = Measure::uniform(0.0, 1.0).unwrap();
        let half = EmpiricalLaw::new(vec![0.5]).unwrap();
        assert!((w1_distance(&half, &u) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = sample_rng(7, 3);
        let mut b = sample_rng(7, 3);
        let mut c = sample_rng(7, 4);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_eq!(x, y);
        assert_ne!(x, z);
    }
}
