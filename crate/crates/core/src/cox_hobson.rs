//! Cox–Hobson embedding of an integrable law with positive mean.
//!
//! A Brownian motion `B` started at 0 with running maximum `S` is stopped at
//! `T = inf{v : S_v ≥ Ψ(B_v)}`; `B_T` then has the target law. Targets with
//! non-positive mean are first shifted by `m₀` and the samples shifted back.
//!
//! The stopping region `{S ≥ Ψ(B)}` is read as `B ≤ b(S)` with
//! `b(s) = sup{x : Ψ(x) ≤ s}`. Paths are simulated with steps sized to the
//! distance from the region, the Brownian-bridge maximum inside each step,
//! and the bridge probability of dipping below `b(S)`. A detected stop
//! reports `b(S)` (or `r` when `S` passed the support bound), which puts
//! atoms of the target exactly where they belong.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::ProcessFamily;
use crate::measure::Measure;
use crate::montecarlo::{
    bridge_cross_above, bridge_cross_below, bridge_max_step, par_map, sample_rng, std_normal,
    uniform_open, PathConfig,
};

/// Steps are sized so the path moves about `1/KAPPA` of the distance to the
/// stopping region.
const KAPPA: f64 = 5.0;
const DT_MAX: f64 = 1e8;
/// Largest tolerated share of paths that run out of steps.
pub const MAX_EXHAUSTED_RATE: f64 = 1e-4;

/// `π(x) = ∫|y − x| μ(dy) + m`, computed as `2C(x) + x`.
pub fn pi_function(m: &Measure, x: f64) -> f64 {
    2.0 * m.integrated_survival(x) + x
}

/// `u⁻¹(x) = 1 − 2μ([x, ∞))`, the left derivative of `π`.
pub fn u_inverse(m: &Measure, x: f64) -> f64 {
    (1.0 - 2.0 * m.survival(x)).clamp(-1.0, 1.0)
}

/// `(u(θ), z(θ))`: the left end of the contact set of the tangent to `π` of
/// slope `θ`, and where that tangent meets the line `y = x`... shifted to the
/// convention `z = (π(u) − θu)/(1 − θ)`. `θ = 1` returns `(r, +∞)` and
/// `θ = −1` returns `(−∞, mean)`.
pub fn tangent_params(m: &Measure, theta: f64) -> Result<(f64, f64)> {
    if !(-1.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("θ = {theta} outside [−1, 1]")));
    }
    if theta == 1.0 {
        return Ok((m.upper_support(), f64::INFINITY));
    }
    if theta == -1.0 {
        return Ok((f64::NEG_INFINITY, m.mean()));
    }
    let u = m.quantile(0.5 * (1.0 + theta));
    Ok((u, (pi_function(m, u) - theta * u) / (1.0 - theta)))
}

/// `Ψ` of the shifted target, tabulated for fast inversion.
#[derive(Debug, Clone)]
pub struct CoxHobsonBarrier {
    target: Measure,
    shift: f64,
    shifted: Measure,
    xs: Vec<f64>,
    /// `Ψ(x_j)`.
    left: Vec<f64>,
    /// `Ψ(x_j+)`.
    right: Vec<f64>,
    r: f64,
}

/// `m₀` for a family: the mean at the chain minimum less one when that mean
/// is not positive, zero otherwise.
pub fn default_shift(min_mean: f64) -> f64 {
    if min_mean > 0.0 {
        0.0
    } else {
        min_mean - 1.0
    }
}

pub fn make_barrier(m: &Measure, m0: Option<f64>) -> Result<CoxHobsonBarrier> {
    let mean = m.mean();
    let shift = match m0 {
        Some(s) => {
            if !(s < mean) || !s.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "shift m0 = {s} must be finite and below the mean {mean}"
                )));
            }
            s
        }
        None if mean > 0.0 => 0.0,
        None => {
            return Err(Error::InvalidArgument(format!(
                "target mean {mean} is not positive; a shift m0 < mean is required"
            )))
        }
    };
    CoxHobsonBarrier::build(m.clone(), shift)
}

impl CoxHobsonBarrier {
    fn build(target: Measure, shift: f64) -> Result<Self> {
        let shifted = if shift == 0.0 {
            target.clone()
        } else {
            target.affine_pushforward(1.0, -shift)?
        };
        let mut xs = shifted.knots().xs;
        // refine inside cells carrying density
        for s in shifted.segments() {
            let b = s.breaks();
            let d = s.density();
            for k in 1..b.len() {
                if d[k - 1] > 0.0 || d[k] > 0.0 {
                    for j in 1..4 {
                        xs.push(b[k - 1] + (b[k] - b[k - 1]) * j as f64 / 4.0);
                    }
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let left: Vec<f64> = xs.iter().map(|&x| shifted.hardy_littlewood(x)).collect();
        let right: Vec<f64> = xs.iter().map(|&x| shifted.hardy_littlewood_right(x)).collect();
        let r = shifted.upper_support();
        Ok(Self {
            target,
            shift,
            shifted,
            xs,
            left,
            right,
            r,
        })
    }

    pub fn target(&self) -> &Measure {
        &self.target
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn shifted(&self) -> &Measure {
        &self.shifted
    }

    /// Upper support bound of the shifted target.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// `Ψ̃(x)`.
    #[inline]
    pub fn psi(&self, x: f64) -> f64 {
        self.shifted.hardy_littlewood(x)
    }

    /// `b(s) = sup{x : Ψ̃(x) ≤ s}`; `−∞` when the set is empty.
    pub fn b(&self, s: f64) -> f64 {
        if s >= self.r {
            return s;
        }
        if s < self.left[0] {
            return f64::NEG_INFINITY;
        }
        let j = self.left.partition_point(|&v| v <= s) - 1;
        let x0 = self.xs[j];
        if self.right[j] > s || j + 1 >= self.xs.len() {
            return x0;
        }
        // Ψ is continuous on (x_j, x_{j+1}]; Illinois on Ψ − s.
        let (mut a, mut fa) = (x0, self.right[j] - s);
        let (mut c, mut fc) = (self.xs[j + 1], self.left[j + 1] - s);
        let mut side = 0i8;
        for _ in 0..40 {
            if fc - fa <= 0.0 || c - a <= 1e-13 * (1.0 + a.abs()) {
                break;
            }
            let x = (a * fc - c * fa) / (fc - fa);
            let x = if x > a && x < c { x } else { 0.5 * (a + c) };
            let fx = self.psi(x) - s;
            if fx <= 0.0 {
                a = x;
                fa = fx;
                if side == -1 {
                    fc *= 0.5;
                }
                side = -1;
            } else {
                c = x;
                fc = fx;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        a
    }
}

/// One stopped path at one point of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSample {
    pub sample_id: u64,
    pub t: f64,
    pub tprime: f64,
    pub stopped_value: f64,
    pub steps: u64,
    pub running_max: f64,
}

/// Coupled samples: `samples[i][k]` is path `i` stopped at chain point `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSamples {
    pub chain: Vec<(f64, f64)>,
    pub samples: Vec<Vec<EmbeddingSample>>,
    /// Paths that hit the step budget; their rows hold the last state.
    pub exhausted: usize,
}

impl ChainSamples {
    /// Stopped values at chain point `k`.
    pub fn values(&self, k: usize) -> Vec<f64> {
        self.samples.iter().map(|row| row[k].stopped_value).collect()
    }

    /// Rows flattened in `(sample, chain point)` order.
    pub fn flat(&self) -> impl Iterator<Item = &EmbeddingSample> {
        self.samples.iter().flatten()
    }

    /// Fraction of paths whose stopping steps are non-decreasing along the chain.
    pub fn monotone_fraction(&self) -> f64 {
        let ok = self
            .samples
            .iter()
            .filter(|row| row.windows(2).all(|w| w[0].steps <= w[1].steps))
            .count();
        ok as f64 / self.samples.len().max(1) as f64
    }
}

struct PathOutcome {
    /// `(value, steps, running max)` per barrier, shifted coordinates.
    stops: Vec<(f64, u64, f64)>,
    exhausted: bool,
}

#[inline]
fn step_size(cfg: &PathConfig, delta: f64) -> f64 {
    if !cfg.adaptive {
        return cfg.dt;
    }
    let d = delta / KAPPA;
    (d * d).clamp(cfg.dt, DT_MAX)
}

/// Runs one path against nested barriers, stopping at each in turn.
fn run_path(barriers: &[CoxHobsonBarrier], cfg: &PathConfig, rng: &mut ChaCha8Rng) -> PathOutcome {
    let mut stops = Vec::with_capacity(barriers.len());
    let (mut b, mut s) = (0.0_f64, 0.0_f64);
    let mut steps: u64 = 0;
    let mut k = 0;
    // a barrier may already hold at the start
    while k < barriers.len() && (s >= barriers[k].r || b <= barriers[k].b(s)) {
        let v = if s >= barriers[k].r { barriers[k].r } else { b };
        stops.push((v, 0, s));
        k += 1;
    }
    let mut cached = (f64::NAN, f64::NAN);
    while k < barriers.len() {
        if steps >= cfg.max_steps {
            while stops.len() < barriers.len() {
                stops.push((b, steps, s));
            }
            return PathOutcome { stops, exhausted: true };
        }
        let bar = &barriers[k];
        if cached.0 != s {
            cached = (s, bar.b(s));
        }
        let bs = cached.1;
        let mut delta = (b - bs).min(bar.psi(b) - b);
        for _ in 0..8 {
            if bar.psi(b - delta) - b >= delta {
                break;
            }
            delta *= 0.5;
        }
        let dt = step_size(cfg, delta);
        let bn = b + dt.sqrt() * std_normal(rng);
        let m = if cfg.bridge_correction {
            bridge_max_step(b, bn, dt, uniform_open(rng))
        } else {
            b.max(bn)
        };
        let sn = s.max(m);
        steps += 1;
        let u = if cfg.bridge_correction { uniform_open(rng) } else { 1.0 };
        while k < barriers.len() {
            let bar = &barriers[k];
            let hit = if sn >= bar.r {
                Some(bar.r)
            } else {
                let level = bar.b(sn);
                if level == f64::NEG_INFINITY {
                    None
                } else if bn <= level || (cfg.bridge_correction && u < bridge_cross_below(b, bn, level, dt)) {
                    Some(level)
                } else {
                    None
                }
            };
            match hit {
                Some(v) => {
                    stops.push((v, steps, sn));
                    k += 1;
                    cached = (f64::NAN, f64::NAN);
                }
                None => break,
            }
        }
        b = bn;
        s = sn;
    }
    PathOutcome {
        stops,
        exhausted: false,
    }
}

fn collect(
    chain: &[(f64, f64)],
    shifts: &[f64],
    n: usize,
    outcomes: Vec<PathOutcome>,
) -> Result<ChainSamples> {
    let exhausted = outcomes.iter().filter(|o| o.exhausted).count();
    if exhausted as f64 >= MAX_EXHAUSTED_RATE * n as f64 && exhausted > 0 {
        return Err(Error::PathExhaustion { exhausted, total: n });
    }
    let samples = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, o)| {
            o.stops
                .iter()
                .zip(chain)
                .zip(shifts)
                .map(|((&(v, steps, smax), &(t, tp)), &m0)| EmbeddingSample {
                    sample_id: i as u64,
                    t,
                    tprime: tp,
                    stopped_value: v + m0,
                    steps,
                    running_max: smax + m0,
                })
                .collect()
        })
        .collect();
    Ok(ChainSamples {
        chain: chain.to_vec(),
        samples,
        exhausted,
    })
}

/// Samples `B_T` for one barrier; `t`, `t'` are only recorded.
pub fn embed(barrier: &CoxHobsonBarrier, cfg: &PathConfig, workers: Option<usize>) -> Result<ChainSamples> {
    embed_barriers(std::slice::from_ref(barrier), &[(0.0, 0.0)], cfg, workers)
}

/// Coupled embedding against pre-built nested barriers.
pub fn embed_barriers(
    barriers: &[CoxHobsonBarrier],
    chain: &[(f64, f64)],
    cfg: &PathConfig,
    workers: Option<usize>,
) -> Result<ChainSamples> {
    cfg.validate()?;
    if barriers.len() != chain.len() || barriers.is_empty() {
        return Err(Error::Shape(format!(
            "{} barriers for {} chain points",
            barriers.len(),
            chain.len()
        )));
    }
    let n = cfg.n_samples;
    let outcomes = par_map(n, workers, |i| {
        let mut rng = sample_rng(cfg.master_seed, i as u64);
        run_path(barriers, cfg, &mut rng)
    });
    let shifts: Vec<f64> = barriers.iter().map(|b| b.shift).collect();
    collect(chain, &shifts, n, outcomes)
}

/// Validates that consecutive points are componentwise ordered and distinct.
pub fn check_chain(chain: &[(f64, f64)]) -> Result<()> {
    if chain.is_empty() {
        return Err(Error::NotAChain("empty chain".into()));
    }
    for &(t, tp) in chain {
        if !(t >= 0.0 && tp >= 0.0 && t.is_finite() && tp.is_finite()) {
            return Err(Error::NotAChain(format!("({t}, {tp}) is outside the quadrant")));
        }
    }
    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.0 <= b.0 && a.1 <= b.1) || a == b {
            return Err(Error::NotAChain(format!(
                "({}, {}) does not precede ({}, {})",
                a.0, a.1, b.0, b.1
            )));
        }
    }
    Ok(())
}

/// Probe points for the nesting check.
fn probe_grid(ms: &[Measure]) -> Vec<f64> {
    let lo = ms.iter().map(Measure::lower_support).fold(f64::INFINITY, f64::min) - 1.0;
    let hi = ms.iter().map(Measure::upper_support).fold(f64::NEG_INFINITY, f64::max) + 1.0;
    let mut xs: Vec<f64> = (0..=200).map(|k| lo + (hi - lo) * k as f64 / 200.0).collect();
    for m in ms {
        xs.extend(m.atoms().iter().map(|a| a.0));
    }
    xs
}

/// Barriers for a chain of a family with one common shift.
pub fn chain_barriers(family: &ProcessFamily, chain: &[(f64, f64)], m0: Option<f64>) -> Result<Vec<CoxHobsonBarrier>> {
    check_chain(chain)?;
    let ms: Vec<Measure> = chain
        .iter()
        .map(|&(t, tp)| family.measure_at(t, tp))
        .collect::<Result<_>>()?;
    let shift = match m0 {
        Some(s) => s,
        None => default_shift(ms[0].mean()),
    };
    let xs = probe_grid(&ms);
    for k in 1..ms.len() {
        let scale = 1.0 + ms[k].upper_support().abs().max(ms[k - 1].upper_support().abs());
        if let Some(&x) = xs
            .iter()
            .find(|&&x| ms[k - 1].hardy_littlewood(x) > ms[k].hardy_littlewood(x) + 1e-10 * scale)
        {
            return Err(Error::NotNested(format!(
                "Ψ at chain point {} exceeds Ψ at point {} for x = {x}",
                k - 1,
                k
            )));
        }
    }
    ms.iter().map(|m| make_barrier(m, Some(shift).filter(|s| *s != 0.0))).collect()
}

/// Coupled embedding along a chain of an MRL family.
pub fn embed_family(
    family: &ProcessFamily,
    chain: &[(f64, f64)],
    cfg: &PathConfig,
    workers: Option<usize>,
) -> Result<ChainSamples> {
    let barriers = chain_barriers(family, chain, None)?;
    embed_barriers(&barriers, chain, cfg, workers)
}

/// `X_t = Y M^η_t + (1 − Y)(−M^{h#σ}_t)` with `P(Y = 1) = weight`.
pub fn mixture_submartingale(
    eta: &ProcessFamily,
    sigma_reflected: &ProcessFamily,
    weight: f64,
    chain: &[(f64, f64)],
    cfg: &PathConfig,
    workers: Option<usize>,
) -> Result<ChainSamples> {
    cfg.validate()?;
    if !(weight > 0.0 && weight <= 1.0) {
        return Err(Error::InvalidArgument(format!("weight {weight} outside (0, 1]")));
    }
    let up = chain_barriers(eta, chain, None)?;
    let down = if weight < 1.0 {
        chain_barriers(sigma_reflected, chain, None)?
    } else {
        up.clone()
    };
    let n = cfg.n_samples;
    let outcomes = par_map(n, workers, |i| {
        let mut rng = sample_rng(cfg.master_seed, i as u64);
        let pick = uniform_open(&mut rng) < weight;
        let o = run_path(if pick { &up } else { &down }, cfg, &mut rng);
        (pick, o)
    });
    let exhausted = outcomes.iter().filter(|o| o.1.exhausted).count();
    if exhausted > 0 && exhausted as f64 >= MAX_EXHAUSTED_RATE * n as f64 {
        return Err(Error::PathExhaustion { exhausted, total: n });
    }
    let samples = outcomes
        .into_iter()
        .enumerate()
        .map(|(i, (pick, o))| {
            let (bars, sign) = if pick { (&up, 1.0) } else { (&down, -1.0) };
            o.stops
                .iter()
                .zip(chain)
                .zip(bars)
                .map(|((&(v, steps, smax), &(t, tp)), bar)| EmbeddingSample {
                    sample_id: i as u64,
                    t,
                    tprime: tp,
                    stopped_value: sign * (v + bar.shift),
                    steps,
                    running_max: smax + bar.shift,
                })
                .collect()
        })
        .collect();
    Ok(ChainSamples {
        chain: chain.to_vec(),
        samples,
        exhausted,
    })
}

/// Brownian motion started from `ν`, stopped on leaving `(r − t, r + t')`
/// for each chain point. `running_max` holds the running maximum of the path.
pub fn double_barrier_martingale(
    nu: &Measure,
    r: f64,
    chain: &[(f64, f64)],
    cfg: &PathConfig,
    workers: Option<usize>,
) -> Result<ChainSamples> {
    cfg.validate()?;
    check_chain(chain)?;
    let knots = nu.knots();
    let n = cfg.n_samples;
    let outcomes = par_map(n, workers, |i| {
        let mut rng = sample_rng(cfg.master_seed, i as u64);
        let mut b = knots.quantile(nu, uniform_open(&mut rng));
        let mut s = b;
        let mut steps: u64 = 0;
        let mut stops = Vec::with_capacity(chain.len());
        let mut k = 0;
        while k < chain.len() {
            let (lo, hi) = (r - chain[k].0, r + chain[k].1);
            if b <= lo || b >= hi {
                stops.push((b, steps, s));
                k += 1;
            } else {
                break;
            }
        }
        while k < chain.len() {
            if steps >= cfg.max_steps {
                while stops.len() < chain.len() {
                    stops.push((b, steps, s));
                }
                return PathOutcome { stops, exhausted: true };
            }
            let (lo, hi) = (r - chain[k].0, r + chain[k].1);
            let dt = step_size(cfg, (b - lo).min(hi - b));
            let bn = b + dt.sqrt() * std_normal(&mut rng);
            let m = if cfg.bridge_correction {
                bridge_max_step(b, bn, dt, uniform_open(&mut rng))
            } else {
                b.max(bn)
            };
            steps += 1;
            let u = uniform_open(&mut rng);
            while k < chain.len() {
                let (lo, hi) = (r - chain[k].0, r + chain[k].1);
                let (pl, ph) = if cfg.bridge_correction {
                    (bridge_cross_below(b, bn, lo, dt), bridge_cross_above(b, bn, hi, dt))
                } else {
                    ((bn <= lo) as u8 as f64, (bn >= hi) as u8 as f64)
                };
                let hit = if pl >= 1.0 || u < pl {
                    Some(lo)
                } else if ph >= 1.0 || u < pl + ph {
                    Some(hi)
                } else {
                    None
                };
                match hit {
                    Some(v) => {
                        stops.push((v, steps, s.max(m).min(hi)));
                        k += 1;
                    }
                    None => break,
                }
            }
            b = bn;
            s = s.max(m);
        }
        PathOutcome {
            stops,
            exhausted: false,
        }
    });
    let zeros = vec![0.0; chain.len()];
    collect(chain, &zeros, n, outcomes)
}

/// Bounded test functions of the history `(X_{s₁}, …, X_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    One,
    /// `(1 + tanh x_s)/2`.
    TanhLast,
    /// `min(x_s², 1)`.
    ClippedSquare,
    /// `1/(1 + exp(x_s/0.1))`, a smoothed `1{x_s < 0}`.
    SmoothIndicator,
    /// `(1 + tanh Σ x)/2` over the whole history.
    TanhSum,
}

impl TestFunction {
    pub const LIBRARY: [TestFunction; 5] = [
        TestFunction::One,
        TestFunction::TanhLast,
        TestFunction::ClippedSquare,
        TestFunction::SmoothIndicator,
        TestFunction::TanhSum,
    ];

    pub fn eval(&self, history: &[f64]) -> f64 {
        let last = history.last().copied().unwrap_or(0.0);
        match self {
            TestFunction::One => 1.0,
            TestFunction::TanhLast => 0.5 * (1.0 + last.tanh()),
            TestFunction::ClippedSquare => (last * last).min(1.0),
            TestFunction::SmoothIndicator => 1.0 / (1.0 + (last / 0.1).exp()),
            TestFunction::TanhSum => 0.5 * (1.0 + history.iter().sum::<f64>().tanh()),
        }
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// `E[Φ(X_{p₀}, …, X_{p_s})(X_{p_t} − X_{p_s})]` for chain positions `s < t`.
pub fn submartingale_statistic(samples: &ChainSamples, s: usize, t: usize, phi: TestFunction) -> Result<Estimate> {
    let k = samples.chain.len();
    if !(s < t && t < k) {
        return Err(Error::Shape(format!("positions {s} < {t} < {k} required")));
    }
    if samples.samples.iter().any(|row| row.len() != k) || samples.samples.len() < 2 {
        return Err(Error::Shape("every path needs one sample per chain point".into()));
    }
    let vals: Vec<f64> = samples
        .samples
        .iter()
        .map(|row| {
            let hist: Vec<f64> = row[..=s].iter().map(|e| e.stopped_value).collect();
            phi.eval(&hist) * (row[t].stopped_value - row[s].stopped_value)
        })
        .collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(Estimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> Measure {
        Measure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn pi_examples() {
        let d = Measure::dirac(2.0).unwrap();
        for x in [-1.0, 2.0, 3.5] {
            assert!((pi_function(&d, x) - ((2.0 - x).abs() + 2.0)).abs() < 1e-15);
        }
        assert!((pi_function(&two_point(), 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_examples() {
        let d = Measure::dirac(1.5).unwrap();
        for th in [-0.5, 0.0, 0.7] {
            let (u, z) = tangent_params(&d, th).unwrap();
            assert_eq!(u, 1.5);
            assert!((z - 1.5).abs() < 1e-14);
        }
        let (u, z) = tangent_params(&two_point(), 0.0).unwrap();
        assert_eq!(u, -1.0);
        assert!((z - 1.0).abs() < 1e-15);
        assert!(tangent_params(&d, 1.5).is_err());
    }

    #[test]
    fn barrier_inverse_on_atoms() {
        let b = make_barrier(&two_point(), Some(-1.0)).unwrap();
        // shifted law ½δ₀ + ½δ₂: Ψ̃ = 1 on (−∞,0], 2 on (0,2]
        assert_eq!(b.b(0.5), f64::NEG_INFINITY);
        assert_eq!(b.b(1.0), 0.0);
        assert_eq!(b.b(1.9), 0.0);
        assert_eq!(b.b(2.0), 2.0);
        assert_eq!(b.b(3.0), 3.0);
        assert!(make_barrier(&two_point(), None).is_err());
        assert!(make_barrier(&two_point(), Some(0.0)).is_err());
    }

    #[test]
    fn barrier_inverse_on_density() {
        let u = Measure::uniform(0.0, 2.0).unwrap();
        let b = make_barrier(&u, None).unwrap();
        // Ψ(x) = (x + 2)/2 on [0, 2]
        for s in [1.0, 1.2, 1.5, 1.99] {
            assert!((b.b(s) - (2.0 * s - 2.0)).abs() < 1e-10, "s = {s}");
        }
    }

    #[test]
    fn dirac_target_is_hit_exactly() {
        let b = make_barrier(&Measure::dirac(0.5).unwrap(), None).unwrap();
        let cfg = PathConfig {
            n_samples: 200,
            master_seed: 3,
            ..PathConfig::default()
        };
        let out = embed(&b, &cfg, None).unwrap();
        assert!(out.values(0).iter().all(|&v| v == 0.5));
    }

    #[test]
    fn chains_are_validated() {
        assert!(check_chain(&[(1.0, 1.0), (2.0, 1.0)]).is_ok());
        assert!(check_chain(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(check_chain(&[(1.0, 1.0), (1.0, 1.0)]).is_err());
    }
}
