//! Stochastic-order and total-positivity checks on sampled fields.
//!
//! Every check scans a finite grid and returns an [`OrderReport`] holding the
//! smallest margin seen. A margin is `lhs − rhs` of the inequality under
//! test, so the check fails exactly when the worst margin is below
//! `−tolerance`. The witness is the first index tuple, in lexicographic scan
//! order, attaining the worst margin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::montecarlo::par_map;

/// Default cap on points per axis for the exhaustive lattice scan.
pub const DEFAULT_LATTICE_CAP: usize = 12;

/// Axes of a [`GridFunction3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pair {
    /// `t` and `x`, with `t'` fixed.
    TX,
    /// `t'` and `x`, with `t` fixed.
    TprimeX,
    /// `t` and `t'`, with `x` fixed.
    TTprime,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::TX, Pair::TprimeX, Pair::TTprime];

    pub fn name(&self) -> &'static str {
        match self {
            Pair::TX => "t,x",
            Pair::TprimeX => "tprime,x",
            Pair::TTprime => "t,tprime",
        }
    }
}

impl std::str::FromStr for Pair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace(' ', "").as_str() {
            "t,x" | "x,t" => Ok(Pair::TX),
            "tprime,x" | "x,tprime" | "t',x" => Ok(Pair::TprimeX),
            "t,tprime" | "tprime,t" | "t,t'" => Ok(Pair::TTprime),
            other => Err(Error::InvalidArgument(format!("unknown variable pair '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
}

/// Where the worst margin was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Grid indices, in the order documented by each check.
    pub indices: Vec<usize>,
    /// The corresponding coordinates.
    pub coords: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub verdict: Verdict,
    /// Smallest `lhs − rhs` over the scan.
    pub worst: f64,
    pub witness: Option<Witness>,
    pub tolerance: f64,
    /// Negative inputs replaced by zero before the scan.
    pub clamped: usize,
}

impl OrderReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    fn from_scan(scan: Scan, tolerance: f64, clamped: usize) -> Self {
        let worst = if scan.worst.is_finite() { scan.worst } else { 0.0 };
        Self {
            verdict: if worst < -tolerance {
                Verdict::Fails
            } else {
                Verdict::Holds
            },
            worst,
            witness: scan.witness,
            tolerance,
            clamped,
        }
    }
}

/// Running minimum with first-seen tie breaking.
#[derive(Debug, Clone)]
struct Scan {
    worst: f64,
    witness: Option<Witness>,
}

impl Scan {
    fn new() -> Self {
        Self {
            worst: f64::INFINITY,
            witness: None,
        }
    }

    #[inline]
    fn offer(&mut self, lhs: f64, rhs: f64, w: impl FnOnce() -> (Vec<usize>, Vec<f64>)) {
        let m = lhs - rhs;
        if m < self.worst {
            let (indices, coords) = w();
            self.worst = m;
            self.witness = Some(Witness {
                indices,
                coords,
                lhs,
                rhs,
            });
        }
    }

    fn merge(mut self, other: Scan) -> Scan {
        if other.worst < self.worst {
            self = other;
        }
        self
    }
}

/// Options shared by the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    /// Absolute slack; when unset, a scale-aware default is used.
    pub tol: Option<f64>,
    pub lattice_cap: usize,
    pub workers: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tol: None,
            lattice_cap: DEFAULT_LATTICE_CAP,
            workers: None,
        }
    }
}

fn check_axis(name: &str, g: &[f64]) -> Result<()> {
    if g.is_empty() {
        return Err(Error::Grid(format!("axis {name} is empty")));
    }
    if g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid(format!(
            "axis {name} must be finite and strictly increasing"
        )));
    }
    Ok(())
}

fn clamp_values(values: &mut [f64]) -> Result<usize> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Grid("field values must be finite".into()));
    }
    let mut n = 0;
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
            n += 1;
        }
    }
    Ok(n)
}

fn det_tol(values: &[f64]) -> f64 {
    let s = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    1e-12 * (1.0 + s * s)
}

/// Nonnegative field on a rectangular grid, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction2 {
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    values: Vec<f64>,
    clamped: usize,
}

impl GridFunction2 {
    pub fn new(axis1: Vec<f64>, axis2: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        check_axis("1", &axis1)?;
        check_axis("2", &axis2)?;
        if values.len() != axis1.len() * axis2.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}x{} grid",
                values.len(),
                axis1.len(),
                axis2.len()
            )));
        }
        let clamped = clamp_values(&mut values)?;
        Ok(Self {
            axis1,
            axis2,
            values,
            clamped,
        })
    }

    pub fn from_fn(axis1: Vec<f64>, axis2: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = axis1
            .iter()
            .flat_map(|&a| axis2.iter().map(move |&b| (a, b)))
            .map(|(a, b)| f(a, b))
            .collect();
        Self::new(axis1, axis2, values)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.axis2.len() + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.axis1.len(), self.axis2.len())
    }
}

/// Nonnegative field on a `t × t' × x` grid, stored with `x` fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction3 {
    pub t: Vec<f64>,
    pub tprime: Vec<f64>,
    pub x: Vec<f64>,
    values: Vec<f64>,
    clamped: usize,
}

impl GridFunction3 {
    pub fn new(t: Vec<f64>, tprime: Vec<f64>, x: Vec<f64>, mut values: Vec<f64>) -> Result<Self> {
        check_axis("t", &t)?;
        check_axis("tprime", &tprime)?;
        check_axis("x", &x)?;
        if values.len() != t.len() * tprime.len() * x.len() {
            return Err(Error::Shape(format!(
                "{} values for a {}x{}x{} grid",
                values.len(),
                t.len(),
                tprime.len(),
                x.len()
            )));
        }
        let clamped = clamp_values(&mut values)?;
        Ok(Self {
            t,
            tprime,
            x,
            values,
            clamped,
        })
    }

    pub fn from_fn(
        t: Vec<f64>,
        tprime: Vec<f64>,
        x: Vec<f64>,
        f: impl Fn(f64, f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(t.len() * tprime.len() * x.len());
        for &a in &t {
            for &b in &tprime {
                for &c in &x {
                    values.push(f(a, b, c));
                }
            }
        }
        Self::new(t, tprime, x, values)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[(i * self.tprime.len() + j) * self.x.len() + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn clamped(&self) -> usize {
        self.clamped
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.t.len(), self.tprime.len(), self.x.len())
    }

    fn coords(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        [self.t[i], self.tprime[j], self.x[k]]
    }
}

/// `Ψ₁(x) ≤ Ψ₂(x)` on the grid. Witness: `[k]`, `[x]`, with `lhs = Ψ₂`.
pub fn mrl_compare(m1: &Measure, m2: &Measure, grid: &[f64], opts: &CheckOptions) -> Result<OrderReport> {
    pointwise(grid, opts, |x| (m2.hardy_littlewood(x), m1.hardy_littlewood(x)))
}

/// `C₁(x) ≤ C₂(x)` on the grid (increasing convex order).
pub fn icx_compare(m1: &Measure, m2: &Measure, grid: &[f64], opts: &CheckOptions) -> Result<OrderReport> {
    pointwise(grid, opts, |x| {
        (m2.integrated_survival(x), m1.integrated_survival(x))
    })
}

fn pointwise(grid: &[f64], opts: &CheckOptions, f: impl Fn(f64) -> (f64, f64)) -> Result<OrderReport> {
    if grid.is_empty() {
        return Err(Error::Grid("probe grid is empty".into()));
    }
    let vals: Vec<(f64, f64)> = grid.iter().map(|&x| f(x)).collect();
    let scale = vals
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.0.abs()).max(v.1.abs()));
    let tol = opts.tol.unwrap_or(1e-12 * (1.0 + scale));
    let mut scan = Scan::new();
    for (k, (&x, &(l, r))) in grid.iter().zip(&vals).enumerate() {
        scan.offer(l, r, || (vec![k], vec![x]));
    }
    Ok(OrderReport::from_scan(scan, tol, 0))
}

/// MRL monotonicity criterion: for `(t₁,t'₁) ≤ (t₂,t'₂)` componentwise and
/// distinct, and `x₁ < x₂`,
/// `C(t₁,x₁)C(t₂,x₂) ≥ C(t₁,x₂)C(t₂,x₁)`.
/// Witness indices: `[i1, j1, k1, i2, j2, k2]`.
pub fn det2_criterion(c: &GridFunction3, opts: &CheckOptions) -> OrderReport {
    let (nt, np, nx) = c.shape();
    let tol = opts.tol.unwrap_or_else(|| det_tol(c.values()));
    let outer: Vec<(usize, usize)> = (0..nt).flat_map(|i| (0..np).map(move |j| (i, j))).collect();
    let scans = par_map(outer.len(), opts.workers, |o| {
        let (i1, j1) = outer[o];
        let mut scan = Scan::new();
        for i2 in i1..nt {
            for j2 in j1..np {
                if i2 == i1 && j2 == j1 {
                    continue;
                }
                for k1 in 0..nx {
                    for k2 in k1 + 1..nx {
                        let lhs = c.get(i1, j1, k1) * c.get(i2, j2, k2);
                        let rhs = c.get(i1, j1, k2) * c.get(i2, j2, k1);
                        scan.offer(lhs, rhs, || {
                            let a = c.coords(i1, j1, k1);
                            let b = c.coords(i2, j2, k2);
                            (
                                vec![i1, j1, k1, i2, j2, k2],
                                vec![a[0], a[1], a[2], b[0], b[1], b[2]],
                            )
                        });
                    }
                }
            }
        }
        scan
    });
    let scan = scans.into_iter().fold(Scan::new(), Scan::merge);
    OrderReport::from_scan(scan, tol, c.clamped())
}

/// TP2 in the chosen pair for every value of the remaining axis.
/// Witness indices: `[fixed, a1, b1, a2, b2]` with `a1 < a2`, `b1 < b2`.
pub fn tp2_pair_check(c: &GridFunction3, pair: Pair, opts: &CheckOptions) -> OrderReport {
    let (nt, np, nx) = c.shape();
    let tol = opts.tol.unwrap_or_else(|| det_tol(c.values()));
    // (fixed axis length, first axis length, second axis length, accessor)
    let (nf, na, nb) = match pair {
        Pair::TX => (np, nt, nx),
        Pair::TprimeX => (nt, np, nx),
        Pair::TTprime => (nx, nt, np),
    };
    let at = |f: usize, a: usize, b: usize| match pair {
        Pair::TX => c.get(a, f, b),
        Pair::TprimeX => c.get(f, a, b),
        Pair::TTprime => c.get(a, b, f),
    };
    let coord = |f: usize, a: usize, b: usize| -> [f64; 3] {
        match pair {
            Pair::TX => c.coords(a, f, b),
            Pair::TprimeX => c.coords(f, a, b),
            Pair::TTprime => c.coords(a, b, f),
        }
    };
    let mut scan = Scan::new();
    for f in 0..nf {
        for a1 in 0..na {
            for a2 in a1 + 1..na {
                for b1 in 0..nb {
                    for b2 in b1 + 1..nb {
                        let lhs = at(f, a1, b1) * at(f, a2, b2);
                        let rhs = at(f, a1, b2) * at(f, a2, b1);
                        scan.offer(lhs, rhs, || {
                            let p = coord(f, a1, b1);
                            let q = coord(f, a2, b2);
                            (vec![f, a1, b1, a2, b2], vec![p[0], p[1], p[2], q[0], q[1], q[2]])
                        });
                    }
                }
            }
        }
    }
    OrderReport::from_scan(scan, tol, c.clamped())
}

/// TP2 of a two-variable field over all index rectangles.
pub fn tp2_check(f: &GridFunction2, opts: &CheckOptions) -> OrderReport {
    let (na, nb) = f.shape();
    let tol = opts.tol.unwrap_or_else(|| det_tol(f.values()));
    let mut scan = Scan::new();
    for a1 in 0..na {
        for a2 in a1 + 1..na {
            for b1 in 0..nb {
                for b2 in b1 + 1..nb {
                    let lhs = f.get(a1, b1) * f.get(a2, b2);
                    let rhs = f.get(a1, b2) * f.get(a2, b1);
                    scan.offer(lhs, rhs, || {
                        (
                            vec![a1, b1, a2, b2],
                            vec![f.axis1[a1], f.axis2[b1], f.axis1[a2], f.axis2[b2]],
                        )
                    });
                }
            }
        }
    }
    OrderReport::from_scan(scan, tol, f.clamped())
}

/// Exhaustive lattice inequality `C(p∧q)C(p∨q) ≥ C(p)C(q)` over all pairs
/// of grid points. Witness indices: `[ip, jp, kp, iq, jq, kq]` with `p`
/// preceding `q` in scan order.
pub fn mtp2_check(c: &GridFunction3, opts: &CheckOptions) -> Result<OrderReport> {
    let (nt, np, nx) = c.shape();
    if nt.max(np).max(nx) > opts.lattice_cap {
        return Err(Error::Grid(format!(
            "lattice scan limited to {} points per axis, got {nt}x{np}x{nx}",
            opts.lattice_cap
        )));
    }
    let tol = opts.tol.unwrap_or_else(|| det_tol(c.values()));
    let n = nt * np * nx;
    let split = |p: usize| (p / (np * nx), (p / nx) % np, p % nx);
    let scans = par_map(n, opts.workers, |p| {
        let (i1, j1, k1) = split(p);
        let cp = c.get(i1, j1, k1);
        let mut scan = Scan::new();
        for q in p + 1..n {
            let (i2, j2, k2) = split(q);
            // comparable pairs give equality
            let le = i1 <= i2 && j1 <= j2 && k1 <= k2;
            let ge = i1 >= i2 && j1 >= j2 && k1 >= k2;
            if le || ge {
                continue;
            }
            let lo = c.get(i1.min(i2), j1.min(j2), k1.min(k2));
            let hi = c.get(i1.max(i2), j1.max(j2), k1.max(k2));
            let lhs = lo * hi;
            let rhs = cp * c.get(i2, j2, k2);
            scan.offer(lhs, rhs, || {
                let a = c.coords(i1, j1, k1);
                let b = c.coords(i2, j2, k2);
                (
                    vec![i1, j1, k1, i2, j2, k2],
                    vec![a[0], a[1], a[2], b[0], b[1], b[2]],
                )
            });
        }
        scan
    });
    let scan = scans.into_iter().fold(Scan::new(), Scan::merge);
    Ok(OrderReport::from_scan(scan, tol, c.clamped()))
}

/// `h(a, c) = Σ_b f(a, b) g(b, c) w(b)`.
pub fn compose_mtp2(f: &GridFunction2, g: &GridFunction2, w: &[f64]) -> Result<GridFunction2> {
    let (na, nb) = f.shape();
    let (nb2, nc) = g.shape();
    if nb != nb2 || w.len() != nb || f.axis2 != g.axis1 {
        return Err(Error::Shape(format!(
            "cannot compose {na}x{nb} with {nb2}x{nc} using {} weights",
            w.len()
        )));
    }
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    let mut values = vec![0.0; na * nc];
    for a in 0..na {
        for b in 0..nb {
            let fw = f.get(a, b) * w[b];
            if fw == 0.0 {
                continue;
            }
            for c in 0..nc {
                values[a * nc + c] += fw * g.get(b, c);
            }
        }
    }
    GridFunction2::new(f.axis1.clone(), g.axis2.clone(), values)
}

/// Result of checking that pairwise TP2 implies the lattice property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub t_x: OrderReport,
    pub tprime_x: OrderReport,
    pub t_tprime: OrderReport,
    pub lattice: OrderReport,
    pub pairwise_holds: bool,
    pub lattice_holds: bool,
    /// `false` only when every pair holds but the lattice check fails.
    pub implication_holds: bool,
}

pub fn crosscheck(c: &GridFunction3, opts: &CheckOptions) -> Result<CrosscheckReport> {
    let t_x = tp2_pair_check(c, Pair::TX, opts);
    let tprime_x = tp2_pair_check(c, Pair::TprimeX, opts);
    let t_tprime = tp2_pair_check(c, Pair::TTprime, opts);
    let lattice = mtp2_check(c, opts)?;
    let pairwise_holds = t_x.holds() && tprime_x.holds() && t_tprime.holds();
    let lattice_holds = lattice.holds();
    Ok(CrosscheckReport {
        t_x,
        tprime_x,
        t_tprime,
        lattice,
        pairwise_holds,
        lattice_holds,
        implication_holds: !pairwise_holds || lattice_holds,
    })
}

/// Builds the `C` field of a family on `grid` and runs [`crosscheck`].
pub fn pairwise_implies_mtp2_crosscheck(
    family: &crate::families::ProcessFamily,
    grid: &Grid3,
    opts: &CheckOptions,
) -> Result<CrosscheckReport> {
    crosscheck(&family.c_field(grid, opts.workers)?, opts)
}

/// Rectangular `t × t' × x` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid3 {
    pub t: Vec<f64>,
    pub tprime: Vec<f64>,
    pub x: Vec<f64>,
}

impl Grid3 {
    pub fn new(t: Vec<f64>, tprime: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        let g = Self { t, tprime, x };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        check_axis("t", &self.t)?;
        check_axis("tprime", &self.tprime)?;
        check_axis("x", &self.x)?;
        if self.t.iter().chain(&self.tprime).any(|v| *v < 0.0) {
            return Err(Error::Grid("time axes must be nonnegative".into()));
        }
        Ok(())
    }

    /// Ordered pairs of `(t,t')` points that are componentwise comparable.
    pub fn ordered_pairs(&self) -> Vec<((f64, f64), (f64, f64))> {
        let pts: Vec<(f64, f64)> = self
            .t
            .iter()
            .flat_map(|&a| self.tprime.iter().map(move |&b| (a, b)))
            .collect();
        let mut out = Vec::new();
        for &p in &pts {
            for &q in &pts {
                if p != q && p.0 <= q.0 && p.1 <= q.1 {
                    out.push((p, q));
                }
            }
        }
        out
    }
}

/// Default time axis.
pub fn default_time_axis() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0]
}

/// `n` equally spaced points spanning one unit beyond the supports.
pub fn default_x_axis(measures: &[Measure], n: usize) -> Result<Vec<f64>> {
    if measures.is_empty() || n < 2 {
        return Err(Error::Grid("need measures and at least two points".into()));
    }
    let lo = measures
        .iter()
        .map(Measure::lower_support)
        .fold(f64::INFINITY, f64::min)
        - 1.0;
    let hi = measures
        .iter()
        .map(Measure::upper_support)
        .fold(f64::NEG_INFINITY, f64::max)
        + 1.0;
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Grid(format!("degenerate x window [{lo}, {hi}]")));
    }
    Ok(linspace(lo, hi, n))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point() -> Measure {
        Measure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn mrl_and_icx_basics() {
        let o = CheckOptions::default();
        let g = linspace(-3.0, 3.0, 25);
        let d0 = Measure::dirac(0.0).unwrap();
        let d1 = Measure::dirac(1.0).unwrap();
        assert!(mrl_compare(&d0, &d1, &g, &o).unwrap().holds());
        assert!(icx_compare(&d0, &two_point(), &g, &o).unwrap().holds());
        let r = icx_compare(&d1, &d0, &g, &o).unwrap();
        assert!(!r.holds());
        assert!(r.worst < -0.5);
    }

    #[test]
    fn separable_fields_are_tp2_with_equality() {
        let ax = linspace(0.0, 2.0, 5);
        let c = GridFunction3::from_fn(ax.clone(), ax.clone(), ax, |a, b, x| {
            (1.0 + a) * (2.0 + b * b) * (-x).exp()
        })
        .unwrap();
        let o = CheckOptions::default();
        for p in Pair::ALL {
            let r = tp2_pair_check(&c, p, &o);
            assert!(r.holds());
            assert!(r.worst.abs() < 1e-10);
        }
        assert!(mtp2_check(&c, &o).unwrap().holds());
        assert!(det2_criterion(&c, &o).holds());
    }

    #[test]
    fn negative_inputs_are_clamped_and_counted() {
        let g = GridFunction2::new(vec![0.0, 1.0], vec![0.0], vec![-1e-17, 1.0]).unwrap();
        assert_eq!(g.clamped(), 1);
        assert_eq!(g.get(0, 0), 0.0);
    }

    #[test]
    fn lattice_cap_is_enforced() {
        let ax = linspace(0.0, 1.0, 13);
        let c = GridFunction3::from_fn(ax.clone(), vec![0.0], vec![0.0], |_, _, _| 1.0).unwrap();
        assert!(matches!(
            mtp2_check(&c, &CheckOptions::default()),
            Err(Error::Grid(_))
        ));
    }

    #[test]
    fn compose_with_identity_returns_input() {
        let f = GridFunction2::from_fn(vec![0.0, 1.0], vec![0.0, 1.0, 2.0], |a, b| 1.0 + a * b).unwrap();
        let id = GridFunction2::from_fn(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0], |a, b| {
            if a == b { 1.0 } else { 0.0 }
        })
        .unwrap();
        let h = compose_mtp2(&f, &id, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(h.values(), f.values());
        assert!(compose_mtp2(&f, &id, &[1.0]).is_err());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("t,tprime".parse::<Pair>().unwrap(), Pair::TTprime);
        assert_eq!("tprime,x".parse::<Pair>().unwrap(), Pair::TprimeX);
        assert!("t,y".parse::<Pair>().is_err());
    }

    #[test]
    fn degenerate_axes_rejected() {
        assert!(Grid3::new(vec![0.0, 0.0], vec![0.0], vec![1.0]).is_err());
        assert!(Grid3::new(vec![], vec![0.0], vec![1.0]).is_err());
    }
}
