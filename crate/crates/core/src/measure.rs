//! Integrable probability laws on the real line.
//!
//! A [`Measure`] is a finite list of atoms plus non-overlapping runs of
//! piecewise-linear density. Every functional below is evaluated in closed
//! form from prefix/suffix sums over atoms and linear cells, so a query costs
//! `O(log n)` after construction.
//!
//! Conventions:
//!
//! * survival `μ([x,∞))` uses the closed tail, so the Hardy–Littlewood
//!   function `Ψ(x) = ∫_{[x,∞)} y μ(dy) / μ([x,∞))` is left-continuous;
//! * `Ψ(x) = x` for `x ≥ r`, where `r` is the upper bound of the support;
//! * `C(x) = ∫_{[x,∞)} (y − x) μ(dy)`, which vanishes exactly on `[r,∞)`;
//! * the distribution function `F(x) = μ((−∞,x])` is right-continuous.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{Extrapolation, PiecewiseFn, Side};

/// Allowed deviation of the total mass from one.
pub const MASS_TOL: f64 = 1e-12;
/// Atoms closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// One end of an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Unbounded,
    Closed(f64),
    Open(f64),
}

/// A run of piecewise-linear density; `density[k]` is the value at `breaks[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    breaks: Vec<f64>,
    density: Vec<f64>,
}

impl Segment {
    pub fn new(breaks: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || breaks.len() != density.len() {
            return Err(Error::InvalidMeasure(format!(
                "segment needs matching breakpoints and densities (got {} and {})",
                breaks.len(),
                density.len()
            )));
        }
        if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidMeasure(
                "segment breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if density.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(Error::InvalidMeasure(
                "density values must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { breaks, density })
    }

    /// Density sampled at equally spaced points of `[left, right]`.
    pub fn uniform_grid(left: f64, right: f64, density: Vec<f64>) -> Result<Self> {
        let n = density.len();
        if n < 2 || !(right > left) {
            return Err(Error::InvalidMeasure(format!(
                "segment [{left}, {right}] with {n} density values"
            )));
        }
        let h = (right - left) / (n - 1) as f64;
        let mut breaks: Vec<f64> = (0..n).map(|k| left + h * k as f64).collect();
        breaks[n - 1] = right;
        Self::new(breaks, density)
    }

    pub fn left(&self) -> f64 {
        self.breaks[0]
    }

    pub fn right(&self) -> f64 {
        self.breaks[self.breaks.len() - 1]
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// Linear interpolation inside the segment, zero outside.
    pub fn value_at(&self, x: f64) -> f64 {
        if x < self.left() || x > self.right() {
            return 0.0;
        }
        let k = self.breaks.partition_point(|&b| b < x);
        if self.breaks[k] == x {
            return self.density[k];
        }
        let (a, b) = (self.breaks[k - 1], self.breaks[k]);
        let (fa, fb) = (self.density[k - 1], self.density[k]);
        fa + (fb - fa) * (x - a) / (b - a)
    }

    pub fn mass(&self) -> f64 {
        self.cells().map(|c| c.mass).sum()
    }

    fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (1..self.breaks.len()).map(move |k| {
            Cell::new(
                self.breaks[k - 1],
                self.breaks[k],
                self.density[k - 1],
                self.density[k],
            )
        })
    }

    fn scaled(mut self, k: f64) -> Self {
        for f in &mut self.density {
            *f *= k;
        }
        self
    }

    /// Restriction to `[lo, hi]`; `None` when the overlap has zero width.
    fn clip(&self, lo: f64, hi: f64) -> Option<Segment> {
        let a = lo.max(self.left());
        let b = hi.min(self.right());
        if !(b > a) {
            return None;
        }
        let mut xs = vec![a];
        let mut fs = vec![self.value_at(a)];
        for (&x, &f) in self.breaks.iter().zip(&self.density) {
            if x > a && x < b {
                xs.push(x);
                fs.push(f);
            }
        }
        xs.push(b);
        fs.push(self.value_at(b));
        Some(Segment {
            breaks: xs,
            density: fs,
        })
    }

    fn is_equally_spaced(&self) -> bool {
        let n = self.breaks.len();
        let h = (self.right() - self.left()) / (n - 1) as f64;
        self.breaks
            .iter()
            .enumerate()
            .all(|(k, &x)| (x - (self.left() + h * k as f64)).abs() <= 1e-12 * (1.0 + x.abs()))
    }
}

/// Linear density `fa → fb` on `[a, b]` with its mass and first moment.
#[derive(Debug, Clone, Copy)]
struct Cell {
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    mass: f64,
    m1: f64,
}

impl Cell {
    fn new(a: f64, b: f64, fa: f64, fb: f64) -> Self {
        let h = b - a;
        Self {
            a,
            b,
            fa,
            fb,
            mass: 0.5 * h * (fa + fb),
            m1: h / 6.0 * (fa * (2.0 * a + b) + fb * (a + 2.0 * b)),
        }
    }

    fn value_at(&self, x: f64) -> f64 {
        self.fa + (self.fb - self.fa) * (x - self.a) / (self.b - self.a)
    }

    /// Mass and first moment of the part `[x, b]`, for `a ≤ x ≤ b`.
    fn upper_part(&self, x: f64) -> (f64, f64) {
        let fx = self.value_at(x);
        let h = self.b - x;
        (
            0.5 * h * (fx + self.fb),
            h / 6.0 * (fx * (2.0 * x + self.b) + self.fb * (x + 2.0 * self.b)),
        )
    }

    fn positive(&self) -> bool {
        self.fa > 0.0 || self.fb > 0.0
    }
}

/// JSON form of a segment: density at equally spaced points of `[left, right]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentSpec {
    pub left: f64,
    pub right: f64,
    pub density: Vec<f64>,
}

/// JSON form of a measure.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    #[serde(default)]
    pub segments: Vec<SegmentSpec>,
}

/// A nonnegative finite measure that is not necessarily normalized; the
/// building block for restrictions, censoring and mixtures.
#[derive(Debug, Clone, Default)]
pub struct SubMeasure {
    pub atoms: Vec<(f64, f64)>,
    pub segments: Vec<Segment>,
}

impl SubMeasure {
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>()
            + self.segments.iter().map(Segment::mass).sum::<f64>()
    }

    pub fn first_moment(&self) -> f64 {
        self.atoms.iter().map(|a| a.0 * a.1).sum::<f64>()
            + self
                .segments
                .iter()
                .flat_map(|s| s.cells())
                .map(|c| c.m1)
                .sum::<f64>()
    }

    pub fn scaled(self, k: f64) -> Self {
        Self {
            atoms: self.atoms.into_iter().map(|(x, w)| (x, w * k)).collect(),
            segments: self.segments.into_iter().map(|s| s.scaled(k)).collect(),
        }
    }

    /// Adds an atom; zero weights are ignored.
    pub fn add_atom(&mut self, x: f64, w: f64) {
        if w != 0.0 {
            self.atoms.push((x, w));
        }
    }

    pub fn extend(&mut self, other: SubMeasure) {
        self.atoms.extend(other.atoms);
        self.segments.extend(other.segments);
    }

    /// Validates that the mass is one and builds the measure.
    pub fn into_measure(self) -> Result<Measure> {
        Measure::new(self.atoms, self.segments)
    }

    /// Divides by the total mass.
    pub fn normalized(self) -> Result<Measure> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(Error::InvalidMeasure("cannot normalize a null measure".into()));
        }
        self.scaled(1.0 / m).into_measure()
    }
}

/// Integrable probability measure: atoms plus piecewise-linear density.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec", into = "MeasureSpec")]
pub struct Measure {
    atoms: Vec<(f64, f64)>,
    segments: Vec<Segment>,
    atom_x: Vec<f64>,
    /// `(mass, first moment)` of `atoms[i..]`.
    atom_suffix: Vec<(f64, f64)>,
    cells: Vec<Cell>,
    cell_suffix: Vec<(f64, f64)>,
    lower: f64,
    upper: f64,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms && self.segments == other.segments
    }
}

impl TryFrom<MeasureSpec> for Measure {
    type Error = Error;

    fn try_from(spec: MeasureSpec) -> Result<Self> {
        Measure::from_spec(&spec)
    }
}

impl From<Measure> for MeasureSpec {
    fn from(m: Measure) -> Self {
        m.to_spec()
    }
}

impl Measure {
    /// Builds a probability measure. Atoms are sorted, zero weights dropped
    /// and locations within [`MERGE_TOL`] merged; segments are sorted and must
    /// not overlap; the total mass must be one within [`MASS_TOL`].
    pub fn new(atoms: Vec<(f64, f64)>, mut segments: Vec<Segment>) -> Result<Self> {
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidMeasure(format!("bad atom ({x}, {w})")));
            }
        }
        let mut sorted: Vec<(f64, f64)> = atoms.into_iter().filter(|a| a.1 > 0.0).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (x, w) in sorted {
            match merged.last_mut() {
                Some(last) if (x - last.0).abs() <= MERGE_TOL => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        segments.sort_by(|a, b| a.left().total_cmp(&b.left()));
        for w in segments.windows(2) {
            let slack = 1e-12 * (1.0 + w[0].right().abs());
            if w[1].left() < w[0].right() - slack {
                return Err(Error::InvalidMeasure(format!(
                    "segments [{}, {}] and [{}, {}] overlap",
                    w[0].left(),
                    w[0].right(),
                    w[1].left(),
                    w[1].right()
                )));
            }
        }
        let m = Self::assemble(merged, segments);
        let mass = m.total().0;
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {mass} is not 1")));
        }
        if merged_is_empty(&m) {
            return Err(Error::InvalidMeasure("empty measure".into()));
        }
        Ok(m)
    }

    fn assemble(atoms: Vec<(f64, f64)>, segments: Vec<Segment>) -> Self {
        let atom_x: Vec<f64> = atoms.iter().map(|a| a.0).collect();
        let mut atom_suffix = vec![(0.0, 0.0); atoms.len() + 1];
        for i in (0..atoms.len()).rev() {
            let (x, w) = atoms[i];
            atom_suffix[i] = (atom_suffix[i + 1].0 + w, atom_suffix[i + 1].1 + w * x);
        }
        let cells: Vec<Cell> = segments.iter().flat_map(|s| s.cells()).collect();
        let mut cell_suffix = vec![(0.0, 0.0); cells.len() + 1];
        for i in (0..cells.len()).rev() {
            let c = &cells[i];
            cell_suffix[i] = (cell_suffix[i + 1].0 + c.mass, cell_suffix[i + 1].1 + c.m1);
        }
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        if let (Some(f), Some(l)) = (atoms.first(), atoms.last()) {
            lower = f.0;
            upper = l.0;
        }
        if let Some(c) = cells.iter().find(|c| c.positive()) {
            lower = lower.min(c.a);
        }
        if let Some(c) = cells.iter().rev().find(|c| c.positive()) {
            upper = upper.max(c.b);
        }
        Self {
            atoms,
            segments,
            atom_x,
            atom_suffix,
            cells,
            cell_suffix,
            lower,
            upper,
        }
    }

    pub fn dirac(x: f64) -> Result<Self> {
        Self::new(vec![(x, 1.0)], vec![])
    }

    pub fn from_atoms(atoms: &[(f64, f64)]) -> Result<Self> {
        Self::new(atoms.to_vec(), vec![])
    }

    /// Uniform law on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidArgument(format!("uniform on [{a}, {b}]")));
        }
        let h = 1.0 / (b - a);
        Self::new(vec![], vec![Segment::new(vec![a, b], vec![h, h])?])
    }

    pub fn from_spec(spec: &MeasureSpec) -> Result<Self> {
        let atoms = spec.atoms.iter().map(|a| (a[0], a[1])).collect();
        let segments = spec
            .segments
            .iter()
            .map(|s| Segment::uniform_grid(s.left, s.right, s.density.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms, segments)
    }

    /// JSON form. Segments with irregular breakpoints are written one cell
    /// per segment so that the equal-spacing convention of the format holds.
    pub fn to_spec(&self) -> MeasureSpec {
        let atoms = self.atoms.iter().map(|&(x, w)| [x, w]).collect();
        let mut segments = Vec::new();
        for s in &self.segments {
            if s.is_equally_spaced() {
                segments.push(SegmentSpec {
                    left: s.left(),
                    right: s.right(),
                    density: s.density.clone(),
                });
            } else {
                for c in s.cells() {
                    segments.push(SegmentSpec {
                        left: c.a,
                        right: c.b,
                        density: vec![c.fa, c.fb],
                    });
                }
            }
        }
        MeasureSpec { atoms, segments }
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_atomic(&self) -> bool {
        self.cells.iter().all(|c| !c.positive())
    }

    fn total(&self) -> (f64, f64) {
        let a = self.atom_suffix[0];
        let c = self.cell_suffix[0];
        (a.0 + c.0, a.1 + c.1)
    }

    /// Mass and first moment of `[x,∞)` (closed) or `(x,∞)` (open).
    fn tail(&self, x: f64, closed: bool) -> (f64, f64) {
        let ia = if closed {
            self.atom_x.partition_point(|&a| a < x)
        } else {
            self.atom_x.partition_point(|&a| a <= x)
        };
        let (mut m0, mut m1) = self.atom_suffix[ia];
        let k = self.cells.partition_point(|c| c.b <= x);
        if k < self.cells.len() {
            let c = &self.cells[k];
            let rest = self.cell_suffix[k + 1];
            if c.a < x {
                let (p0, p1) = c.upper_part(x);
                m0 += p0 + rest.0;
                m1 += p1 + rest.1;
            } else {
                m0 += c.mass + rest.0;
                m1 += c.m1 + rest.1;
            }
        }
        (m0, m1)
    }

    fn tail_at(&self, b: Bound) -> (f64, f64) {
        match b {
            Bound::Unbounded => self.total(),
            Bound::Closed(x) => self.tail(x, true),
            Bound::Open(x) => self.tail(x, false),
        }
    }

    pub fn mean(&self) -> f64 {
        self.total().1
    }

    /// `μ([x,∞))`.
    pub fn survival(&self, x: f64) -> f64 {
        self.tail(x, true).0
    }

    /// `μ((x,∞))`.
    pub fn survival_open(&self, x: f64) -> f64 {
        self.tail(x, false).0
    }

    /// `F(x) = μ((−∞,x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        (1.0 - self.survival_open(x)).clamp(0.0, 1.0)
    }

    /// `F(x−) = μ((−∞,x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        (1.0 - self.survival(x)).clamp(0.0, 1.0)
    }

    /// Mass and first moment of the interval between `lo` and `hi`.
    pub fn moments_in(&self, lo: Bound, hi: Bound) -> (f64, f64) {
        let upper = self.tail_at(lo);
        let beyond = match hi {
            Bound::Unbounded => (0.0, 0.0),
            Bound::Closed(x) => self.tail(x, false),
            Bound::Open(x) => self.tail(x, true),
        };
        ((upper.0 - beyond.0).max(0.0), upper.1 - beyond.1)
    }

    /// `C(x) = ∫_{[x,∞)} (y − x) μ(dy)`.
    pub fn integrated_survival(&self, x: f64) -> f64 {
        if x >= self.upper {
            return 0.0;
        }
        let (m0, m1) = self.tail(x, true);
        (m1 - x * m0).max(0.0)
    }

    /// Hardy–Littlewood function, left-continuous.
    pub fn hardy_littlewood(&self, x: f64) -> f64 {
        if x >= self.upper {
            return x;
        }
        let (m0, m1) = self.tail(x, true);
        if !(m0 > 0.0) {
            return x;
        }
        (m1 / m0).max(x)
    }

    /// Right limit `Ψ(x+)`, computed from the open tail.
    pub fn hardy_littlewood_right(&self, x: f64) -> f64 {
        if x >= self.upper {
            return x;
        }
        let (m0, m1) = self.tail(x, false);
        if !(m0 > 0.0) {
            return x;
        }
        (m1 / m0).max(x)
    }

    /// Upper bound `r` of the support.
    pub fn upper_support(&self) -> f64 {
        self.upper
    }

    /// Lower bound of the support.
    pub fn lower_support(&self) -> f64 {
        self.lower
    }

    /// Law of `scale·Y + shift`.
    pub fn affine_pushforward(&self, scale: f64, shift: f64) -> Result<Measure> {
        if scale == 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "affine map with scale {scale} and shift {shift}"
            )));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|&(x, w)| (scale * x + shift, w))
            .collect();
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let mut xs: Vec<f64> = s.breaks.iter().map(|x| scale * x + shift).collect();
                let mut fs: Vec<f64> = s.density.iter().map(|f| f / scale.abs()).collect();
                if scale < 0.0 {
                    xs.reverse();
                    fs.reverse();
                }
                Segment::new(xs, fs)
            })
            .collect::<Result<Vec<_>>>()?;
        Measure::new(atoms, segments)
    }

    /// The restriction `1_I μ` to the interval between `lo` and `hi`.
    pub fn restrict(&self, lo: Bound, hi: Bound) -> SubMeasure {
        let keep = |x: f64| {
            let above = match lo {
                Bound::Unbounded => true,
                Bound::Closed(a) => x >= a,
                Bound::Open(a) => x > a,
            };
            let below = match hi {
                Bound::Unbounded => true,
                Bound::Closed(b) => x <= b,
                Bound::Open(b) => x < b,
            };
            above && below
        };
        let atoms = self.atoms.iter().copied().filter(|a| keep(a.0)).collect();
        let lo_x = match lo {
            Bound::Unbounded => f64::NEG_INFINITY,
            Bound::Closed(a) | Bound::Open(a) => a,
        };
        let hi_x = match hi {
            Bound::Unbounded => f64::INFINITY,
            Bound::Closed(b) | Bound::Open(b) => b,
        };
        let segments = self
            .segments
            .iter()
            .filter_map(|s| s.clip(lo_x, hi_x))
            .collect();
        SubMeasure { atoms, segments }
    }

    /// The whole measure as an unnormalized building block.
    pub fn to_sub(&self) -> SubMeasure {
        SubMeasure {
            atoms: self.atoms.clone(),
            segments: self.segments.clone(),
        }
    }

    /// Sorted support knots: atom locations and cell endpoints.
    pub fn knots(&self) -> Knots {
        let mut xs: Vec<f64> = self.atom_x.clone();
        for c in &self.cells {
            xs.push(c.a);
            xs.push(c.b);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let cdf = xs.iter().map(|&x| self.cdf(x)).collect();
        let cdf_left = xs.iter().map(|&x| self.cdf_left(x)).collect();
        Knots { xs, cdf, cdf_left }
    }

    /// Left-continuous generalized inverse `inf{y : F(y) ≥ p}` for `p ∈ (0,1]`.
    pub fn quantile(&self, p: f64) -> f64 {
        self.knots().quantile(self, p)
    }

    /// `C` as a piecewise-linear function; exact for atomic measures and
    /// sampled at cell endpoints plus `per_cell` interior points otherwise.
    pub fn integrated_survival_fn(&self, per_cell: usize) -> PiecewiseFn {
        let mut xs: Vec<f64> = self.atom_x.clone();
        for c in self.cells.iter().filter(|c| c.positive()) {
            for j in 0..=per_cell + 1 {
                xs.push(c.a + (c.b - c.a) * j as f64 / (per_cell + 1) as f64);
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let vals = xs.iter().map(|&x| self.integrated_survival(x)).collect();
        PiecewiseFn::continuous(
            xs,
            vals,
            Extrapolation::Linear { slope: -1.0 },
            Extrapolation::Constant,
        )
        .expect("sorted finite knots")
    }

    /// `Ψ` as a left-continuous step function (atomic measures only).
    pub fn hardy_littlewood_fn(&self) -> Result<PiecewiseFn> {
        if !self.is_atomic() {
            return Err(Error::InvalidArgument(
                "Ψ is piecewise linear only for atomic measures".into(),
            ));
        }
        let xs = self.atom_x.clone();
        let n = xs.len();
        let left_limits: Vec<f64> = xs.iter().map(|&x| self.hardy_littlewood(x)).collect();
        let mut values: Vec<f64> = (1..n).map(|k| left_limits[k]).collect();
        values.push(xs[n - 1]);
        PiecewiseFn::new(
            xs,
            values,
            left_limits,
            Side::Left,
            Extrapolation::Constant,
            Extrapolation::Linear { slope: 1.0 },
        )?
        .with_nondecreasing()
    }
}

fn merged_is_empty(m: &Measure) -> bool {
    m.atoms.is_empty() && m.cells.iter().all(|c| !c.positive())
}

/// Distribution function tabulated at the support knots of a measure.
#[derive(Debug, Clone)]
pub struct Knots {
    pub xs: Vec<f64>,
    /// `F(x_j)`.
    pub cdf: Vec<f64>,
    /// `F(x_j−)`.
    pub cdf_left: Vec<f64>,
}

impl Knots {
    pub fn quantile(&self, m: &Measure, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let j = self.cdf.partition_point(|&c| c < p);
        if j == self.xs.len() {
            return self.xs[j - 1];
        }
        if j == 0 || self.cdf_left[j] < p {
            return self.xs[j];
        }
        let (mut lo, mut hi) = (self.xs[j - 1], self.xs[j]);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if m.cdf(mid) >= p {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// `Σ wᵢ μᵢ`, with coincident atoms merged and densities overlaid.
pub fn convex_combine(weights: &[f64], ms: &[Measure]) -> Result<Measure> {
    if weights.len() != ms.len() || ms.is_empty() {
        return Err(Error::Shape(format!(
            "{} weights for {} measures",
            weights.len(),
            ms.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidArgument("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::WeightSum(total));
    }
    let mut atoms = Vec::new();
    let mut segs: Vec<Segment> = Vec::new();
    for (&w, m) in weights.iter().zip(ms) {
        if w == 0.0 {
            continue;
        }
        atoms.extend(m.atoms.iter().map(|&(x, a)| (x, a * w)));
        segs.extend(m.segments.iter().cloned().map(|s| s.scaled(w)));
    }
    Measure::new(atoms, overlay(&segs)?)
}

/// Sum of possibly overlapping density runs as disjoint runs.
pub(crate) fn overlay(segs: &[Segment]) -> Result<Vec<Segment>> {
    if segs.len() <= 1 {
        return Ok(segs.to_vec());
    }
    let mut hard: Vec<f64> = segs.iter().flat_map(|s| [s.left(), s.right()]).collect();
    hard.sort_by(f64::total_cmp);
    hard.dedup();
    let mut out = Vec::new();
    for w in hard.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let active: Vec<&Segment> = segs
            .iter()
            .filter(|s| s.left() <= lo && s.right() >= hi)
            .collect();
        if active.is_empty() {
            continue;
        }
        let mut xs = vec![lo, hi];
        for s in &active {
            xs.extend(s.breaks.iter().copied().filter(|&x| x > lo && x < hi));
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let fs = xs
            .iter()
            .map(|&x| active.iter().map(|s| s.value_at(x)).sum())
            .collect();
        out.push(Segment::new(xs, fs)?);
    }
    Ok(out)
}

/// Outcome of the four checks characterizing integrated survival functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalReport {
    pub convex: bool,
    pub nonnegative: bool,
    pub vanishes_at_infinity: bool,
    pub unit_left_slope: bool,
    pub continuous: bool,
    /// `lim_{x→−∞} C(x) + x`, the mean of the represented law.
    pub limit: Option<f64>,
}

impl SurvivalReport {
    pub fn passed(&self) -> bool {
        self.convex
            && self.nonnegative
            && self.vanishes_at_infinity
            && self.unit_left_slope
            && self.continuous
    }
}

/// Checks that `C` is convex, nonnegative, vanishes at `+∞` and has slope
/// `−1` at `−∞`.
pub fn validate_integrated_survival(c: &PiecewiseFn) -> SurvivalReport {
    let slopes = c.slopes();
    let scale = 1.0 + slopes.iter().fold(0.0_f64, |a, s| a.max(s.abs()));
    let convex = slopes.windows(2).all(|w| w[1] >= w[0] - 1e-12 * scale);
    let vals_scale = 1.0 + c.values().iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let nonnegative = c
        .values()
        .iter()
        .chain(c.left_limits())
        .all(|&v| v >= -1e-12 * vals_scale);
    let last = *c.values().last().expect("non-empty");
    let vanishes_at_infinity =
        c.right_extrapolation() == Extrapolation::Constant && last.abs() <= 1e-12 * vals_scale;
    let unit_left_slope = (c.left_extrapolation().slope() + 1.0).abs() <= 1e-12;
    let limit = unit_left_slope.then(|| c.left_limits()[0] + c.breakpoints()[0]);
    SurvivalReport {
        convex,
        nonnegative,
        vanishes_at_infinity,
        unit_left_slope,
        continuous: c.is_continuous(),
        limit,
    }
}

/// Recovers `μ = C''` from a piecewise-linear integrated survival function:
/// each slope increase becomes an atom.
pub fn measure_from_integrated_survival(c: &PiecewiseFn) -> Result<Measure> {
    let report = validate_integrated_survival(c);
    if !report.passed() {
        return Err(Error::InvalidIntegratedSurvival(format!("{report:?}")));
    }
    let slopes = c.slopes();
    let atoms: Vec<(f64, f64)> = c
        .breakpoints()
        .iter()
        .enumerate()
        .map(|(k, &x)| (x, (slopes[k + 1] - slopes[k]).max(0.0)))
        .filter(|a| a.1 > 1e-15)
        .collect();
    Measure::new(atoms, vec![])
}
