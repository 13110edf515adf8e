//! Discrete TP2 mixing kernels `p(n, i)` on `ℕ × ℕ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordering::{tp2_check, CheckOptions, GridFunction2};

/// Rows are cut once their cumulative mass reaches `1 − ROW_TAIL`.
pub const ROW_TAIL: f64 = 1e-10;
/// Rows `0..PROBE_ROWS` are TP2-checked at construction.
pub const PROBE_ROWS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    /// `p(n, i) = C(n, i) aⁱ (1 − a)ⁿ⁻ⁱ`.
    Binomial { a: f64 },
    /// `p(n, i) = C(n + i − 1, i) aⁿ (1 − a)ⁱ`.
    Negbinomial { a: f64 },
    /// Gaussian-binomial weights `[n, i]_a a^{i(i+1)/2} / ∏_{l≤n} (1 + aˡ)`.
    Qbinomial { a: f64 },
    /// `p(n, ·) = δ_n`.
    Identity,
    /// User rows; row `n` is `rows[n]`.
    Gridded { rows: Vec<Vec<f64>> },
}

/// A validated kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    spec: KernelSpec,
}

/// One kernel row with the mass removed by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub weights: Vec<f64>,
    pub tail: f64,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self> {
        match &spec {
            KernelSpec::Binomial { a } | KernelSpec::Negbinomial { a } | KernelSpec::Qbinomial { a } => {
                if !(*a > 0.0 && *a < 1.0) {
                    return Err(Error::InvalidArgument(format!("kernel parameter a={a} outside (0,1)")));
                }
            }
            KernelSpec::Identity => {}
            KernelSpec::Gridded { rows } => {
                if rows.is_empty() {
                    return Err(Error::InvalidArgument("gridded kernel has no rows".into()));
                }
                for (n, r) in rows.iter().enumerate() {
                    if r.is_empty() || r.iter().any(|v| !v.is_finite() || *v < 0.0) {
                        return Err(Error::InvalidArgument(format!(
                            "kernel row {n} must be non-empty and nonnegative"
                        )));
                    }
                    let s: f64 = r.iter().sum();
                    if (s - 1.0).abs() > 1e-10 {
                        return Err(Error::WeightSum(s));
                    }
                }
            }
        }
        let k = Self { spec };
        k.probe()?;
        Ok(k)
    }

    pub fn binomial(a: f64) -> Result<Self> {
        Self::new(KernelSpec::Binomial { a })
    }

    pub fn negbinomial(a: f64) -> Result<Self> {
        Self::new(KernelSpec::Negbinomial { a })
    }

    pub fn qbinomial(a: f64) -> Result<Self> {
        Self::new(KernelSpec::Qbinomial { a })
    }

    pub fn identity() -> Self {
        Self {
            spec: KernelSpec::Identity,
        }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// Largest row index available, if the kernel is finite.
    pub fn max_row(&self) -> Option<usize> {
        match &self.spec {
            KernelSpec::Gridded { rows } => Some(rows.len() - 1),
            _ => None,
        }
    }

    /// Row `n`, normalized to unit mass.
    pub fn row(&self, n: usize) -> Result<Row> {
        let row = match &self.spec {
            KernelSpec::Binomial { a } => {
                let mut w = Vec::with_capacity(n + 1);
                let mut c = 1.0;
                for i in 0..=n {
                    if i > 0 {
                        c *= (n - i + 1) as f64 / i as f64;
                    }
                    w.push(c * a.powi(i as i32) * (1.0 - a).powi((n - i) as i32));
                }
                Row { weights: w, tail: 0.0 }
            }
            KernelSpec::Negbinomial { a } => {
                if n == 0 {
                    Row {
                        weights: vec![1.0],
                        tail: 0.0,
                    }
                } else {
                    let mut w = vec![a.powi(n as i32)];
                    let mut cum = w[0];
                    let mut i = 0usize;
                    while cum < 1.0 - ROW_TAIL {
                        let next = w[i] * (n + i) as f64 / (i + 1) as f64 * (1.0 - a);
                        w.push(next);
                        cum += next;
                        i += 1;
                        if i > 1_000_000 {
                            return Err(Error::Truncation(format!(
                                "negative binomial row {n} did not reach 1 - {ROW_TAIL}"
                            )));
                        }
                    }
                    let tail = (1.0 - cum).max(0.0);
                    for v in &mut w {
                        *v /= cum;
                    }
                    Row { weights: w, tail }
                }
            }
            KernelSpec::Qbinomial { a } => {
                let norm: f64 = (1..=n).map(|l| 1.0 + a.powi(l as i32)).product();
                let w = (0..=n)
                    .map(|i| gaussian_binomial(n, i, *a) * a.powf((i * i + i) as f64 / 2.0) / norm)
                    .collect();
                Row { weights: w, tail: 0.0 }
            }
            KernelSpec::Identity => {
                let mut w = vec![0.0; n + 1];
                w[n] = 1.0;
                Row { weights: w, tail: 0.0 }
            }
            KernelSpec::Gridded { rows } => {
                let r = rows.get(n).ok_or_else(|| {
                    Error::InvalidArgument(format!("gridded kernel has no row {n}"))
                })?;
                let s: f64 = r.iter().sum();
                Row {
                    weights: r.iter().map(|v| v / s).collect(),
                    tail: 0.0,
                }
            }
        };
        Ok(row)
    }

    /// TP2 check of the leading rows.
    fn probe(&self) -> Result<()> {
        let n = self.max_row().map_or(PROBE_ROWS, |m| (m + 1).min(PROBE_ROWS));
        let rows: Vec<Row> = (0..n).map(|k| self.row(k)).collect::<Result<_>>()?;
        let width = rows.iter().map(|r| r.weights.len()).max().unwrap_or(1).min(64);
        let values: Vec<f64> = rows
            .iter()
            .flat_map(|r| (0..width).map(move |i| r.weights.get(i).copied().unwrap_or(0.0)))
            .collect();
        let axis = |m: usize| (0..m).map(|v| v as f64).collect::<Vec<_>>();
        let g = GridFunction2::new(axis(n), axis(width), values)?;
        let rep = tp2_check(&g, &CheckOptions::default());
        if !rep.holds() {
            return Err(Error::KernelNotTp2(format!(
                "worst minor {:.3e} at {:?}",
                rep.worst,
                rep.witness.map(|w| w.indices)
            )));
        }
        Ok(())
    }
}

/// `[n, i]_a = ∏_{j<i} (1 − a^{n−j}) / (1 − a^{j+1})`.
pub fn gaussian_binomial(n: usize, i: usize, a: f64) -> f64 {
    if i > n {
        return 0.0;
    }
    (0..i)
        .map(|j| (1.0 - a.powi((n - j) as i32)) / (1.0 - a.powi((j + 1) as i32)))
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_rows() {
        let k = Kernel::binomial(0.5).unwrap();
        assert_eq!(k.row(2).unwrap().weights, vec![0.25, 0.5, 0.25]);
        assert_eq!(k.row(0).unwrap().weights, vec![1.0]);
        // TP2 minor over rows {1,2} and columns {0,1}
        let (r1, r2) = (k.row(1).unwrap().weights, k.row(2).unwrap().weights);
        assert!(r1[0] * r2[1] - r1[1] * r2[0] >= 0.0);
    }

    #[test]
    fn rows_have_unit_mass() {
        for k in [
            Kernel::binomial(0.3).unwrap(),
            Kernel::negbinomial(0.4).unwrap(),
            Kernel::qbinomial(0.6).unwrap(),
        ] {
            for n in 0..7 {
                let s: f64 = k.row(n).unwrap().weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "{:?} row {n}: {s}", k.spec());
            }
        }
    }

    #[test]
    fn negbinomial_tail_is_small() {
        let r = Kernel::negbinomial(0.5).unwrap().row(3).unwrap();
        assert!(r.tail <= ROW_TAIL);
        // P(0) = aⁿ before renormalization
        assert!((r.weights[0] - 0.125).abs() < 1e-10);
    }

    #[test]
    fn gaussian_binomial_small_cases() {
        assert_eq!(gaussian_binomial(0, 0, 0.5), 1.0);
        assert!((gaussian_binomial(2, 1, 0.5) - 1.5).abs() < 1e-15);
        assert_eq!(gaussian_binomial(2, 3, 0.5), 0.0);
    }

    #[test]
    fn invalid_parameters() {
        assert!(Kernel::binomial(1.0).is_err());
        assert!(Kernel::negbinomial(0.0).is_err());
        let bad = KernelSpec::Gridded {
            rows: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
        };
        assert!(matches!(Kernel::new(bad), Err(Error::KernelNotTp2(_))));
    }
}
