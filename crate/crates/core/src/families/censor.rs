//! Censoring transforms: part of the law above a moving level is replaced
//! by two atoms carrying the same mass and (up to the `ε` drift) the same
//! first moment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Bound, Measure, MeasureSpec, SubMeasure};

fn finite_support(nu: &Measure) -> Result<f64> {
    let r = nu.upper_support();
    if !r.is_finite() {
        return Err(Error::FamilyConstraint("upper support bound must be finite".into()));
    }
    Ok(r)
}

fn nonneg_weight(w: f64) -> f64 {
    if w < 0.0 && w > -1e-13 {
        0.0
    } else {
        w
    }
}

/// One-parameter base `ν_t` for the general censor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaseSpec {
    /// `ν_t` is the law of `Y + speed·t` with `Y ∼ nu`.
    Translate {
        nu: MeasureSpec,
        #[serde(default)]
        speed: f64,
    },
}

/// `c0 + t·(t) + tprime·(t')`, with `c0` fixed to the base's support bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slopes {
    pub t: f64,
    pub tprime: f64,
}

/// `μ_t = 1_{(−∞,φ)}ν_t + α δ_φ + β δ_ψ`.
#[derive(Debug, Clone)]
pub struct GeneralCensor {
    nu: Measure,
    speed: f64,
    r0: f64,
    phi: Slopes,
    psi: Slopes,
}

impl GeneralCensor {
    pub fn new(base: &BaseSpec, phi: Slopes, psi: Slopes) -> Result<Self> {
        let BaseSpec::Translate { nu, speed } = base;
        let nu = Measure::from_spec(nu)?;
        let r0 = finite_support(&nu)?;
        let fin = [speed, &phi.t, &phi.tprime, &psi.t, &psi.tprime];
        if fin.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("censor coefficients must be finite".into()));
        }
        if *speed < 0.0 {
            return Err(Error::FamilyConstraint("translation speed must be nonnegative".into()));
        }
        if phi.t > 0.0 || phi.tprime > 0.0 {
            return Err(Error::FamilyConstraint("φ must be non-increasing".into()));
        }
        if psi.t < 0.0 || psi.tprime < 0.0 {
            return Err(Error::FamilyConstraint("ψ must be non-decreasing".into()));
        }
        if psi.t < *speed {
            return Err(Error::FamilyConstraint(format!(
                "ψ grows at rate {} in t but the support bound grows at rate {speed}",
                psi.t
            )));
        }
        if !(psi.t - phi.t > 0.0 && psi.tprime - phi.tprime > 0.0) {
            return Err(Error::FamilyConstraint(
                "ψ − φ must be positive off the origin".into(),
            ));
        }
        Ok(Self {
            nu,
            speed: *speed,
            r0,
            phi,
            psi,
        })
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn levels(&self, t: f64, tp: f64) -> (f64, f64) {
        (
            self.r0 + self.phi.t * t + self.phi.tprime * tp,
            self.r0 + self.psi.t * t + self.psi.tprime * tp,
        )
    }

    pub fn base_at(&self, t: f64) -> Result<Measure> {
        if self.speed == 0.0 {
            Ok(self.nu.clone())
        } else {
            self.nu.affine_pushforward(1.0, self.speed * t)
        }
    }

    /// `(α, β)` solving the mass and first-moment balance above `φ`.
    pub fn weights(&self, nu_t: &Measure, phi: f64, psi: f64) -> (f64, f64) {
        let (m0, m1) = nu_t.moments_in(Bound::Closed(phi), Bound::Unbounded);
        (
            nonneg_weight((psi * m0 - m1) / (psi - phi)),
            nonneg_weight((m1 - phi * m0) / (psi - phi)),
        )
    }

    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        let nu_t = self.base_at(t)?;
        if t == 0.0 && tp == 0.0 {
            return Ok(nu_t);
        }
        let (phi, psi) = self.levels(t, tp);
        let (a, b) = self.weights(&nu_t, phi, psi);
        let mut sub = nu_t.restrict(Bound::Unbounded, Bound::Open(phi));
        sub.add_atom(phi, a);
        sub.add_atom(psi, b);
        sub.into_measure()
    }

    pub fn psi(&self, t: f64, tp: f64, x: f64) -> Result<f64> {
        let nu_t = self.base_at(t)?;
        if t == 0.0 && tp == 0.0 {
            return Ok(nu_t.hardy_littlewood(x));
        }
        let (phi, psi) = self.levels(t, tp);
        let (_, b) = self.weights(&nu_t, phi, psi);
        Ok(if x <= phi {
            nu_t.hardy_littlewood(x)
        } else if x <= psi && b > 0.0 {
            psi
        } else {
            x
        })
    }

    pub fn c(&self, t: f64, tp: f64, x: f64) -> Result<f64> {
        let nu_t = self.base_at(t)?;
        if t == 0.0 && tp == 0.0 {
            return Ok(nu_t.integrated_survival(x));
        }
        let (phi, psi) = self.levels(t, tp);
        let (_, b) = self.weights(&nu_t, phi, psi);
        Ok(if x < phi {
            nu_t.integrated_survival(x)
        } else if x < psi {
            b * (psi - x)
        } else {
            0.0
        })
    }
}

/// `μ_t = 1_{(−∞,r−t)}ν + α δ_{r−t} + β δ_{r+(1+ε)t'}` with the weights of the
/// mass-and-mean preserving censor to `{r − t, r + t'}`; `μ_{(0,t')} = ν`.
#[derive(Debug, Clone)]
pub struct CensorEps {
    nu: Measure,
    r: f64,
    eps: f64,
}

impl CensorEps {
    /// `anchor` defaults to the support bound of `ν` and may not lie below it.
    pub fn new(nu: Measure, anchor: Option<f64>, eps: f64) -> Result<Self> {
        let top = finite_support(&nu)?;
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("ε must be finite and ≥ 0, got {eps}")));
        }
        let r = anchor.unwrap_or(top);
        if !r.is_finite() || r < top {
            return Err(Error::FamilyConstraint(format!(
                "anchor {r} lies below the support bound {top}"
            )));
        }
        Ok(Self { nu, r, eps })
    }

    pub fn nu(&self) -> &Measure {
        &self.nu
    }

    pub fn anchor(&self) -> f64 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `β̃(t) = C_ν(r − t)`.
    pub fn beta_tilde(&self, t: f64) -> f64 {
        self.nu.integrated_survival(self.r - t)
    }

    pub fn weights(&self, t: f64, tp: f64) -> (f64, f64) {
        let lo = self.r - t;
        let (m0, m1) = self.nu.moments_in(Bound::Closed(lo), Bound::Closed(self.r));
        let d = t + tp;
        (
            nonneg_weight(((self.r + tp) * m0 - m1) / d),
            nonneg_weight((m1 - lo * m0) / d),
        )
    }

    fn interior(&self, t: f64) -> bool {
        t > 0.0
    }

    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        if !self.interior(t) {
            return Ok(self.nu.clone());
        }
        let (a, b) = self.weights(t, tp);
        let mut sub = self.nu.restrict(Bound::Unbounded, Bound::Open(self.r - t));
        sub.add_atom(self.r - t, a);
        sub.add_atom(self.r + (1.0 + self.eps) * tp, b);
        sub.into_measure()
    }

    /// Closed-form `C`.
    pub fn c(&self, t: f64, tp: f64, x: f64) -> f64 {
        if !self.interior(t) {
            return self.nu.integrated_survival(x);
        }
        let bt = self.beta_tilde(t);
        let top = self.r + (1.0 + self.eps) * tp;
        if x < self.r - t {
            self.nu.integrated_survival(x) + self.eps * tp * bt / (t + tp)
        } else if x < top {
            bt * (top - x) / (t + tp)
        } else {
            0.0
        }
    }

    /// Closed-form `Ψ`.
    pub fn psi(&self, t: f64, tp: f64, x: f64) -> f64 {
        if !self.interior(t) {
            return self.nu.hardy_littlewood(x);
        }
        let bt = self.beta_tilde(t);
        let top = self.r + (1.0 + self.eps) * tp;
        if x <= self.r - t {
            let s = self.nu.survival(x);
            if s > 0.0 {
                self.nu.hardy_littlewood(x) + self.eps * tp * bt / ((t + tp) * s)
            } else {
                x
            }
        } else if x <= top && bt > 0.0 {
            top
        } else {
            x
        }
    }

    /// `K` with `∫|y| μ_t ≤ K (1 + t)(1 + t')`.
    pub fn moment_bound(&self) -> f64 {
        (abs_moment(&self.nu) + self.r.abs()).max(2.0).max(1.0 + self.eps)
    }
}

/// `∫ |y| μ(dy)`.
pub fn abs_moment(m: &Measure) -> f64 {
    let (_, neg) = m.moments_in(Bound::Unbounded, Bound::Open(0.0));
    m.mean() - 2.0 * neg
}

/// The non-MRL family: mass of `ν` on `[r − t, r + t']` is censored to
/// `{r − t, r + t'}`, and the part coming from `[r − t, r]` is then pushed
/// up by `ε t'`.
#[derive(Debug, Clone)]
pub struct NonMrl {
    nu: Measure,
    r: f64,
    eps: f64,
}

/// The pieces of [`NonMrl`]: `full = weight·η + (1 − weight)·σ`.
#[derive(Debug, Clone)]
pub struct Split {
    pub nu_minus: Measure,
    pub nu_plus: Measure,
    pub weight: f64,
}

impl NonMrl {
    pub fn new(nu: Measure, r: f64, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("need finite r and ε ≥ 0, got r={r}, ε={eps}")));
        }
        let w = nu.cdf(r);
        if !(w > 0.0 && w < 1.0) {
            return Err(Error::FamilyConstraint(format!(
                "ν puts mass {w} on (−∞, {r}]; both sides need positive mass"
            )));
        }
        Ok(Self { nu, r, eps })
    }

    pub fn nu(&self) -> &Measure {
        &self.nu
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn split(&self) -> Result<Split> {
        let lo = self.nu.restrict(Bound::Unbounded, Bound::Closed(self.r));
        let hi = self.nu.restrict(Bound::Open(self.r), Bound::Unbounded);
        let weight = self.nu.cdf(self.r);
        Ok(Split {
            nu_minus: lo.normalized()?,
            nu_plus: hi.normalized()?,
            weight,
        })
    }

    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        if t == 0.0 && tp == 0.0 {
            return Ok(self.nu.clone());
        }
        let (a, b, c) = (self.r - t, self.r + tp, self.r + (1.0 + self.eps) * tp);
        let d = t + tp;
        let (m0l, m1l) = self.nu.moments_in(Bound::Closed(a), Bound::Closed(self.r));
        let (m0h, m1h) = self.nu.moments_in(Bound::Open(self.r), Bound::Closed(b));
        let beta_lo = nonneg_weight((m1l - a * m0l) / d);
        let beta_hi = nonneg_weight((m1h - a * m0h) / d);
        let alpha = nonneg_weight((b * (m0l + m0h) - (m1l + m1h)) / d);
        let mut sub = self.nu.restrict(Bound::Unbounded, Bound::Open(a));
        sub.extend(self.nu.restrict(Bound::Open(b), Bound::Unbounded));
        sub.add_atom(a, alpha);
        sub.add_atom(b, beta_hi);
        sub.add_atom(c, beta_lo);
        sub.into_measure()
    }

    /// Closed-form `Ψ` when `ε = 0`.
    pub fn psi_mu0(&self, t: f64, tp: f64, x: f64) -> Option<f64> {
        if self.eps != 0.0 {
            return None;
        }
        let (a, b) = (self.r - t, self.r + tp);
        if (t == 0.0 && tp == 0.0) || x <= a || x > b {
            return Some(self.nu.hardy_littlewood(x));
        }
        let (ca, cb) = (self.nu.integrated_survival(a), self.nu.integrated_survival(b));
        Some(if ca > cb {
            self.r + (tp * ca + t * cb) / (ca - cb)
        } else {
            x
        })
    }

    /// Closed-form `C` when `ε = 0`.
    pub fn c_mu0(&self, t: f64, tp: f64, x: f64) -> Option<f64> {
        if self.eps != 0.0 {
            return None;
        }
        let (a, b) = (self.r - t, self.r + tp);
        if (t == 0.0 && tp == 0.0) || x < a || x >= b {
            return Some(self.nu.integrated_survival(x));
        }
        let (ca, cb) = (self.nu.integrated_survival(a), self.nu.integrated_survival(b));
        Some((b - x) * (ca - cb) / (t + tp) + cb)
    }
}

/// Upper part of the split: `σ_{(t,0)} = ν⁺` and, for `t' > 0`,
/// `α δ_{r−t} + β δ_{r+t'} + 1_{(r+t',∞)} ν⁺`.
#[derive(Debug, Clone)]
pub struct Sigma {
    nu_plus: Measure,
    r: f64,
}

impl Sigma {
    pub fn new(nu_plus: Measure, r: f64) -> Result<Self> {
        if nu_plus.survival_open(r) < 1.0 - 1e-12 {
            return Err(Error::FamilyConstraint(format!(
                "upper part must live on ({r}, ∞)"
            )));
        }
        Ok(Self { nu_plus, r })
    }

    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        if tp == 0.0 {
            return Ok(self.nu_plus.clone());
        }
        let (a, b) = (self.r - t, self.r + tp);
        let (m0, m1) = self.nu_plus.moments_in(Bound::Open(self.r), Bound::Closed(b));
        let d = t + tp;
        let mut sub: SubMeasure = self.nu_plus.restrict(Bound::Open(b), Bound::Unbounded);
        sub.add_atom(a, nonneg_weight((b * m0 - m1) / d));
        sub.add_atom(b, nonneg_weight((m1 - a * m0) / d));
        sub.into_measure()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_censor_matches_hand_computation() {
        let c = CensorEps::new(Measure::dirac(0.0).unwrap(), None, 0.0).unwrap();
        let m = c.measure_at(1.0, 3.0).unwrap();
        let want = Measure::from_atoms(&[(-1.0, 0.75), (3.0, 0.25)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        for (p, q) in m.atoms().iter().zip(want.atoms()) {
            assert!((p.0 - q.0).abs() < 1e-15 && (p.1 - q.1).abs() < 1e-15);
        }
    }

    #[test]
    fn eps_middle_branch() {
        let c = CensorEps::new(Measure::dirac(0.0).unwrap(), None, 1.0).unwrap();
        assert!((c.c(1.0, 1.0, 0.0) - 1.0).abs() < 1e-15);
        let m = c.measure_at(1.0, 1.0).unwrap();
        assert!((m.integrated_survival(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nonmrl_split_is_symmetric_for_uniform() {
        let f = NonMrl::new(Measure::uniform(-1.0, 1.0).unwrap(), 0.0, 0.5).unwrap();
        let s = f.split().unwrap();
        assert!((s.weight - 0.5).abs() < 1e-15);
        assert_eq!(s.nu_minus.upper_support(), 0.0);
        assert_eq!(s.nu_plus.lower_support(), 0.0);
        assert!((s.nu_minus.mean() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn degenerate_split_rejected() {
        assert!(NonMrl::new(Measure::uniform(-1.0, 1.0).unwrap(), 1.0, 0.0).is_err());
    }

    #[test]
    fn general_censor_constraints() {
        let base = BaseSpec::Translate {
            nu: Measure::dirac(0.0).unwrap().to_spec(),
            speed: 1.0,
        };
        let phi = Slopes { t: -1.0, tprime: 0.0 };
        assert!(GeneralCensor::new(&base, phi, Slopes { t: 1.0, tprime: 1.0 }).is_ok());
        assert!(GeneralCensor::new(&base, phi, Slopes { t: 0.5, tprime: 1.0 }).is_err());
        assert!(GeneralCensor::new(&base, Slopes { t: 1.0, tprime: 0.0 }, Slopes { t: 1.0, tprime: 1.0 }).is_err());
    }
}
