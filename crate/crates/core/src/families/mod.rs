//! Two-parameter families `(t, t') ↦ μ_t` with their declared properties.
//!
//! [`ProcessFamily`] is an immutable value built from a [`FamilySpec`].
//! Families with explicit formulas also expose closed-form `Ψ` and `C`
//! oracles, which the tests compare against the generic evaluators of
//! [`Measure`].

mod censor;
mod closed;
mod kernels;

use serde::{Deserialize, Serialize};

pub use censor::{abs_moment, BaseSpec, CensorEps, GeneralCensor, NonMrl, Sigma, Slopes, Split};
pub use closed::{kemperman_phi, kemperman_value, Diatomic, Example33};
pub use kernels::{gaussian_binomial, Kernel, KernelSpec, Row, PROBE_ROWS, ROW_TAIL};

use crate::convolve::{convolve, ConvolveOptions, DensitySpec};
use crate::error::{Error, Result};
use crate::measure::{convex_combine, Measure, MeasureSpec};
use crate::montecarlo::par_map;
use crate::ordering::{default_time_axis, default_x_axis, Grid3, GridFunction3};

/// Which member of the non-MRL decomposition a spec refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    #[default]
    Full,
    Eta,
    Sigma,
    /// Image of `σ` under `x ↦ −x`.
    SigmaReflected,
}

/// JSON description of a family, e.g. `{"family":"diatomic","eps":0.5,"r":0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Constant {
        nu: MeasureSpec,
    },
    Diatomic {
        eps: f64,
        r: f64,
    },
    Example33 {},
    Censor {
        base: BaseSpec,
        phi: Slopes,
        psi: Slopes,
    },
    CensorMzero {
        nu: MeasureSpec,
    },
    CensorEps {
        nu: MeasureSpec,
        eps: f64,
    },
    Nonmrl {
        nu: MeasureSpec,
        r: f64,
        eps: f64,
        #[serde(default)]
        part: Part,
    },
    Subordinate {
        base: Box<FamilySpec>,
        kt: KernelSpec,
        ktp: KernelSpec,
    },
    Convolve {
        base: Box<FamilySpec>,
        density: DensitySpec,
        #[serde(default)]
        options: ConvolveOptions,
    },
    Reflect {
        base: Box<FamilySpec>,
    },
}

/// Properties a family claims; the tests treat them as expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyMeta {
    pub mrl: bool,
    pub mtp2: bool,
    pub constant_mean: bool,
    /// `K` with `∫|y| μ_t ≤ K (1 + t)(1 + t')`, when known.
    pub moment_k: Option<f64>,
    /// Parameters must be nonnegative integers.
    pub integer_grid: bool,
}

#[derive(Debug, Clone)]
enum Kind {
    Constant(Measure),
    Diatomic(Diatomic),
    Example33,
    Censor(GeneralCensor),
    CensorEps(CensorEps),
    NonMrl(NonMrl),
    Sigma(Sigma),
    Reflect(Box<ProcessFamily>),
    Convolve {
        base: Box<ProcessFamily>,
        density: DensitySpec,
        options: ConvolveOptions,
    },
    Subordinate(Box<Subordinated>),
}

#[derive(Debug, Clone)]
struct Subordinated {
    base: ProcessFamily,
    kt: Kernel,
    ktp: Kernel,
    fitted_k: f64,
}

/// A two-parameter family of integrable laws.
#[derive(Debug, Clone)]
pub struct ProcessFamily {
    spec: FamilySpec,
    kind: Kind,
    meta: FamilyMeta,
}

/// The decomposition returned by [`nonmrl_eps`].
#[derive(Debug, Clone)]
pub struct NonMrlFamilies {
    pub full: ProcessFamily,
    pub eta: ProcessFamily,
    pub sigma: ProcessFamily,
    pub sigma_reflected: ProcessFamily,
    pub weight: f64,
    pub nu_minus: Measure,
    pub nu_plus: Measure,
}

const fn meta(mrl: bool, mtp2: bool, constant_mean: bool, moment_k: Option<f64>) -> FamilyMeta {
    FamilyMeta {
        mrl,
        mtp2,
        constant_mean,
        moment_k,
        integer_grid: false,
    }
}

pub fn constant(nu: Measure) -> ProcessFamily {
    let k = abs_moment(&nu);
    ProcessFamily {
        spec: FamilySpec::Constant { nu: nu.to_spec() },
        kind: Kind::Constant(nu),
        meta: meta(true, true, true, Some(k)),
    }
}

pub fn diatomic(eps: f64, r: f64) -> Result<ProcessFamily> {
    let d = Diatomic::new(eps, r)?;
    Ok(ProcessFamily {
        spec: FamilySpec::Diatomic { eps, r },
        kind: Kind::Diatomic(d),
        meta: meta(true, true, false, Some(d.moment_bound())),
    })
}

pub fn counterexample_mrl_not_mtp2() -> ProcessFamily {
    ProcessFamily {
        spec: FamilySpec::Example33 {},
        kind: Kind::Example33,
        meta: meta(true, false, true, Some(Example33.moment_bound())),
    }
}

pub fn censor(base: BaseSpec, phi: Slopes, psi: Slopes) -> Result<ProcessFamily> {
    let c = GeneralCensor::new(&base, phi, psi)?;
    let constant_mean = c.speed() == 0.0;
    Ok(ProcessFamily {
        spec: FamilySpec::Censor { base, phi, psi },
        kind: Kind::Censor(c),
        meta: meta(true, false, constant_mean, None),
    })
}

pub fn censor_mzero(nu: Measure) -> Result<ProcessFamily> {
    let mut f = censor_eps(nu, 0.0)?;
    if let FamilySpec::CensorEps { nu, .. } = &f.spec {
        f.spec = FamilySpec::CensorMzero { nu: nu.clone() };
    }
    Ok(f)
}

pub fn censor_eps(nu: Measure, eps: f64) -> Result<ProcessFamily> {
    let spec = FamilySpec::CensorEps {
        nu: nu.to_spec(),
        eps,
    };
    let c = CensorEps::new(nu, None, eps)?;
    let k = c.moment_bound();
    Ok(ProcessFamily {
        spec,
        kind: Kind::CensorEps(c),
        meta: meta(true, true, eps == 0.0, Some(k)),
    })
}

/// The non-MRL family together with its `η`/`σ` decomposition.
pub fn nonmrl_eps(nu: Measure, r: f64, eps: f64) -> Result<NonMrlFamilies> {
    let nu_spec = nu.to_spec();
    let spec = |part| FamilySpec::Nonmrl {
        nu: nu_spec.clone(),
        r,
        eps,
        part,
    };
    let full = NonMrl::new(nu, r, eps)?;
    let Split {
        nu_minus,
        nu_plus,
        weight,
    } = full.split()?;
    let eta_c = CensorEps::new(nu_minus.clone(), Some(r), eps)?;
    let eta_k = eta_c.moment_bound();
    let eta = ProcessFamily {
        spec: spec(Part::Eta),
        kind: Kind::CensorEps(eta_c),
        meta: meta(true, true, eps == 0.0, Some(eta_k)),
    };
    let sigma = ProcessFamily {
        spec: spec(Part::Sigma),
        kind: Kind::Sigma(Sigma::new(nu_plus.clone(), r)?),
        meta: meta(false, false, true, None),
    };
    let sigma_reflected = ProcessFamily {
        spec: spec(Part::SigmaReflected),
        kind: Kind::Reflect(Box::new(sigma.clone())),
        meta: meta(true, true, true, None),
    };
    let full = ProcessFamily {
        spec: spec(Part::Full),
        kind: Kind::NonMrl(full),
        meta: meta(false, false, eps == 0.0, None),
    };
    Ok(NonMrlFamilies {
        full,
        eta,
        sigma,
        sigma_reflected,
        weight,
        nu_minus,
        nu_plus,
    })
}

/// Image of a family under `x ↦ −x`.
pub fn reflect(base: ProcessFamily) -> ProcessFamily {
    let sigma = matches!(base.kind, Kind::Sigma(_));
    let m = FamilyMeta {
        mrl: sigma,
        mtp2: sigma,
        constant_mean: base.meta.constant_mean,
        moment_k: base.meta.moment_k,
        integer_grid: base.meta.integer_grid,
    };
    ProcessFamily {
        spec: FamilySpec::Reflect {
            base: Box::new(base.spec.clone()),
        },
        kind: Kind::Reflect(Box::new(base)),
        meta: m,
    }
}

/// `ξ_t = μ_t ⋆ f` for a log-concave density `f`.
pub fn convolved(base: ProcessFamily, density: DensitySpec, options: ConvolveOptions) -> Result<ProcessFamily> {
    crate::convolve::LogConcaveDensity::new(&density, options.tail_mass)?;
    let m = FamilyMeta {
        mrl: base.meta.mrl,
        mtp2: false,
        constant_mean: base.meta.constant_mean,
        moment_k: None,
        integer_grid: base.meta.integer_grid,
    };
    Ok(ProcessFamily {
        spec: FamilySpec::Convolve {
            base: Box::new(base.spec.clone()),
            density: density.clone(),
            options: options.clone(),
        },
        kind: Kind::Convolve {
            base: Box::new(base),
            density,
            options,
        },
        meta: m,
    })
}

/// Rows `0..=MOMENT_PROBE` of both parameters are used to fit `K`.
pub const MOMENT_PROBE: usize = 8;

/// `σ_{(n,m)} = Σ_{i,j} p(n,i) q(m,j) μ_{(i,j)}` on `ℕ²`.
pub fn subordinate(base: ProcessFamily, kt: Kernel, ktp: Kernel) -> Result<ProcessFamily> {
    if !base.meta.mtp2 {
        return Err(Error::FamilyConstraint(
            "subordination needs a base with MTP2 integrated survival function".into(),
        ));
    }
    let mut fitted_k: f64 = 0.0;
    for i in 0..=MOMENT_PROBE {
        for j in 0..=MOMENT_PROBE {
            let m = base.measure_at(i as f64, j as f64)?;
            let ratio = abs_moment(&m) / ((1.0 + i as f64) * (1.0 + j as f64));
            fitted_k = fitted_k.max(ratio);
        }
    }
    if let Some(k) = base.meta.moment_k {
        if fitted_k > k * (1.0 + 1e-9) {
            return Err(Error::MomentBound(format!(
                "fitted K = {fitted_k} exceeds declared K = {k}"
            )));
        }
    }
    let spec = FamilySpec::Subordinate {
        base: Box::new(base.spec.clone()),
        kt: kt.spec().clone(),
        ktp: ktp.spec().clone(),
    };
    let m = FamilyMeta {
        mrl: true,
        mtp2: true,
        constant_mean: base.meta.constant_mean,
        moment_k: None,
        integer_grid: true,
    };
    Ok(ProcessFamily {
        spec,
        kind: Kind::Subordinate(Box::new(Subordinated {
            base,
            kt,
            ktp,
            fitted_k,
        })),
        meta: m,
    })
}

fn as_index(v: f64) -> Result<usize> {
    let n = v.round();
    if v < 0.0 || (v - n).abs() > 1e-9 || n > 1e6 {
        return Err(Error::InvalidArgument(format!(
            "subordinated families are indexed by naturals, got {v}"
        )));
    }
    Ok(n as usize)
}

fn check_point(t: f64, tp: f64) -> Result<()> {
    if !(t >= 0.0 && tp >= 0.0 && t.is_finite() && tp.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "({t}, {tp}) is outside the closed first quadrant"
        )));
    }
    Ok(())
}

impl ProcessFamily {
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        match spec {
            FamilySpec::Constant { nu } => Ok(constant(Measure::from_spec(nu)?)),
            FamilySpec::Diatomic { eps, r } => diatomic(*eps, *r),
            FamilySpec::Example33 {} => Ok(counterexample_mrl_not_mtp2()),
            FamilySpec::Censor { base, phi, psi } => censor(base.clone(), *phi, *psi),
            FamilySpec::CensorMzero { nu } => censor_mzero(Measure::from_spec(nu)?),
            FamilySpec::CensorEps { nu, eps } => censor_eps(Measure::from_spec(nu)?, *eps),
            FamilySpec::Nonmrl { nu, r, eps, part } => {
                let f = nonmrl_eps(Measure::from_spec(nu)?, *r, *eps)?;
                Ok(match part {
                    Part::Full => f.full,
                    Part::Eta => f.eta,
                    Part::Sigma => f.sigma,
                    Part::SigmaReflected => f.sigma_reflected,
                })
            }
            FamilySpec::Subordinate { base, kt, ktp } => subordinate(
                Self::from_spec(base)?,
                Kernel::new(kt.clone())?,
                Kernel::new(ktp.clone())?,
            ),
            FamilySpec::Convolve {
                base,
                density,
                options,
            } => convolved(Self::from_spec(base)?, density.clone(), options.clone()),
            FamilySpec::Reflect { base } => Ok(reflect(Self::from_spec(base)?)),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: FamilySpec = serde_json::from_str(s)
            .map_err(|e| Error::InvalidArgument(format!("family spec: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn meta(&self) -> FamilyMeta {
        self.meta
    }

    pub fn name(&self) -> String {
        match &self.spec {
            FamilySpec::Constant { .. } => "constant".into(),
            FamilySpec::Diatomic { .. } => "diatomic".into(),
            FamilySpec::Example33 {} => "example33".into(),
            FamilySpec::Censor { .. } => "censor".into(),
            FamilySpec::CensorMzero { .. } => "censor_mzero".into(),
            FamilySpec::CensorEps { .. } => "censor_eps".into(),
            FamilySpec::Nonmrl { part, .. } => match part {
                Part::Full => "nonmrl".into(),
                Part::Eta => "nonmrl_eta".into(),
                Part::Sigma => "nonmrl_sigma".into(),
                Part::SigmaReflected => "nonmrl_sigma_reflected".into(),
            },
            FamilySpec::Subordinate { .. } => "subordinate".into(),
            FamilySpec::Convolve { .. } => "convolve".into(),
            FamilySpec::Reflect { .. } => "reflect".into(),
        }
    }

    /// `μ_t` at `(t, t')`.
    pub fn measure_at(&self, t: f64, tp: f64) -> Result<Measure> {
        check_point(t, tp)?;
        match &self.kind {
            Kind::Constant(nu) => Ok(nu.clone()),
            Kind::Diatomic(d) => d.measure_at(t, tp),
            Kind::Example33 => Example33.measure_at(t, tp),
            Kind::Censor(c) => c.measure_at(t, tp),
            Kind::CensorEps(c) => c.measure_at(t, tp),
            Kind::NonMrl(f) => f.measure_at(t, tp),
            Kind::Sigma(s) => s.measure_at(t, tp),
            Kind::Reflect(b) => b.measure_at(t, tp)?.affine_pushforward(-1.0, 0.0),
            Kind::Convolve {
                base,
                density,
                options,
            } => Ok(convolve(&base.measure_at(t, tp)?, density, options)?.measure),
            Kind::Subordinate(s) => {
                let (n, m) = (as_index(t)?, as_index(tp)?);
                let p = s.kt.row(n)?;
                let q = s.ktp.row(m)?;
                let mut weights = Vec::new();
                let mut parts = Vec::new();
                for (i, &pi) in p.weights.iter().enumerate() {
                    for (j, &qj) in q.weights.iter().enumerate() {
                        let w = pi * qj;
                        if w > 0.0 {
                            weights.push(w);
                            parts.push(s.base.measure_at(i as f64, j as f64)?);
                        }
                    }
                }
                let total: f64 = weights.iter().sum();
                for w in &mut weights {
                    *w /= total;
                }
                convex_combine(&weights, &parts)
            }
        }
    }

    /// Closed-form `Ψ`, where one is known.
    pub fn psi_oracle(&self, t: f64, tp: f64, x: f64) -> Option<f64> {
        match &self.kind {
            Kind::Constant(nu) => Some(nu.hardy_littlewood(x)),
            Kind::Diatomic(d) => Some(d.psi(t, tp, x)),
            Kind::Example33 => Some(Example33.psi(t, tp, x)),
            Kind::Censor(c) => c.psi(t, tp, x).ok(),
            Kind::CensorEps(c) => Some(c.psi(t, tp, x)),
            Kind::NonMrl(f) => f.psi_mu0(t, tp, x),
            _ => None,
        }
    }

    /// Closed-form `C`, where one is known.
    pub fn c_oracle(&self, t: f64, tp: f64, x: f64) -> Option<f64> {
        match &self.kind {
            Kind::Constant(nu) => Some(nu.integrated_survival(x)),
            Kind::Diatomic(d) => Some(d.c(t, tp, x)),
            Kind::Example33 => Some(Example33.c(t, tp, x)),
            Kind::Censor(c) => c.c(t, tp, x).ok(),
            Kind::CensorEps(c) => Some(c.c(t, tp, x)),
            Kind::NonMrl(f) => f.c_mu0(t, tp, x),
            _ => None,
        }
    }

    /// Fitted moment constant of the base of a subordinated family.
    pub fn fitted_moment_k(&self) -> Option<f64> {
        match &self.kind {
            Kind::Subordinate(s) => Some(s.fitted_k),
            _ => None,
        }
    }

    /// Bound on the `C` error caused by cutting kernel rows at `(n, m)`:
    /// removed mass times `K (1 + λ)(1 + λ')` at the cut.
    pub fn truncation_bound(&self, n: usize, m: usize) -> Result<f64> {
        match &self.kind {
            Kind::Subordinate(s) => {
                let p = s.kt.row(n)?;
                let q = s.ktp.row(m)?;
                let (li, lj) = (p.weights.len() as f64, q.weights.len() as f64);
                Ok((p.tail + q.tail) * s.fitted_k * (1.0 + li) * (1.0 + lj))
            }
            _ => Ok(0.0),
        }
    }

    /// Default grid: the standard time axis (or `0..=5` on integer
    /// families) and `nx` points spanning the supports widened by one.
    pub fn default_grid(&self, nx: usize) -> Result<Grid3> {
        let t = if self.meta.integer_grid {
            (0..=5).map(|v| v as f64).collect()
        } else {
            default_time_axis()
        };
        let mut ms = Vec::new();
        for &a in &t {
            for &b in &t {
                ms.push(self.measure_at(a, b)?);
            }
        }
        Grid3::new(t.clone(), t, default_x_axis(&ms, nx)?)
    }

    /// `C(t, t', x)` sampled on a grid.
    pub fn c_field(&self, grid: &Grid3, workers: Option<usize>) -> Result<GridFunction3> {
        grid.validate()?;
        let pts: Vec<(f64, f64)> = grid
            .t
            .iter()
            .flat_map(|&a| grid.tprime.iter().map(move |&b| (a, b)))
            .collect();
        let rows = par_map(pts.len(), workers, |k| {
            let m = self.measure_at(pts[k].0, pts[k].1)?;
            Ok(grid.x.iter().map(|&x| m.integrated_survival(x)).collect::<Vec<f64>>())
        });
        let mut values = Vec::with_capacity(pts.len() * grid.x.len());
        for r in rows {
            values.extend(r?);
        }
        GridFunction3::new(grid.t.clone(), grid.tprime.clone(), grid.x.clone(), values)
    }
}
