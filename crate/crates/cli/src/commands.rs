use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use peacock::cox_hobson::{
    double_barrier_martingale, embed_family, mixture_submartingale, submartingale_statistic, ChainSamples,
    TestFunction,
};
use peacock::families::{self, FamilySpec, Part, ProcessFamily};
use peacock::montecarlo::{ks_distance, w1_distance, EmpiricalLaw, PathConfig};
use peacock::ordering::{
    crosscheck, det2_criterion, icx_compare, mrl_compare, mtp2_check, tp2_pair_check, CheckOptions, Grid3,
    OrderReport, Pair,
};
use peacock::samples::{group, read_csv, to_csv_string};
use peacock::{Measure, Result as CoreResult};

/// Anything that maps to exit code 2.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(peacock::Error),
}

impl From<peacock::Error> for Failure {
    fn from(e: peacock::Error) -> Self {
        Failure::Core(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(s) => write!(f, "{s}"),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

pub type Res<T> = std::result::Result<T, Failure>;

/// Result of a subcommand before it is written out.
pub struct Output {
    pub pass: bool,
    /// Contents of the primary output file.
    pub body: String,
    /// Printed on stdout.
    pub summary: Value,
}

/// Input files read so far, kept for the manifest hash.
#[derive(Default)]
pub struct Inputs {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Res<String> {
        let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Failure::Usage(format!("{} is not UTF-8", path.display())))?;
        self.files.push((path.display().to_string(), bytes));
        Ok(text)
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, path: &Path, what: &str) -> Res<T> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{what} {}: {e}", path.display())))
    }

    pub fn family(&mut self, path: &Path) -> Res<ProcessFamily> {
        let spec: FamilySpec = self.json(path, "family spec")?;
        Ok(ProcessFamily::from_spec(&spec)?)
    }

    pub fn grid(&mut self, path: Option<&Path>, family: &ProcessFamily, nx: usize) -> Res<Grid3> {
        match path {
            Some(p) => {
                let g: Grid3 = self.json(p, "grid")?;
                g.validate()?;
                Ok(g)
            }
            None => Ok(family.default_grid(nx)?),
        }
    }

    pub fn chain(&mut self, path: &Path) -> Res<Vec<(f64, f64)>> {
        let pts: Vec<[f64; 2]> = self.json(path, "chain")?;
        Ok(pts.into_iter().map(|p| (p[0], p[1])).collect())
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

pub fn family(fam: &ProcessFamily, grid: &Grid3) -> Res<Output> {
    let mut body = String::from("t,tprime,x,mean,c,psi\n");
    for &t in &grid.t {
        for &tp in &grid.tprime {
            let m = fam.measure_at(t, tp)?;
            let mean = m.mean();
            for &x in &grid.x {
                let _ = writeln!(
                    body,
                    "{},{},{},{},{},{}",
                    fmt(t),
                    fmt(tp),
                    fmt(x),
                    fmt(mean),
                    fmt(m.integrated_survival(x)),
                    fmt(m.hardy_littlewood(x))
                );
            }
        }
    }
    Ok(Output {
        pass: true,
        body,
        summary: json!({
            "family": fam.name(),
            "meta": to_json(&fam.meta()),
            "points": grid.t.len() * grid.tprime.len() * grid.x.len(),
        }),
    })
}

/// Pointwise order over every comparable pair of grid points.
fn pairwise_order(
    fam: &ProcessFamily,
    grid: &Grid3,
    opts: &CheckOptions,
    cmp: fn(&Measure, &Measure, &[f64], &CheckOptions) -> CoreResult<OrderReport>,
) -> Res<Value> {
    let mut worst: Option<(OrderReport, (f64, f64), (f64, f64))> = None;
    let pairs = grid.ordered_pairs();
    for &(p, q) in &pairs {
        let rep = cmp(&fam.measure_at(p.0, p.1)?, &fam.measure_at(q.0, q.1)?, &grid.x, opts)?;
        let margin = rep.worst + rep.tolerance;
        if worst.as_ref().is_none_or(|w| margin < w.0.worst + w.0.tolerance) {
            worst = Some((rep, p, q));
        }
    }
    let (rep, p, q) = worst.ok_or_else(|| Failure::Usage("grid has no comparable pairs".into()))?;
    Ok(json!({
        "verdict": to_json(&rep.verdict),
        "worst": rep.worst,
        "tolerance": rep.tolerance,
        "pairs": pairs.len(),
        "witness": {
            "from": [p.0, p.1],
            "to": [q.0, q.1],
            "point": rep.witness,
        },
    }))
}

fn holds(v: &Value) -> bool {
    v["verdict"] == "holds"
}

pub fn check(fam: &ProcessFamily, grid: &Grid3, test: &str, opts: &CheckOptions) -> Res<Output> {
    let report = match test {
        "mrl" => pairwise_order(fam, grid, opts, mrl_compare)?,
        "icx" => pairwise_order(fam, grid, opts, icx_compare)?,
        "det2" => to_json(&det2_criterion(&fam.c_field(grid, opts.workers)?, opts)),
        "mtp2" => to_json(&mtp2_check(&fam.c_field(grid, opts.workers)?, opts)?),
        "crosscheck" => {
            let r = crosscheck(&fam.c_field(grid, opts.workers)?, opts)?;
            let mut v = to_json(&r);
            v["verdict"] = json!(if r.implication_holds { "holds" } else { "fails" });
            v
        }
        other => match other.strip_prefix("tp2:") {
            Some(p) => {
                let pair: Pair = p.parse()?;
                to_json(&tp2_pair_check(&fam.c_field(grid, opts.workers)?, pair, opts))
            }
            None => {
                return Err(Failure::Usage(format!(
                    "unknown test {other:?}; expected mrl, icx, det2, mtp2, crosscheck or tp2:<pair>"
                )))
            }
        },
    };
    let pass = holds(&report);
    let summary = json!({ "family": fam.name(), "test": test, "report": report });
    Ok(Output {
        pass,
        body: serde_json::to_string_pretty(&summary).expect("json") + "\n",
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Coupled Cox–Hobson stopping along the chain.
    CoxHobson,
    /// Mixture of an upper and a reflected lower embedding.
    Mixture,
    /// Brownian motion from `ν` stopped on leaving growing intervals.
    DoubleBarrier,
}

fn nonmrl_parts(fam: &ProcessFamily, method: Method) -> Res<(Measure, f64, f64)> {
    match fam.spec() {
        FamilySpec::Nonmrl { nu, r, eps, part } if *part == Part::Full => {
            Ok((Measure::from_spec(nu)?, *r, *eps))
        }
        _ => Err(Failure::Usage(format!(
            "method {method:?} needs a nonmrl family with the full part"
        ))),
    }
}

pub fn simulate(
    fam: &ProcessFamily,
    chain: &[(f64, f64)],
    cfg: &PathConfig,
    method: Method,
    workers: Option<usize>,
) -> Res<ChainSamples> {
    Ok(match method {
        Method::CoxHobson => embed_family(fam, chain, cfg, workers)?,
        Method::Mixture => {
            let (nu, r, eps) = nonmrl_parts(fam, method)?;
            let s = families::nonmrl_eps(nu, r, eps)?;
            mixture_submartingale(&s.eta, &s.sigma_reflected, s.weight, chain, cfg, workers)?
        }
        Method::DoubleBarrier => {
            let (nu, r, eps) = nonmrl_parts(fam, method)?;
            if eps != 0.0 {
                return Err(Failure::Usage("double-barrier targets the eps = 0 family".into()));
            }
            double_barrier_martingale(&nu, r, chain, cfg, workers)?
        }
    })
}

pub fn embed(fam: &ProcessFamily, samples: &ChainSamples) -> Output {
    Output {
        pass: true,
        body: to_csv_string(samples),
        summary: json!({
            "family": fam.name(),
            "paths": samples.samples.len(),
            "chain": samples.chain,
            "exhausted": samples.exhausted,
            "monotone_fraction": samples.monotone_fraction(),
        }),
    }
}

/// Distances per chain point and drift statistics per consecutive pair.
fn law_stats(fam: &ProcessFamily, s: &ChainSamples) -> Res<(Vec<Value>, Vec<Value>, f64)> {
    let mut points = Vec::new();
    let mut worst_ks = 0.0_f64;
    for (k, &(t, tp)) in s.chain.iter().enumerate() {
        let target = fam.measure_at(t, tp)?;
        let e = EmpiricalLaw::new(s.values(k))?;
        let ks = ks_distance(&e, &target);
        worst_ks = worst_ks.max(ks);
        points.push(json!({
            "t": t,
            "tprime": tp,
            "ks": ks,
            "w1": w1_distance(&e, &target),
            "mean": e.mean(),
            "stderr": e.stderr(),
            "target_mean": target.mean(),
        }));
    }
    let mut drifts = Vec::new();
    if s.samples.len() >= 2 {
        for k in 1..s.chain.len() {
            for phi in TestFunction::LIBRARY {
                let est = submartingale_statistic(s, k - 1, k, phi)?;
                drifts.push(json!({
                    "from": k - 1,
                    "to": k,
                    "phi": phi,
                    "estimate": est.estimate,
                    "stderr": est.stderr,
                }));
            }
        }
    }
    Ok((points, drifts, worst_ks))
}

pub fn verify(fam: &ProcessFamily, s: &ChainSamples, tol: f64) -> Res<Output> {
    let (points, drifts, worst_ks) = law_stats(fam, s)?;
    let monotone = s.monotone_fraction();
    let pass = worst_ks < tol && monotone == 1.0;
    let summary = json!({
        "family": fam.name(),
        "paths": s.samples.len(),
        "ks_tolerance": tol,
        "max_ks": worst_ks,
        "monotone_fraction": monotone,
        "verdict": if pass { "holds" } else { "fails" },
        "points": points,
        "drift": drifts,
    });
    Ok(Output {
        pass,
        body: serde_json::to_string_pretty(&summary).expect("json") + "\n",
        summary,
    })
}

pub fn stats(fam: &ProcessFamily, inputs: &mut Inputs, samples: &Path) -> Res<Output> {
    let text = inputs.read(samples)?;
    let s = group(read_csv(text.as_bytes())?)?;
    let (points, drifts, _) = law_stats(fam, &s)?;
    let summary = json!({
        "family": fam.name(),
        "paths": s.samples.len(),
        "monotone_fraction": s.monotone_fraction(),
        "points": points,
        "drift": drifts,
    });
    Ok(Output {
        pass: true,
        body: serde_json::to_string_pretty(&summary).expect("json") + "\n",
        summary,
    })
}

pub fn default_chain(fam: &ProcessFamily) -> Vec<(f64, f64)> {
    if fam.meta().integer_grid {
        vec![(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]
    } else {
        vec![(0.5, 0.5), (1.0, 1.0), (2.0, 2.0)]
    }
}

/// Full dossier; fails when a claimed property is contradicted.
pub fn report(
    fam: &ProcessFamily,
    grid: &Grid3,
    opts: &CheckOptions,
    embedding: Option<(&[(f64, f64)], &PathConfig)>,
) -> Res<Output> {
    let meta = fam.meta();
    let mrl = pairwise_order(fam, grid, opts, mrl_compare)?;
    let c = fam.c_field(grid, opts.workers)?;
    let det2 = det2_criterion(&c, opts);
    let pairs: Vec<Value> = Pair::ALL
        .iter()
        .map(|&p| json!({ "pair": p.name(), "report": to_json(&tp2_pair_check(&c, p, opts)) }))
        .collect();
    let lattice = match mtp2_check(&c, opts) {
        Ok(r) => Some(r),
        Err(peacock::Error::Grid(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut consistent = true;
    if meta.mrl {
        consistent &= holds(&mrl);
    }
    if meta.mtp2 {
        consistent &= lattice.as_ref().is_none_or(|r| r.holds());
    }
    let mut summary = json!({
        "family": fam.name(),
        "spec": to_json(fam.spec()),
        "meta": to_json(&meta),
        "grid": to_json(grid),
        "mrl": mrl,
        "det2": to_json(&det2),
        "tp2": pairs,
        "mtp2": lattice.as_ref().map(to_json),
    });
    if let Some((chain, cfg)) = embedding {
        if meta.mrl {
            let s = embed_family(fam, chain, cfg, opts.workers)?;
            let (points, drifts, worst_ks) = law_stats(fam, &s)?;
            consistent &= s.monotone_fraction() == 1.0;
            summary["embedding"] = json!({
                "paths": s.samples.len(),
                "seed": cfg.master_seed,
                "dt": cfg.dt,
                "max_ks": worst_ks,
                "monotone_fraction": s.monotone_fraction(),
                "points": points,
                "drift": drifts,
            });
        }
    }
    summary["verdict"] = json!(if consistent { "holds" } else { "fails" });
    Ok(Output {
        pass: consistent,
        body: serde_json::to_string_pretty(&summary).expect("json") + "\n",
        summary,
    })
}
