//! Acceptance gate: one `[PASS]`/`[FAIL]` line per criterion.

use std::time::{Duration, Instant};

use peacock::cox_hobson::{
    double_barrier_martingale, embed, embed_family, make_barrier, mixture_submartingale, submartingale_statistic,
    default_shift, ChainSamples, TestFunction,
};
use peacock::families::{BaseSpec, Kernel, Slopes, kemperman_phi};
use peacock::families::{self, ProcessFamily};
use peacock::montecarlo::{ks_distance, w1_distance, EmpiricalLaw, PathConfig};
use peacock::ordering::{
    crosscheck, det2_criterion, icx_compare, linspace, mrl_compare, tp2_pair_check, CheckOptions, Grid3, Pair,
};
use peacock::samples::to_csv_string;
use peacock::{Measure, MeasureSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let el = start.elapsed();
    let in_time = el <= budget;
    let pass = out.pass && in_time;
    println!(
        "[{}] {id}. {name}: {}; {:.2}s of {:.0}s{}",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        el.as_secs_f64(),
        budget.as_secs_f64(),
        if in_time { "" } else { " (over budget)" }
    );
    pass
}

fn unif() -> Measure {
    Measure::uniform(-1.0, 1.0).unwrap()
}

fn axis5() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 1.5, 2.0]
}

/// Largest `|generic − closed form|` over a 5×5×9 grid.
fn oracle_gap(f: &ProcessFamily, xs: &[f64], psi_only: bool) -> (f64, usize) {
    let (mut gap, mut n) = (0.0_f64, 0usize);
    for &t in &axis5() {
        for &tp in &axis5() {
            let m = f.measure_at(t, tp).unwrap();
            for &x in xs {
                if let Some(p) = f.psi_oracle(t, tp, x) {
                    gap = gap.max((m.hardy_littlewood(x) - p).abs());
                    n += 1;
                }
                if !psi_only {
                    if let Some(c) = f.c_oracle(t, tp, x) {
                        gap = gap.max((m.integrated_survival(x) - c).abs());
                        n += 1;
                    }
                }
            }
        }
    }
    (gap, n)
}

fn criterion1() -> Outcome {
    let xs: Vec<f64> = linspace(-2.3, 3.7, 9);
    let mu0 = families::nonmrl_eps(unif(), 0.0, 0.0).unwrap().full;
    let cases = [
        ("diatomic", families::diatomic(0.5, 0.3).unwrap(), false),
        ("example33", families::counterexample_mrl_not_mtp2(), false),
        ("censor_eps", families::censor_eps(unif(), 0.5).unwrap(), false),
        ("mu0", mu0, true),
    ];
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    let mut all_checked = true;
    for (name, f, psi_only) in &cases {
        let (g, n) = oracle_gap(f, &xs, *psi_only);
        all_checked &= n > 0;
        worst = worst.max(g);
        parts.push(format!("{name} {g:.1e} ({n} values)"));
    }
    Outcome {
        pass: worst <= 1e-10 && all_checked,
        detail: format!("max gap {worst:.2e} <= 1e-10 [{}]", parts.join(", ")),
    }
}

fn mrl_families() -> Vec<(&'static str, ProcessFamily)> {
    let base = BaseSpec::Translate {
        nu: MeasureSpec::from(unif()),
        speed: 0.5,
    };
    let censor = families::censor(base, Slopes { t: -0.5, tprime: 0.0 }, Slopes { t: 1.0, tprime: 1.0 }).unwrap();
    let split = families::nonmrl_eps(unif(), 0.0, 0.5).unwrap();
    let sub = families::subordinate(
        families::diatomic(0.5, 0.0).unwrap(),
        Kernel::binomial(0.5).unwrap(),
        Kernel::negbinomial(0.5).unwrap(),
    )
    .unwrap();
    let conv = families::convolved(
        families::diatomic(0.5, 0.0).unwrap(),
        peacock::convolve::DensitySpec::Gaussian { sigma: 0.5 },
        Default::default(),
    )
    .unwrap();
    vec![
        ("constant", families::constant(unif())),
        ("diatomic", families::diatomic(0.5, 0.0).unwrap()),
        ("example33", families::counterexample_mrl_not_mtp2()),
        ("censor", censor),
        ("censor_mzero", families::censor_mzero(unif()).unwrap()),
        ("censor_eps", families::censor_eps(unif(), 0.5).unwrap()),
        ("eta", split.eta),
        ("sigma_reflected", split.sigma_reflected),
        ("subordinate", sub),
        ("convolved", conv),
    ]
}

fn criterion2() -> Outcome {
    let opts = CheckOptions::default();
    let mut discrepancies = Vec::new();
    let fams = mrl_families();
    for (name, f) in &fams {
        assert!(f.meta().mrl, "{name} is expected to be MRL");
        let grid = f.default_grid(9).unwrap();
        let c = f.c_field(&grid, None).unwrap();
        let det = det2_criterion(&c, &opts).holds();
        let tp2 = tp2_pair_check(&c, Pair::TX, &opts).holds() && tp2_pair_check(&c, Pair::TprimeX, &opts).holds();
        if det != tp2 {
            discrepancies.push(format!("{name}: det2 {det}, tp2 {tp2}"));
        }
    }
    Outcome {
        pass: discrepancies.is_empty(),
        detail: format!(
            "{} discrepancies over {} MRL families{}",
            discrepancies.len(),
            fams.len(),
            if discrepancies.is_empty() { String::new() } else { format!(" {discrepancies:?}") }
        ),
    }
}

fn criterion3() -> Outcome {
    let opts = CheckOptions::default();
    let t6 = vec![0.0, 0.25, 0.5, 1.0, 2.0, 4.0];
    let mut notes = Vec::new();
    let mut pass = true;
    let sub = families::subordinate(
        families::diatomic(0.5, 0.0).unwrap(),
        Kernel::binomial(0.5).unwrap(),
        Kernel::negbinomial(0.5).unwrap(),
    )
    .unwrap();
    let cases = [
        ("diatomic", families::diatomic(0.5, 0.0).unwrap()),
        ("censor_mzero", families::censor_mzero(unif()).unwrap()),
        ("censor_eps", families::censor_eps(unif(), 0.5).unwrap()),
        ("subordinate", sub),
    ];
    for (name, f) in &cases {
        let t = if f.meta().integer_grid { (0..6).map(f64::from).collect() } else { t6.clone() };
        let grid = Grid3::new(t.clone(), t, linspace(-2.0, 3.0, 6)).unwrap();
        let rep = crosscheck(&f.c_field(&grid, None).unwrap(), &opts).unwrap();
        let ok = rep.pairwise_holds && rep.lattice_holds;
        pass &= ok;
        if !ok {
            notes.push(format!("{name} fails (lattice worst {:.2e})", rep.lattice.worst));
        }
    }
    // Kemperman field
    let ax = vec![0.0, 0.4, 0.8, 1.2, 1.6, 2.0];
    let (u, v) = (1.5, 2.0);
    let kem = kemperman_phi(u, v, ax.clone(), ax.clone(), ax).unwrap();
    let rep = crosscheck(&kem, &opts).unwrap();
    let w = rep.lattice.witness.clone().unwrap();
    let low = |s: f64| s <= 1.0;
    let (p, q) = (&w.coords[0..3], &w.coords[3..6]);
    let shape = |a: &[f64], b: &[f64]| low(a[0]) && low(a[1]) && !low(a[2]) && !low(b[0]) && !low(b[1]) && low(b[2]);
    let structured = (shape(p, q) || shape(q, p)) && w.lhs == 0.0 && (w.rhs - u * v).abs() < 1e-15;
    let kem_ok = rep.t_x.holds() && rep.tprime_x.holds() && !rep.lattice_holds && structured;
    pass &= kem_ok;
    notes.push(format!(
        "kemperman pairs (t,x) {} (t',x) {}, lattice worst {:.3} at {:?}",
        rep.t_x.holds(),
        rep.tprime_x.holds(),
        rep.lattice.worst,
        w.coords
    ));
    // Example 3.3 on the (t, t') minor at t, t' ∈ {1, 2}, x = 0
    let ex = families::counterexample_mrl_not_mtp2();
    let g = Grid3::new(vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0]).unwrap();
    let r = tp2_pair_check(&ex.c_field(&g, None).unwrap(), Pair::TTprime, &opts);
    let det = r.worst;
    let ex_ok = !r.holds() && (det - (8.0 / 9.0 - 9.0 / 10.0)).abs() < 1e-14;
    let big = Grid3::new(t6.clone(), t6, linspace(-2.0, 3.0, 6)).unwrap();
    let big_fails = !tp2_pair_check(&ex.c_field(&big, None).unwrap(), Pair::TTprime, &opts).holds();
    pass &= ex_ok && big_fails;
    notes.push(format!("example33 (t,t') det {det:.6} (8/9-9/10 = {:.6}), 6^3 fails {big_fails}", 8.0 / 9.0 - 0.9));
    Outcome {
        pass,
        detail: notes.join("; "),
    }
}

fn cfg(n: usize, seed: u64) -> PathConfig {
    PathConfig {
        dt: 1e-4,
        n_samples: n,
        master_seed: seed,
        ..PathConfig::default()
    }
}

fn ks_of(m: &Measure, seed: u64) -> f64 {
    let m0 = if m.mean() > 0.0 { None } else { Some(default_shift(m.mean())) };
    let b = make_barrier(m, m0).unwrap();
    let s = embed(&b, &cfg(100_000, seed), None).unwrap();
    ks_distance(&EmpiricalLaw::new(s.values(0)).unwrap(), m)
}

fn criterion4() -> Outcome {
    let d = families::diatomic(0.5, 0.0).unwrap();
    let ce = families::censor_eps(unif(), 0.5).unwrap();
    let targets = [
        ("dirac", Measure::dirac(0.0).unwrap()),
        ("two-point", Measure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()),
        ("diatomic(1,1)", d.measure_at(1.0, 1.0).unwrap()),
        ("diatomic(2,1)", d.measure_at(2.0, 1.0).unwrap()),
        ("diatomic(1,3)", d.measure_at(1.0, 3.0).unwrap()),
        ("censor_eps(1,1)", ce.measure_at(1.0, 1.0).unwrap()),
    ];
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for (k, (name, m)) in targets.iter().enumerate() {
        let ks = ks_of(m, 100 + k as u64);
        worst = worst.max(ks);
        parts.push(format!("{name} {ks:.4}"));
    }
    Outcome {
        pass: worst < 0.015,
        detail: format!("max KS {worst:.4} < 0.015 [{}]", parts.join(", ")),
    }
}

fn criterion5() -> Outcome {
    let f = families::diatomic(0.5, 0.0).unwrap();
    let chain = [(0.5, 0.5), (1.0, 1.0), (2.0, 1.0)];
    let s = embed_family(&f, &chain, &cfg(10_000, 5), None).unwrap();
    let frac = s.monotone_fraction();
    Outcome {
        pass: frac == 1.0 && s.samples.len() == 10_000,
        detail: format!("monotone fraction {frac} over {} paths", s.samples.len()),
    }
}

fn stats_ok(s: &ChainSamples, phis: &[TestFunction], centred: bool) -> (bool, Vec<String>) {
    let mut ok = true;
    let mut out = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (0, 2)] {
        for &phi in phis {
            let e = submartingale_statistic(s, a, b, phi).unwrap();
            let good = if centred {
                e.estimate.abs() <= 3.0 * e.stderr
            } else {
                e.estimate >= -3.0 * e.stderr
            };
            ok &= good;
            if !good {
                out.push(format!("{phi:?} ({a},{b}) {:.4}±{:.4}", e.estimate, e.stderr));
            }
        }
    }
    (ok, out)
}

fn criterion6() -> Outcome {
    let chain = [(0.5, 0.5), (1.0, 0.5), (1.0, 1.0)];
    let sub = families::nonmrl_eps(unif(), 0.0, 0.5).unwrap();
    let s = mixture_submartingale(&sub.eta, &sub.sigma_reflected, sub.weight, &chain, &cfg(100_000, 6), None).unwrap();
    let (ok1, bad1) = stats_ok(&s, &TestFunction::LIBRARY, false);
    let mg = families::nonmrl_eps(unif(), 0.0, 0.0).unwrap();
    let s0 = mixture_submartingale(&mg.eta, &mg.sigma_reflected, mg.weight, &chain, &cfg(100_000, 7), None).unwrap();
    let (ok2, bad2) = stats_ok(&s0, &[TestFunction::One], true);
    let e = submartingale_statistic(&s, 0, 2, TestFunction::One).unwrap();
    let e0 = submartingale_statistic(&s0, 0, 2, TestFunction::One).unwrap();
    Outcome {
        pass: ok1 && ok2,
        detail: format!(
            "eps=0.5 drift {:.4}±{:.4}, eps=0 drift {:.4}±{:.4}{}",
            e.estimate,
            e.stderr,
            e0.estimate,
            e0.stderr,
            if bad1.is_empty() && bad2.is_empty() { String::new() } else { format!(" violations {bad1:?} {bad2:?}") }
        ),
    }
}

fn criterion7() -> Outcome {
    let mu0 = families::nonmrl_eps(unif(), 0.0, 0.0).unwrap().full;
    let chain = [(1.0, 1.0), (2.0, 1.0)];
    let s = double_barrier_martingale(&unif(), 0.0, &chain, &cfg(100_000, 8), None).unwrap();
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for (k, &(t, tp)) in chain.iter().enumerate() {
        let w = w1_distance(&EmpiricalLaw::new(s.values(k)).unwrap(), &mu0.measure_at(t, tp).unwrap());
        worst = worst.max(w);
        parts.push(format!("({t},{tp}) {w:.4}"));
    }
    Outcome {
        pass: worst < 0.01,
        detail: format!("max W1 {worst:.4} < 0.01 [{}]", parts.join(", ")),
    }
}

fn criterion8() -> Outcome {
    let opts = CheckOptions::default();
    let f = families::nonmrl_eps(unif(), 0.0, 0.0).unwrap().full;
    let (a, b) = (f.measure_at(1.0, 1.0).unwrap(), f.measure_at(2.0, 1.0).unwrap());
    let probe: Vec<f64> = linspace(-1.0, 1.0, 401).into_iter().filter(|x| x.abs() < 1.0).collect();
    let mrl = mrl_compare(&a, &b, &probe, &opts).unwrap();
    let icx = icx_compare(&a, &b, &probe, &opts).unwrap();
    // supplementary: an interior pair where the same construction is not MRL
    let (c, d) = (f.measure_at(0.25, 0.5).unwrap(), f.measure_at(0.5, 0.5).unwrap());
    let sup = mrl_compare(&c, &d, &linspace(-0.49, 0.49, 99), &opts).unwrap();
    Outcome {
        pass: !mrl.holds() && icx.holds(),
        detail: format!(
            "mrl (1,1)->(2,1) {:?} (worst {:.2e}), icx {:?}; (0.25,0.5)->(0.5,0.5) mrl {:?} at {:?}",
            mrl.verdict,
            mrl.worst,
            icx.verdict,
            sup.verdict,
            sup.witness.map(|w| (w.coords[0], w.rhs, w.lhs))
        ),
    }
}

fn criterion9() -> Outcome {
    let f = families::diatomic(0.5, 0.0).unwrap();
    let chain = [(0.5, 0.5), (1.0, 1.0), (2.0, 1.0)];
    let c = cfg(5_000, 9);
    let a = to_csv_string(&embed_family(&f, &chain, &c, Some(1)).unwrap());
    let b = to_csv_string(&embed_family(&f, &chain, &c, Some(4)).unwrap());
    let again = to_csv_string(&embed_family(&f, &chain, &c, None).unwrap());
    Outcome {
        pass: a == b && a == again,
        detail: format!("{} bytes, workers 1 vs 4 vs default identical: {}", a.len(), a == b && a == again),
    }
}

fn main() {
    let only: Option<u32> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let want = |k: u32| only.is_none_or(|o| o == k);
    let secs = Duration::from_secs;
    let mut results = Vec::new();
    if want(1) {
        results.push(run(1, "closed-form oracles", secs(1), criterion1));
    }
    if want(2) {
        results.push(run(2, "det2 criterion vs pairwise TP2", secs(5), criterion2));
    }
    if want(3) {
        results.push(run(3, "pairwise TP2 and lattice MTP2", secs(30), criterion3));
    }
    if want(4) {
        results.push(run(4, "embedding law match", secs(300), criterion4));
    }
    if want(5) {
        results.push(run(5, "coupled monotonicity", secs(60), criterion5));
    }
    if want(6) {
        results.push(run(6, "submartingale inequality", secs(600), criterion6));
    }
    if want(7) {
        results.push(run(7, "double-barrier marginal", secs(120), criterion7));
    }
    if want(8) {
        results.push(run(8, "non-MRL witness", secs(1), criterion8));
    }
    if want(9) {
        results.push(run(9, "determinism", secs(60), criterion9));
    }
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
}
