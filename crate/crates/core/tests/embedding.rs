use peacock::cox_hobson::{
    double_barrier_martingale, embed, embed_barriers, embed_family, make_barrier, mixture_submartingale,
    submartingale_statistic, TestFunction,
};
use peacock::families;
use peacock::montecarlo::{
    bridge_max_step, ks_distance, sample_rng, std_normal, uniform_open, EmpiricalLaw, PathConfig,
};
use peacock::samples::{group, read_csv, to_csv_string};
use peacock::{Error, Measure};

fn cfg(n: usize, seed: u64) -> PathConfig {
    PathConfig {
        n_samples: n,
        master_seed: seed,
        ..PathConfig::default()
    }
}

fn two_point() -> Measure {
    Measure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap()
}

#[test]
fn two_point_law_and_stopping_rule() {
    let b = make_barrier(&two_point(), Some(-1.0)).unwrap();
    let s = embed(&b, &cfg(20_000, 1), None).unwrap();
    let v = s.values(0);
    assert!(v.iter().all(|&x| x == -1.0 || x == 1.0));
    let ks = ks_distance(&EmpiricalLaw::new(v).unwrap(), &two_point());
    assert!(ks < 0.02, "ks {ks}");
    // at the stop the running maximum has reached Ψ of the stopped value
    let m = two_point();
    for e in s.flat() {
        assert!(e.running_max >= m.hardy_littlewood(e.stopped_value) - 0.05, "{e:?}");
    }
}

#[test]
fn positive_mean_uniform_target() {
    let m = Measure::uniform(0.0, 2.0).unwrap();
    let b = make_barrier(&m, None).unwrap();
    let s = embed(&b, &cfg(20_000, 2), None).unwrap();
    let e = EmpiricalLaw::new(s.values(0)).unwrap();
    assert!(ks_distance(&e, &m) < 0.02);
    assert!((e.mean() - 1.0).abs() < 4.0 * e.stderr());
}

#[test]
fn bridge_correction_reduces_first_passage_bias() {
    // P(sup_{[0,1]} B ≥ 1) = 2(1 − Φ(1)), monitored on a 1e-2 grid
    let truth = 2.0 * (1.0 - statrs_phi(1.0));
    let (n, steps, dt) = (10_000u64, 100, 1e-2_f64);
    let (mut with, mut without) = (0u64, 0u64);
    for i in 0..n {
        let mut rng = sample_rng(11, i);
        let (mut b, mut hit_grid, mut hit_bridge) = (0.0_f64, false, false);
        for _ in 0..steps {
            let bn = b + dt.sqrt() * std_normal(&mut rng);
            let m = bridge_max_step(b, bn, dt, uniform_open(&mut rng));
            hit_grid |= bn >= 1.0;
            hit_bridge |= m >= 1.0;
            b = bn;
        }
        with += hit_bridge as u64;
        without += hit_grid as u64;
    }
    let err_with = (with as f64 / n as f64 - truth).abs();
    let err_without = (without as f64 / n as f64 - truth).abs();
    assert!(err_with < err_without, "with {err_with}, without {err_without}");
}

fn statrs_phi(x: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

#[test]
fn coupled_chain_is_monotone_and_marginally_right() {
    let f = families::diatomic(0.5, 0.0).unwrap();
    let chain = [(0.5, 0.5), (1.0, 1.0), (2.0, 2.0)];
    let s = embed_family(&f, &chain, &cfg(10_000, 3), None).unwrap();
    assert_eq!(s.monotone_fraction(), 1.0);
    for (k, &(t, tp)) in chain.iter().enumerate() {
        let ks = ks_distance(&EmpiricalLaw::new(s.values(k)).unwrap(), &f.measure_at(t, tp).unwrap());
        assert!(ks < 0.03, "point {k}: {ks}");
    }
}

#[test]
fn chain_errors() {
    let f = families::diatomic(0.5, 0.0).unwrap();
    let c = cfg(10, 0);
    assert!(matches!(
        embed_family(&f, &[(1.0, 1.0), (0.5, 2.0)], &c, None),
        Err(Error::NotAChain(_))
    ));
    let mu0 = families::nonmrl_eps(Measure::uniform(-1.0, 1.0).unwrap(), 0.0, 0.0).unwrap().full;
    assert!(matches!(
        embed_family(&mu0, &[(0.25, 0.5), (0.5, 0.5)], &c, None),
        Err(Error::NotNested(_))
    ));
    let b = make_barrier(&two_point(), Some(-1.0)).unwrap();
    assert!(embed_barriers(std::slice::from_ref(&b), &[(0.0, 0.0), (1.0, 1.0)], &c, None).is_err());
}

#[test]
fn step_budget_is_enforced() {
    let b = make_barrier(&two_point(), Some(-1.0)).unwrap();
    let c = PathConfig {
        max_steps: 2,
        ..cfg(1_000, 4)
    };
    assert!(matches!(embed(&b, &c, None), Err(Error::PathExhaustion { .. })));
    let bad = PathConfig { dt: 0.5, ..cfg(10, 4) };
    assert!(embed(&b, &bad, None).is_err());
}

#[test]
fn mixture_with_full_weight_is_the_upper_part() {
    let s = families::nonmrl_eps(Measure::uniform(-1.0, 1.0).unwrap(), 0.0, 0.5).unwrap();
    let chain = [(0.5, 0.5), (1.0, 1.0)];
    let mix = mixture_submartingale(&s.eta, &s.sigma_reflected, 1.0, &chain, &cfg(2_000, 5), None).unwrap();
    assert!(mix.flat().all(|e| e.stopped_value <= 1.5 + 1e-12));
    assert_eq!(mix.monotone_fraction(), 1.0);
    assert!(mixture_submartingale(&s.eta, &s.sigma_reflected, 0.0, &chain, &cfg(10, 5), None).is_err());
}

#[test]
fn double_barrier_starts_and_exits() {
    let nu = Measure::uniform(-1.0, 1.0).unwrap();
    let chain = [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)];
    let s = double_barrier_martingale(&nu, 0.0, &chain, &cfg(5_000, 6), None).unwrap();
    for row in &s.samples {
        // the degenerate interval stops at the start
        assert_eq!(row[0].steps, 0);
        assert!(row[1].stopped_value.abs() >= 0.5 - 1e-12);
        assert!(row[2].stopped_value == -1.0 || row[2].stopped_value == 1.0);
    }
    let e = submartingale_statistic(&s, 0, 2, TestFunction::One).unwrap();
    assert!(e.estimate.abs() < 4.0 * e.stderr);
}

#[test]
fn csv_round_trip_and_worker_independence() {
    let f = families::diatomic(0.5, 0.0).unwrap();
    let chain = [(1.0, 1.0), (2.0, 1.0)];
    let a = embed_family(&f, &chain, &cfg(500, 7), Some(1)).unwrap();
    let b = embed_family(&f, &chain, &cfg(500, 7), Some(3)).unwrap();
    let text = to_csv_string(&a);
    assert_eq!(text, to_csv_string(&b));
    let back = group(read_csv(text.as_bytes()).unwrap()).unwrap();
    assert_eq!(back.samples, a.samples);
    let c = embed_family(&f, &chain, &cfg(500, 8), None).unwrap();
    assert_ne!(to_csv_string(&c), text);
}
