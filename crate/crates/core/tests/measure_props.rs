use peacock::cox_hobson::{pi_function, tangent_params, u_inverse};
use peacock::{Measure, Segment};
use proptest::prelude::*;

fn atomic() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-5.0..5.0f64, 0.05..1.0f64), 1..7).prop_map(|v| {
        let s: f64 = v.iter().map(|p| p.1).sum();
        v.into_iter().map(|(x, w)| (x, w / s)).collect()
    })
}

/// Atoms plus a uniform piece on `[a, a + len]`.
fn mixed() -> impl Strategy<Value = (Vec<(f64, f64)>, f64, f64, f64)> {
    (atomic(), -3.0..3.0f64, 0.1..3.0f64, 0.05..0.95f64)
}

fn build_mixed(atoms: &[(f64, f64)], a: f64, len: f64, share: f64) -> Measure {
    let atoms: Vec<(f64, f64)> = atoms.iter().map(|&(x, w)| (x, w * (1.0 - share))).collect();
    let seg = Segment::new(vec![a, a + len], vec![share / len, share / len]).unwrap();
    Measure::new(atoms, vec![seg]).unwrap()
}

/// Brute-force tail mean over atoms at or above `x`.
fn psi_naive(atoms: &[(f64, f64)], x: f64) -> f64 {
    let (m0, m1) = atoms
        .iter()
        .filter(|p| p.0 >= x)
        .fold((0.0, 0.0), |a, p| (a.0 + p.1, a.1 + p.0 * p.1));
    if m0 > 0.0 {
        (m1 / m0).max(x)
    } else {
        x
    }
}

fn c_naive(atoms: &[(f64, f64)], x: f64) -> f64 {
    atoms.iter().map(|&(y, w)| (y - x).max(0.0) * w).sum()
}

fn probes() -> Vec<f64> {
    (0..=120).map(|k| -6.0 + 0.1 * k as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn atomic_functionals_match_brute_force(atoms in atomic()) {
        let m = Measure::from_atoms(&atoms).unwrap();
        for x in probes() {
            prop_assert!((m.integrated_survival(x) - c_naive(&atoms, x)).abs() < 1e-12);
            prop_assert!((m.hardy_littlewood(x) - psi_naive(&atoms, x)).abs() < 1e-11);
        }
        for &(y, _) in &atoms {
            prop_assert!((m.hardy_littlewood(y) - psi_naive(&atoms, y)).abs() < 1e-11);
        }
    }

    #[test]
    fn c_is_convex_decreasing_and_bounded((atoms, a, len, share) in mixed()) {
        let m = build_mixed(&atoms, a, len, share);
        let xs = probes();
        let c: Vec<f64> = xs.iter().map(|&x| m.integrated_survival(x)).collect();
        let mean = m.mean();
        for k in 0..xs.len() {
            prop_assert!(c[k] >= (mean - xs[k]).max(0.0) - 1e-12);
            if k > 0 {
                prop_assert!(c[k] <= c[k - 1] + 1e-12);
            }
            if k > 0 && k + 1 < xs.len() {
                prop_assert!(c[k - 1] + c[k + 1] - 2.0 * c[k] >= -1e-12);
            }
            if xs[k] >= m.upper_support() {
                prop_assert_eq!(c[k], 0.0);
            }
        }
    }

    #[test]
    fn psi_is_monotone_and_dominates((atoms, a, len, share) in mixed()) {
        let m = build_mixed(&atoms, a, len, share);
        let mean = m.mean();
        let mut prev = f64::NEG_INFINITY;
        for x in probes() {
            let p = m.hardy_littlewood(x);
            prop_assert!(p >= x - 1e-12 && p >= mean - 1e-12);
            prop_assert!(p >= prev - 1e-12);
            prop_assert!(m.hardy_littlewood_right(x) >= p - 1e-12);
            if x >= m.upper_support() {
                prop_assert_eq!(p, x);
            }
            prev = p;
        }
    }

    #[test]
    fn tangent_line_identity((atoms, a, len, share) in mixed()) {
        let m = build_mixed(&atoms, a, len, share);
        for x in probes() {
            prop_assert!((pi_function(&m, x) - x - 2.0 * m.integrated_survival(x)).abs() < 1e-12);
            if m.survival(x) > 1e-6 && x < m.upper_support() {
                let (_, z) = tangent_params(&m, u_inverse(&m, x)).unwrap();
                let tol = 1e-8 * (1.0 + x.abs()) / m.survival(x);
                prop_assert!((z - m.hardy_littlewood(x)).abs() < tol, "x={} z={} psi={}", x, z, m.hardy_littlewood(x));
            }
        }
    }

    #[test]
    fn quantile_inverts_the_cdf((atoms, a, len, share) in mixed(), p in 0.001..1.0f64) {
        let m = build_mixed(&atoms, a, len, share);
        let q = m.quantile(p);
        prop_assert!(m.cdf(q) >= p - 1e-12);
        prop_assert!(m.cdf_left(q) <= p + 1e-12);
    }

    #[test]
    fn affine_pushforward_moves_functionals(atoms in atomic(), s in 0.2..3.0f64, b in -2.0..2.0f64) {
        let m = Measure::from_atoms(&atoms).unwrap();
        let h = m.affine_pushforward(s, b).unwrap();
        prop_assert!((h.mean() - (s * m.mean() + b)).abs() < 1e-12);
        for x in probes() {
            prop_assert!((h.integrated_survival(s * x + b) - s * m.integrated_survival(x)).abs() < 1e-11);
        }
    }
}

#[test]
fn two_point_examples() {
    let m = Measure::from_atoms(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap();
    assert_eq!(m.hardy_littlewood(-1.0), 0.0);
    assert_eq!(m.hardy_littlewood(0.0), 1.0);
    assert_eq!(m.hardy_littlewood(1.0), 1.0);
    assert_eq!(m.hardy_littlewood(2.0), 2.0);
    assert_eq!(m.integrated_survival(0.0), 0.5);
    assert_eq!(m.cdf(-1.0), 0.5);
    assert_eq!(m.cdf_left(-1.0), 0.0);
}

#[test]
fn mass_and_atoms_are_validated() {
    assert!(Measure::from_atoms(&[(0.0, 0.5), (1.0, 0.4)]).is_err());
    assert!(Measure::from_atoms(&[(0.0, -0.5), (1.0, 1.5)]).is_err());
    let merged = Measure::from_atoms(&[(0.0, 0.5), (1e-13, 0.5)]).unwrap();
    assert_eq!(merged.atoms().len(), 1);
}
