use std::collections::BTreeMap;

use contcrystal::plpath::random_path;
use contcrystal::stringparam::dihedral_cone_margin;
use contcrystal::transforms::pitman_w0;
use contcrystal::troplift::*;
use contcrystal::{PlPath, Realization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn vals(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn tropicalize_examples() {
    let e = SfExpr::parse("t1 + 2*t2/t3").unwrap();
    let m = tropicalize(&e);
    assert_eq!(m.to_string(), "t1 ∨ (t2 − t3)");
    let x = vals(&[("t1", 0.3), ("t2", 1.0), ("t3", -0.4)]);
    assert_eq!(m.eval(&x).unwrap(), 1.4);
    let e = SfExpr::parse("1/(t1*t2 + 3*t3*t4)").unwrap();
    let x = vals(&[("t1", 1.0), ("t2", 2.0), ("t3", -1.0), ("t4", 5.0)]);
    assert_eq!(tropicalize(&e).eval(&x).unwrap(), -4.0);
    assert_eq!(tropicalize(&SfExpr::parse("t7").unwrap()).to_string(), "t7");
}

#[test]
fn trop_limit_residuals() {
    let e = SfExpr::parse("t1 + t2").unwrap();
    let r = numeric_trop_limit(&e, &vals(&[("t1", 0.0), ("t2", 1.0)]), &[1e-3]).unwrap();
    assert!(r[0] <= 1e-3 * 2f64.ln() + 1e-12);
    let e = SfExpr::parse("t1*t2").unwrap();
    let r = numeric_trop_limit(&e, &vals(&[("t1", 0.7), ("t2", -1.3)]), &[0.1, 1e-3]).unwrap();
    assert!(r.iter().all(|v| *v < 1e-12));

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let e = SfExpr::parse("u3 + u2/u1").unwrap();
    for _ in 0..100 {
        let x = vals(&[
            ("u1", rng.gen_range(-2.0..2.0)),
            ("u2", rng.gen_range(-2.0..2.0)),
            ("u3", rng.gen_range(-2.0..2.0)),
        ]);
        for eps in [0.1, 0.01, 1e-3] {
            let r = numeric_trop_limit(&e, &x, &[eps]).unwrap()[0];
            assert!(r <= 2.0 * eps * 2f64.ln() + 1e-12);
        }
    }
}

#[test]
fn trop_error_constant_bounds_residuals() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for src in [
        "t1 + 2*t2/t3",
        "1/(t1*t2 + 3*t3*t4)",
        "u1*u2/(u2 + u1*u3)",
        "(t1 + t2 + 0.5*t3)*(t2 + t4)/(t1 + 7)",
    ] {
        let e = SfExpr::parse(src).unwrap();
        let c = e.trop_error_constant();
        for _ in 0..50 {
            let x: BTreeMap<String, f64> = e
                .variables()
                .into_iter()
                .map(|v| (v, rng.gen_range(-3.0..3.0)))
                .collect();
            let eps = [0.5, 0.1, 0.01, 1e-3];
            for (r, ep) in numeric_trop_limit(&e, &x, &eps).unwrap().iter().zip(eps) {
                assert!(*r <= c * ep + 1e-12, "{src}: {r} > {c} * {ep}");
            }
        }
    }
}

#[test]
fn bruhat_cell_identity_and_tropicalization() {
    assert_eq!(
        a2_bruhat_transition([1.0, 1.0, 1.0]).unwrap(),
        [2.0, 1.0, 0.5]
    );
    assert!(a2_bruhat_transition([1.0, 0.0, 1.0]).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..1000 {
        let u = [
            rng.gen_range(0.05..20.0),
            rng.gen_range(0.05..20.0),
            rng.gen_range(0.05..20.0),
        ];
        assert!(a2_bruhat_defect(u).unwrap() < 1e-12);
    }
    let mut pts = vec![];
    while pts.len() < 1000 {
        let x: Vec<f64> = (0..3).map(|_| f64::from(rng.gen_range(0..40u32))).collect();
        if dihedral_cone_margin(3, &x) >= 0.0 {
            pts.push(x);
        }
    }
    assert!(a2_trop_vs_transition(&pts).unwrap() < 1e-12);
}

fn smooth_grid(n: usize) -> (Vec<f64>, Vec<f64>) {
    let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let phi = times
        .iter()
        .map(|t| 1.5 + (3.0 * t).sin() * 0.7 + t * t)
        .collect();
    (times, phi)
}

#[test]
fn inverse_family_round_trip() {
    let (times, phi) = smooth_grid(100_000);
    let psi = sl2_t(&times, &phi).unwrap();
    let xi = sl2_xi(&times, &phi).unwrap();
    // the fiber element with the original parameter is the original function
    let back = sl2_inverse_family(&times, &psi, xi).unwrap();
    let err = back
        .iter()
        .zip(&phi)
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    for xi in [0.1, 1.0, 7.0] {
        let f = sl2_inverse_family(&times, &psi, xi).unwrap();
        let again = sl2_t(&times, &f).unwrap();
        let err = again
            .iter()
            .zip(&psi)
            .skip(1)
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "xi={xi}: {err}");
        assert!((sl2_xi(&times, &f).unwrap() / xi - 1.0).abs() < 1e-6);
    }
}

#[test]
fn sl2_semigroup_and_fiber() {
    let (times, phi) = smooth_grid(100_000);
    let (u, v, u2, v2) = (1.3, 0.4, 0.7, 0.9);
    let lhs = sl2_e(&times, &sl2_e(&times, &phi, u2, v2).unwrap(), u, v).unwrap();
    let rhs = sl2_e(&times, &phi, u * u2, u * v2 + v / u2).unwrap();
    let err = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    // phi_v = E_{1,v} phi has the same image under T
    let t0 = sl2_t(&times, &phi).unwrap();
    for v in [0.2, 3.0] {
        let t1 = sl2_t(&times, &sl2_e(&times, &phi, 1.0, v).unwrap()).unwrap();
        let err = t1
            .iter()
            .zip(&t0)
            .skip(1)
            .map(|(a, b)| ((a - b) / b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
    }
    assert!(sl2_t(&times, &vec![0.0; times.len()]).is_err());
}

#[test]
fn sl2_t_simple_cases() {
    // constant phi: T phi(t) = t
    let a = contcrystal::ScalarPl::new(vec![0.0, 1.0], vec![0.0, 0.0]);
    assert!(log_sl2_t(&a, &[1.0], 1.0).unwrap()[0].abs() < 1e-15);
    // a(t) = -t: the limit is t
    let a = contcrystal::ScalarPl::new(vec![0.0, 1.0], vec![0.0, -1.0]);
    let mut prev = f64::INFINITY;
    for eps in [0.1, 0.01, 0.001] {
        let r = (log_sl2_t(&a, &[1.0], eps).unwrap()[0] - 1.0).abs();
        assert!(r < prev && r < 10.0 * eps);
        prev = r;
    }
}

#[test]
fn pitman_and_h_lifts_converge() {
    let r = Realization::from_label("A1").unwrap();
    let eps = halving_eps();
    for eta in standard_test_paths(&r).unwrap() {
        let rep = pitman_lift_residuals(&r, &eta, &eps, 200).unwrap();
        assert!(rep.halves_within(1.5), "{:?}", rep.halving_ratios());
        assert!(rep.last_residual() <= 5e-2);

        let pi = pitman_w0(&r, &eta).unwrap();
        let top = pi.pair(r.simple_coroot(0)).last();
        for frac in [0.3, 0.8] {
            let rep = h_lift_residuals(&r, &pi, 2.0 * frac * top, &eps, 200).unwrap();
            assert!(rep.halves_within(1.5), "{:?}", rep.halving_ratios());
            assert!(rep.last_residual() <= 5e-2);
        }
    }
}

#[test]
fn string_lift_first_coordinate() {
    let a1 = Realization::from_label("A1").unwrap();
    let eps = [0.1, 0.01, 1e-3];
    let running = &standard_test_paths(&a1).unwrap()[0];
    let rep = string_lift_residuals(&a1, 0, running, &eps).unwrap();
    assert!(rep.last_residual() < 1e-2);
    let ratios: Vec<f64> = rep
        .rows
        .windows(2)
        .map(|w| w[0].residual / w[1].residual)
        .collect();
    assert!(ratios.iter().all(|q| (5.0..20.0).contains(q)), "{ratios:?}");

    // dominant path: the coordinate is 0
    let dom = PlPath::straight(&a1.from_pairings(&[1.0]).unwrap(), 1.0);
    assert!(
        string_lift_residuals(&a1, 0, &dom, &eps)
            .unwrap()
            .last_residual()
            < 1e-2
    );

    let a2 = Realization::from_label("A2").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..10 {
        let eta = random_path(&mut rng, 2, 5, 1.0);
        for s in 0..2 {
            let rep = string_lift_residuals(&a2, s, &eta, &[1e-3]).unwrap();
            assert!(rep.last_residual() < 2e-2);
        }
    }
    assert!(string_lift_residuals(
        &Realization::from_label("A3").unwrap(),
        0,
        &random_path(&mut rng, 3, 3, 1.0),
        &eps
    )
    .is_err());
}
