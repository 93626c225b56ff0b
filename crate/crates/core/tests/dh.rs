use contcrystal::dh::brownian::{distance_correlation_sq, omega_window};
use contcrystal::dh::*;
use contcrystal::Realization;

#[test]
fn normalizing_constants() {
    let a1 = Realization::from_label("A1").unwrap();
    assert!((compute_k(&a1) - 1.0).abs() < 1e-12);
    // A2 volume of the polytope for lambda with pairings (1, 1.5) is 15/8
    let a2 = Realization::from_label("A2").unwrap();
    let lambda = a2.from_pairings(&[1.0, 1.5]).unwrap();
    assert!((polytope_volume(&a2, &lambda, compute_k(&a2)) - 1.875).abs() < 1e-9);
}

#[test]
fn a1_volume_and_laplace() {
    let r = Realization::from_label("A1").unwrap();
    let lambda = r.from_pairings(&[1.3]).unwrap();
    let poly = StringPolytope::new(&r, r.longest_word(), &lambda).unwrap();
    let (v, se) = rejection_volume(&poly, 10_000, 1);
    assert!((v - 1.3).abs() <= 1e-12 + se);
    let rep = laplace_check(&poly, &[0.4], 50_000, 2, 1.0).unwrap();
    assert!(rep.z_score.abs() < 4.0, "{rep:?}");
}

#[test]
fn rejection_volume_a2() {
    let r = Realization::from_label("A2").unwrap();
    let lambda = r.from_pairings(&[1.0, 1.5]).unwrap();
    let poly = StringPolytope::new(&r, r.longest_word(), &lambda).unwrap();
    let (v, se) = rejection_volume(&poly, 200_000, 3);
    assert!((v - 1.875).abs() < 4.0 * se, "{v} +- {se}");
}

#[test]
fn a1_product_formula_exact() {
    let r = Realization::from_label("A1").unwrap();
    let (lhs, rhs) = product_formula_a1(&r, 1.0, 0.4, 0.7, 1.0).unwrap();
    assert!((lhs - rhs).abs() < 1e-6 * lhs.abs().max(1.0));
}

#[test]
fn samplers_are_reproducible() {
    let r = Realization::from_label("I5").unwrap();
    let lambda = r.from_pairings(&[1.0, 0.5]).unwrap();
    let poly = StringPolytope::new(&r, r.longest_word(), &lambda).unwrap();
    let a = dh_sample(&poly, 500, 9).unwrap();
    let b = dh_sample(&poly, 500, 9).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().all(|v| v.len() == 2));
}

#[test]
fn omega_window_and_dcor() {
    let r = Realization::from_label("A1").unwrap();
    let w = omega_window(&r, &r.from_pairings(&[1.0]).unwrap());
    assert!((w - 1.5 * 1e6f64.ln()).abs() < 1e-9);
    let x: Vec<f64> = (0..200).map(|k| (k as f64 * 0.37).sin()).collect();
    assert!(distance_correlation_sq(&x, &x) > 0.9);
}
