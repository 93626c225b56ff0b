use contcrystal::crystal::{tensor, CrystalElem};
use contcrystal::plpath::random_path;
use contcrystal::stringparam::{crystal_on_coords, string_data};
use contcrystal::transforms::{dihedral_product_formula, littelmann_e, pitman_word};
use contcrystal::Realization;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

fn rpath(rng: &mut ChaCha8Rng, dim: usize, nb: std::ops::Range<usize>) -> contcrystal::PlPath {
    let n = rng.gen_range(nb);
    random_path(rng, dim, n, 1.0)
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= TOL * (1.0 + x.abs().max(y.abs())))
}

fn random_elem(r: &Realization, rng: &mut ChaCha8Rng, depth: usize) -> CrystalElem {
    match rng.gen_range(0..if depth == 0 { 2 } else { 3 }) {
        0 => CrystalElem::Path(rpath(rng, r.rank(), 1..6)),
        1 => CrystalElem::Elementary {
            root: rng.gen_range(0..r.rank()),
            t: -rng.gen_range(0.0..2.0),
        },
        _ => tensor(
            random_elem(r, rng, depth - 1),
            random_elem(r, rng, depth - 1),
        ),
    }
}

#[test]
fn dihedral_formula_matches_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for label in ["A2", "I5", "B2"] {
        let r = Realization::from_label(label).unwrap();
        let m = r.coxeter_entry(0, 1) as usize;
        for _ in 0..100 {
            let eta = rpath(&mut rng, 2, 2..8);
            for n in 1..=m {
                for a in 0..2 {
                    let word: Vec<usize> =
                        (0..n).map(|i| if i % 2 == 0 { a } else { 1 - a }).collect();
                    let want = pitman_word(&r, &word, &eta).unwrap();
                    let got = dihedral_product_formula(&r, a, 1 - a, n, &eta).unwrap();
                    assert!(
                        got.sup_distance(&want) < TOL,
                        "{label} n={n} a={a}: {}",
                        got.sup_distance(&want)
                    );
                }
            }
        }
    }
}

#[test]
fn crystal_axioms() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for label in ["A2", "B2", "I5"] {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..300 {
            let b = random_elem(&r, &mut rng, 2);
            let s = rng.gen_range(0..r.rank());
            let (eps, phi) = (b.eps(&r, s), b.phi(&r, s));
            let wt = b.wt(&r);
            if eps.is_finite() {
                assert!(
                    (phi - eps - r.pair(s, &wt)).abs() < TOL,
                    "{label}: phi = eps + <wt, alpha^vee>"
                );
            } else {
                assert_eq!(phi, f64::NEG_INFINITY);
            }
            assert_eq!(b.e(&r, s, 0.0).unwrap().as_ref(), Some(&b));
            let x = rng.gen_range(-2.0..2.0);
            match b.e(&r, s, x).unwrap() {
                Some(c) => {
                    assert!(eps.is_finite());
                    let want: Vec<f64> = wt
                        .iter()
                        .zip(r.simple_root(s))
                        .map(|(w, a)| w + x * a)
                        .collect();
                    assert!(close(&c.wt(&r), &want));
                    assert!((c.eps(&r, s) - (eps - x)).abs() < TOL);
                    assert!((c.phi(&r, s) - (phi + x)).abs() < TOL);
                    // e^y e^x = e^{x+y}
                    let y = rng.gen_range(-1.0..1.0);
                    let lhs = c.e(&r, s, y).unwrap();
                    let rhs = b.e(&r, s, x + y).unwrap();
                    assert_eq!(lhs.is_some(), rhs.is_some(), "{label}: ghost disagreement");
                    if let (Some(p), Some(q)) = (lhs, rhs) {
                        assert!(close(&p.wt(&r), &q.wt(&r)));
                        assert!((p.eps(&r, s) - q.eps(&r, s)).abs() < TOL);
                    }
                }
                None => assert!(!eps.is_finite() || b.e(&r, s, x).unwrap().is_none()),
            }
        }
    }
}

#[test]
fn theta_is_a_morphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut ghosts = 0;
    for label in ["A2", "B2", "I5", "A3"] {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..250 {
            let a = rpath(&mut rng, r.rank(), 1..6);
            let b = rpath(&mut rng, r.rank(), 1..6);
            let t = tensor(CrystalElem::Path(a), CrystalElem::Path(b));
            let s = rng.gen_range(0..r.rank());
            let x = rng.gen_range(-3.0..3.0);
            let joined = t.theta().unwrap();
            let lhs = t.e(&r, s, x).unwrap();
            let rhs = littelmann_e(&r, s, x, &joined).unwrap();
            assert_eq!(lhs.is_some(), rhs.is_some(), "{label}: ghost disagreement");
            match (lhs, rhs) {
                (Some(l), Some(p)) => assert!(l.theta().unwrap().sup_distance(&p) < TOL),
                _ => ghosts += 1,
            }
            assert!((t.eps(&r, s) - littelmann_eps(&r, s, &joined)).abs() < TOL);
        }
    }
    assert!(ghosts > 0);
}

fn littelmann_eps(r: &Realization, s: usize, p: &contcrystal::PlPath) -> f64 {
    contcrystal::transforms::eps_phi(r, s, p).0
}

#[test]
fn crystal_on_coords_matches_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut ghosts = 0;
    for label in ["A2", "B2", "A3", "I5"] {
        let r = Realization::from_label(label).unwrap();
        let w = r.longest_word().clone();
        for _ in 0..60 {
            let eta = rpath(&mut rng, r.rank(), 2..6);
            let (x, pi) = string_data(&r, &w, &eta).unwrap();
            let s = rng.gen_range(0..r.rank());
            let t = rng.gen_range(-2.0..2.0);
            let got = crystal_on_coords(&r, &w, pi.endpoint(), &x, s, t).unwrap();
            let moved = littelmann_e(&r, s, t, &eta).unwrap();
            assert_eq!(
                got.is_some(),
                moved.is_some(),
                "{label}: ghost disagreement"
            );
            match (got, moved) {
                (Some(y), Some(p)) => {
                    let (want, _) = string_data(&r, &w, &p).unwrap();
                    assert!(close(&y, &want), "{label}: {y:?} vs {want:?}");
                }
                _ => ghosts += 1,
            }
        }
    }
    assert!(ghosts > 0);
}
