use contcrystal::involutions::*;
use contcrystal::plpath::random_path;
use contcrystal::stringparam::string_data;
use contcrystal::transforms::{littelmann_e, pitman_w0};
use contcrystal::Realization;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GROUPS: [&str; 6] = ["A2", "B2", "A3", "I5", "B3", "H3"];

#[test]
fn reflections_are_involutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for label in GROUPS {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..10 {
            let eta = random_path(&mut rng, r.rank(), 6, 1.0);
            for s in 0..r.rank() {
                let back = w_action(&r, s, &w_action(&r, s, &eta).unwrap()).unwrap();
                assert!(back.sup_distance(&eta) < 1e-9, "{label}");
            }
        }
    }
}

#[test]
fn braid_relations_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for label in GROUPS {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..10 {
            let eta = random_path(&mut rng, r.rank(), 6, 1.0);
            for s in 0..r.rank() {
                for t in s + 1..r.rank() {
                    let m = r.coxeter_entry(s, t) as usize;
                    let w1: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { s } else { t }).collect();
                    let w2: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { t } else { s }).collect();
                    let a = w_action_word(&r, &w1, &eta).unwrap();
                    let b = w_action_word(&r, &w2, &eta).unwrap();
                    assert!(
                        a.sup_distance(&b) < 1e-9,
                        "{label} s={s} t={t}: {}",
                        a.sup_distance(&b)
                    );
                }
            }
        }
    }
}

#[test]
fn schutz_tilde_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for label in GROUPS {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..10 {
            let eta = random_path(&mut rng, r.rank(), 5, 1.0);
            let s_eta = schutz_tilde(&r, &eta).unwrap();
            // stays in the same connected crystal
            let pi = pitman_w0(&r, &eta).unwrap();
            assert!(
                pitman_w0(&r, &s_eta).unwrap().sup_distance(&pi) < 1e-8,
                "{label}"
            );
            // involution
            assert!(
                schutz_tilde(&r, &s_eta).unwrap().sup_distance(&eta) < 1e-8,
                "{label}"
            );
            // weight goes to w0 of the weight
            let want = r.act_word(r.longest_word(), eta.endpoint());
            for (a, b) in s_eta.endpoint().iter().zip(&want) {
                assert!((a - b).abs() < 1e-8, "{label}");
            }
            // intertwines e_alpha^x with e_{alpha'}^{-x}
            for s in 0..r.rank() {
                let (eps, phi) = contcrystal::transforms::eps_phi(&r, s, &eta);
                let x = rng.gen_range(-phi..=eps);
                let lhs =
                    schutz_tilde(&r, &littelmann_e(&r, s, x, &eta).unwrap().unwrap()).unwrap();
                let rhs = littelmann_e(&r, r.opposite(s), -x, &s_eta)
                    .unwrap()
                    .unwrap();
                assert!(
                    lhs.sup_distance(&rhs) < 1e-8,
                    "{label} s={s}: {}",
                    lhs.sup_distance(&rhs)
                );
            }
        }
    }
}

#[test]
fn schutz_highest_is_involution_and_matches_tilde() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for label in GROUPS {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..10 {
            let pi = pitman_w0(&r, &random_path(&mut rng, r.rank(), 5, 1.0)).unwrap();
            let ipi = schutz_highest(&r, &pi).unwrap();
            assert!(
                schutz_highest(&r, &ipi).unwrap().sup_distance(&pi) < 1e-8,
                "{label}"
            );
            // S~ of the highest path is the lowest path
            let low = w_action_word(&r, r.longest_word(), &pi).unwrap();
            assert!(
                schutz_tilde(&r, &pi).unwrap().sup_distance(&low) < 1e-8,
                "{label}"
            );
        }
    }
}

#[test]
fn commutor_is_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for label in ["A2", "B2", "I5"] {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..10 {
            let a = random_path(&mut rng, 2, 4, 1.0);
            let b = random_path(&mut rng, 2, 4, 1.0);
            let ab = a.concat_star(&b).unwrap();
            let t1 = tau(&r, &ab).unwrap();
            let t2 = tau(&r, &t1).unwrap();
            assert!(
                t2.sup_distance(&ab) < 1e-8,
                "{label}: {}",
                t2.sup_distance(&ab)
            );
        }
    }
}

#[test]
fn hexagon_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for label in ["A2", "B2"] {
        let r = Realization::from_label(label).unwrap();
        for _ in 0..10 {
            let a = random_path(&mut rng, 2, 4, 1.0);
            let b = random_path(&mut rng, 2, 4, 1.0);
            let c = random_path(&mut rng, 2, 4, 1.0);
            let d = hexagon_defect(&r, &a, &b, &c).unwrap();
            assert!(d < 1e-8, "{label}: {d}");
        }
    }
}

#[test]
fn string_coords_of_lowest_path() {
    let r = Realization::from_label("A2").unwrap();
    let pi = contcrystal::PlPath::straight(&r.from_pairings(&[1.0, 2.0]).unwrap(), 1.0);
    let low = w_action_word(&r, r.longest_word(), &pi).unwrap();
    let (x, _) = string_data(&r, r.longest_word(), &low).unwrap();
    // lowest element: every coordinate at its ladder maximum
    let lam = pi.endpoint().to_vec();
    let bound = contcrystal::stringparam::ladder_margin(&r, r.longest_word(), &lam, &x);
    assert!(bound.abs() < 1e-9, "{x:?}");
}
