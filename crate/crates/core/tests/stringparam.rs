use contcrystal::plpath::random_path;
use contcrystal::stringparam::*;
use contcrystal::transforms::pitman_w0;
use contcrystal::{PlPath, Realization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random path, its string coordinates for `word`, and its highest weight.
fn sample(r: &Realization, word: &[usize], rng: &mut ChaCha8Rng) -> (PlPath, Vec<f64>, Vec<f64>) {
    let nb = rng.gen_range(2..8);
    let eta = random_path(rng, r.rank(), nb, 1.0);
    let (x, pi) = string_data(r, word, &eta).unwrap();
    (eta, x, pi.endpoint().to_vec())
}

#[test]
fn roundtrip_all_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for label in ["A1", "A2", "A3", "B2", "B3", "I5", "I7", "H3"] {
        let r = Realization::from_label(label).unwrap();
        let w = r.longest_word().clone();
        for _ in 0..20 {
            let eta = random_path(&mut rng, r.rank(), 6, 1.0);
            let (x, pi) = string_data(&r, &w, &eta).unwrap();
            let back = inverse_string(&r, &w, &pi, &x).unwrap();
            assert!(
                back.sup_distance(&eta) < 1e-8,
                "{label}: {}",
                back.sup_distance(&eta)
            );
        }
    }
}

#[test]
fn highest_path_matches_pitman_w0() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let r = Realization::from_label("B3").unwrap();
    let eta = random_path(&mut rng, 3, 6, 1.0);
    let (_, pi) = string_data(&r, r.longest_word(), &eta).unwrap();
    assert!(pi.sup_distance(&pitman_w0(&r, &eta).unwrap()) < 1e-10);
}

#[test]
fn dihedral_closed_forms_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for m in 2..=6u32 {
        let r = Realization::from_label(&format!("I{m}")).unwrap();
        let i = r.longest_word().clone();
        let j: Vec<usize> = i.iter().map(|s| 1 - s).collect();
        for _ in 0..200 {
            let (_, x, lambda) = sample(&r, &i, &mut rng);
            let oracle = transition(&r, &i, &j, &lambda, &x).unwrap();
            let closed = transition_closed_dihedral(m, &x).unwrap();
            let err = oracle
                .iter()
                .zip(&closed)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(
                err < 1e-9,
                "m={m} x={x:?} oracle={oracle:?} closed={closed:?}"
            );
        }
    }
}

#[test]
fn dihedral_cone_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for m in [3u32, 4, 5, 6, 7, 8] {
        let r = Realization::from_label(&format!("I{m}")).unwrap();
        let i = r.longest_word().clone();
        for _ in 0..300 {
            let x: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
            let explicit = dihedral_cone_margin(m, &x) >= 0.0;
            assert_eq!(explicit, in_cone(&r, &i, &x).unwrap(), "m={m} x={x:?}");
        }
        for _ in 0..50 {
            let (_, x, _) = sample(&r, &i, &mut rng);
            assert!(dihedral_cone_margin(m, &x) >= -1e-9);
        }
    }
}

#[test]
fn gt_cone_matches_oracle_a3() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let r = Realization::from_label("A3").unwrap();
    let w = r.longest_word().clone();
    for _ in 0..500 {
        let x: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..2.0)).collect();
        assert_eq!(
            gt_cone_margin(3, &x) >= 0.0,
            in_cone(&r, &w, &x).unwrap(),
            "x={x:?}"
        );
    }
}

#[test]
fn min_identity_dihedral() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for m in [3u32, 4, 5, 6, 7] {
        let r = Realization::from_label(&format!("I{m}")).unwrap();
        for _ in 0..100 {
            // dominant highest path with random shape
            let pi = pitman_w0(&r, &random_path(&mut rng, 2, 5, 1.0)).unwrap();
            let mut cur = pi.clone();
            let mut x = vec![];
            for p in 1..m as usize {
                let s = (p - 1) % 2;
                let g = cur.pair(r.simple_coroot(s));
                if g.min() < -1e-12 {
                    break;
                }
                let xp = rng.gen_range(0.0..=g.last().max(0.0));
                x.push(xp);
                cur = contcrystal::transforms::h_operator(&r, s, xp, &cur).unwrap();
                let (lhs, rhs) = dihedral_min_identity(&r, &pi, &x, p).unwrap();
                assert!((lhs - rhs).abs() < 1e-9, "m={m} p={p} lhs={lhs} rhs={rhs}");
            }
        }
    }
}

#[test]
fn lusztig_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for label in ["A2", "B2", "A3", "H3"] {
        let r = Realization::from_label(label).unwrap();
        let w = r.longest_word().clone();
        for _ in 0..20 {
            let (_, x, lambda) = sample(&r, &w, &mut rng);
            let y = lusztig_coords(&r, &w, &lambda, &x);
            let back = from_lusztig_coords(&r, &w, &lambda, &y);
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() < 1e-9, "{label}");
            }
        }
    }
}

#[test]
fn polytope_membership_via_oracle() {
    let r = Realization::from_label("A2").unwrap();
    let w = r.longest_word().clone();
    let lambda = r.from_pairings(&[1.0, 1.0]).unwrap();
    assert!(in_polytope(&r, &w, &lambda, &[0.5, 1.0, 0.5]).unwrap());
    // ladder: x3 <= 1 - 2 x1 + x2
    assert!(!in_polytope(&r, &w, &lambda, &[0.5, 1.0, 1.2]).unwrap());
    // cone: x2 >= x1
    assert!(!in_polytope(&r, &w, &lambda, &[0.5, 0.2, 0.0]).unwrap());
}
