//! Property tests over randomly generated paths and expressions.

use std::collections::BTreeMap;

use contcrystal::plpath::random_path;
use contcrystal::stringparam::{in_polytope, inverse_string, string_data};
use contcrystal::transforms::{pitman, pitman_w0};
use contcrystal::troplift::{numeric_trop_limit, SfExpr};
use contcrystal::{PlPath, Realization};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LABELS: [&str; 6] = ["A1", "A2", "B2", "I5", "A3", "H3"];

fn path_for(r: &Realization, seed: u64, nb: usize) -> PlPath {
    random_path(&mut ChaCha8Rng::seed_from_u64(seed), r.rank(), nb, 1.0)
}

fn group() -> impl Strategy<Value = Realization> {
    (0..LABELS.len()).prop_map(|i| Realization::from_label(LABELS[i]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pitman_is_idempotent(r in group(), seed in any::<u64>(), nb in 2usize..9, s in 0usize..4) {
        let s = s % r.rank();
        let eta = path_for(&r, seed, nb);
        let once = pitman(&r, s, &eta).unwrap();
        let twice = pitman(&r, s, &once).unwrap();
        prop_assert!(once.sup_distance(&twice) < 1e-9);
        prop_assert!(once.pair(r.simple_coroot(s)).min() > -1e-9);
    }

    #[test]
    fn highest_path_is_dominant(r in group(), seed in any::<u64>(), nb in 2usize..9) {
        let pi = pitman_w0(&r, &path_for(&r, seed, nb)).unwrap();
        for s in 0..r.rank() {
            prop_assert!(pi.pair(r.simple_coroot(s)).min() > -1e-9);
        }
    }

    #[test]
    fn string_coordinates_round_trip(r in group(), seed in any::<u64>(), nb in 2usize..7) {
        let w = r.longest_word().clone();
        let eta = path_for(&r, seed, nb);
        let (x, pi) = string_data(&r, &w, &eta).unwrap();
        prop_assert!(x.iter().all(|v| *v >= 0.0));
        prop_assert!(in_polytope(&r, &w, pi.endpoint(), &x).unwrap());
        let back = inverse_string(&r, &w, &pi, &x).unwrap();
        prop_assert!(back.sup_distance(&eta) < 1e-8);
    }

    #[test]
    fn split_inverts_concat(seed in any::<u64>(), nb1 in 2usize..7, nb2 in 2usize..7) {
        let r = Realization::from_label("A2").unwrap();
        let a = path_for(&r, seed, nb1);
        let b = path_for(&r, seed.wrapping_add(1), nb2);
        let (p, q) = a.concat_star(&b).unwrap().split_star();
        prop_assert!(p.sup_distance(&a) < 1e-12);
        prop_assert!(q.sup_distance(&b) < 1e-12);
        prop_assert!(a.kappa().kappa().sup_distance(&a) < 1e-12);
    }

    #[test]
    fn tropical_limit_within_error_constant(
        xs in proptest::collection::vec(-5.0f64..5.0, 4),
        src in prop::sample::select(vec!["t1 + 2*t2/t3", "1/(t1*t2 + 3*t3*t4)", "(t1 + t4)*(t2 + 0.25*t3)", "t1*t2"]),
    ) {
        let e = SfExpr::parse(src).unwrap();
        let x: BTreeMap<String, f64> = (1..=4).map(|k| (format!("t{k}"), xs[k - 1])).collect();
        let c = e.trop_error_constant();
        let eps = [1.0, 0.1, 1e-3];
        for (res, ep) in numeric_trop_limit(&e, &x, &eps).unwrap().into_iter().zip(eps) {
            prop_assert!(res <= c * ep + 1e-12);
        }
    }
}
