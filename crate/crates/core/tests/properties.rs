use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fmcg::covers_asdim::are_rt_disjoint;
use fmcg::fuzzy_space::{random_stationary_space, BuiltinId, FuzzySpace};
use fmcg::numerics::{psd_sqrt, tnorm_apply, SymMatrix, TNorm, Tolerance};
use fmcg::property_a::WitnessFamily;

fn seeded_space(seed: u64, n: usize) -> FuzzySpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_stationary_space(format!("prop-{seed}"), n, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_is_symmetric_and_monotone(seed in 0u64..500, x in 0usize..10, y in 0usize..10,
                                      t1 in 0.01f64..50.0, t2 in 0.01f64..50.0) {
        let s = seeded_space(seed, 10);
        let a = s.eval(x, y, t1).unwrap();
        prop_assert_eq!(a, s.eval(y, x, t1).unwrap());
        prop_assert!(a > 0.0 && a <= 1.0);
        if t2 >= t1 {
            prop_assert!(s.eval(x, y, t2).unwrap() >= a);
        }
    }

    #[test]
    fn balls_nest_in_both_parameters(seed in 0u64..200, x in 0usize..12,
                                     r1 in 0.05f64..0.9, dr in 0.0f64..0.09,
                                     t1 in 0.1f64..20.0, dt in 0.0f64..20.0) {
        let s = seeded_space(seed, 12);
        let small = s.ball(x, r1, t1).unwrap();
        let wide_r = s.ball(x, r1 + dr, t1).unwrap();
        let wide_t = s.ball(x, r1, t1 + dt).unwrap();
        for y in &small {
            prop_assert!(wide_r.contains(y));
            prop_assert!(wide_t.contains(y));
        }
    }

    #[test]
    fn disjointness_is_antitone_in_r(seed in 0u64..200, r1 in 0.05f64..0.5,
                                     dr in 0.0f64..0.4, t in 0.1f64..10.0) {
        let s = seeded_space(seed, 10);
        let u: Vec<usize> = vec![0, 1, 2];
        let v: Vec<usize> = vec![7, 8, 9];
        // a wider closeness threshold can only merge sets, never separate them
        if !are_rt_disjoint(&s, &u, &v, r1, t).unwrap() {
            prop_assert!(!are_rt_disjoint(&s, &u, &v, r1 + dr, t).unwrap());
        }
    }

    #[test]
    fn witness_multiset_identity(heights in proptest::collection::vec(
        proptest::collection::btree_map(0usize..6, 1u32..4, 1..4), 6)) {
        let w = WitnessFamily::from_heights(6, heights.into_iter()
            .map(|h| h.into_iter().collect::<BTreeMap<_, _>>()).collect()).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                let card_sum = w.card(x) + w.card(y);
                let inter = w.intersection_card(x, y);
                let delta = w.symmetric_difference_card(x, y);
                prop_assert_eq!(card_sum, 2 * inter + delta);
            }
        }
    }

    #[test]
    fn psd_sqrt_squares_back(seed in 0u64..100, n in 2usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                b.set(i, j, rand::Rng::gen_range(&mut rng, -1.0..1.0));
            }
        }
        let prod = b.matmul(&b);
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a.set(i, j, prod[i * n + j]);
            }
        }
        let root = psd_sqrt(&a, Tolerance::default()).unwrap();
        let back = root.matmul(&root);
        let mut err = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                err += (back[i * n + j] - prod[i * n + j]).powi(2);
            }
        }
        prop_assert!(err.sqrt() <= 1e-8 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn tnorms_are_monotone_with_unit(tn in prop_oneof![Just(TNorm::Product), Just(TNorm::Minimum)],
                                     a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
        let ab = tnorm_apply(tn, a, b).unwrap();
        prop_assert_eq!(ab, tnorm_apply(tn, b, a).unwrap());
        prop_assert!((tnorm_apply(tn, a, 1.0).unwrap() - a).abs() < 1e-15);
        if c >= b {
            prop_assert!(tnorm_apply(tn, a, c).unwrap() >= ab);
        }
    }

    #[test]
    fn builtin_triangle_holds_on_sampled_times(x in 0usize..12, y in 0usize..12,
                                               z in 0usize..12, t in 0.1f64..10.0, s in 0.1f64..10.0) {
        let space = FuzzySpace::builtin(BuiltinId::NatRatio, 12).unwrap();
        let lhs = space.tnorm_apply(
            space.eval(x, y, t).unwrap(),
            space.eval(y, z, s).unwrap(),
        );
        let rhs = space.eval(x, z, t + s).unwrap();
        prop_assert!(lhs <= rhs + 1e-12);
    }
}
