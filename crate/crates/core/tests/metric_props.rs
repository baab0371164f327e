use curtail::evaluation::{scaling_fit, spearman};
use curtail::gini;
use proptest::prelude::*;

fn shares() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..5.0, 1..40)
        .prop_filter("not all zero", |v| v.iter().any(|&x| x > 0.0))
}

proptest! {
    #[test]
    fn gini_is_scale_invariant(v in shares(), c in 0.01f64..100.0) {
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        prop_assert!((gini(&v).unwrap() - gini(&scaled).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn gini_is_permutation_invariant(v in shares(), seed in any::<u64>()) {
        let mut shuffled = v.clone();
        let n = shuffled.len();
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert!((gini(&v).unwrap() - gini(&shuffled).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn gini_is_in_unit_interval(v in shares()) {
        let g = gini(&v).unwrap();
        prop_assert!((0.0..1.0).contains(&g));
    }

    #[test]
    fn constant_vectors_have_zero_gini(x in 0.001f64..10.0, n in 1usize..30) {
        prop_assert!(gini(&vec![x; n]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn power_laws_are_recovered(k in 0.5f64..3.0, a in 0.001f64..10.0) {
        let samples: Vec<(f64, f64)> = [10.0, 20.0, 30.0, 40.0, 60.0]
            .iter()
            .map(|&m: &f64| (m, a * m.powf(k)))
            .collect();
        prop_assert!((scaling_fit(&samples).unwrap() - k).abs() < 1e-9);
    }

    #[test]
    fn spearman_of_monotone_maps_is_one(v in prop::collection::hash_set(0i32..1000, 2..20)) {
        let xs: Vec<f64> = v.iter().map(|&x| x as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.powi(3) + 1.0).collect();
        prop_assert!((spearman(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
    }
}
