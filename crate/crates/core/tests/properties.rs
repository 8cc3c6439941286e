//! Property tests for the algebraic invariants.

use proptest::prelude::*;

use tsecon::series::{Dataset, Frequency, Period, TimeIndex, TimeSeries};
use tsecon::stats::pearson;
use tsecon::varkit::{
    cholesky_factor, fevd, matrix_to_dataset, random_stable_var, simulate_var, var_estimate,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vec_pair(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-100.0f64..100.0, len),
        prop::collection::vec(-100.0f64..100.0, len),
    )
}

fn spread(xs: &[f64]) -> f64 {
    let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max - min
}

proptest! {
    #[test]
    fn pearson_is_scale_invariant((x, y) in vec_pair(40), a in 0.01f64..50.0, b in -20.0f64..20.0) {
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let scaled: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let r0 = pearson(&x, &y).unwrap();
        let r1 = pearson(&scaled, &y).unwrap();
        prop_assert!((r0 - r1).abs() < 1e-12, "r0={r0} r1={r1}");
    }

    #[test]
    fn pearson_flips_sign((x, y) in vec_pair(40)) {
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let negated: Vec<f64> = x.iter().map(|v| -v).collect();
        let r0 = pearson(&x, &y).unwrap();
        let r1 = pearson(&negated, &y).unwrap();
        prop_assert!((r0 + r1).abs() < 1e-12);
    }

    #[test]
    fn pearson_stays_in_unit_interval((x, y) in vec_pair(25)) {
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn transforms_preserve_the_index(values in prop::collection::vec(-50.0f64..50.0, 10..60), k in 1usize..4) {
        let start = Period::new(Frequency::Monthly, 2005, 0).unwrap();
        let index = TimeIndex::new(start, values.len()).unwrap();
        let s = TimeSeries::from_values("x", index.clone(), values).unwrap();
        prop_assume!(k < s.len());
        let lagged = s.lag(k).unwrap();
        let diffed = s.difference(k).unwrap();
        prop_assert_eq!(lagged.index(), &index);
        prop_assert_eq!(diffed.index(), &index);
        // Index periods remain strictly increasing.
        for t in 1..index.len() {
            prop_assert!(index.period(t - 1) < index.period(t));
        }
    }

    #[test]
    fn align_keeps_periods_ordered(mask in prop::collection::vec(prop::bool::ANY, 12..40)) {
        prop_assume!(mask.iter().any(|&m| m));
        let start = Period::new(Frequency::Monthly, 2010, 0).unwrap();
        let index = TimeIndex::new(start, mask.len()).unwrap();
        let values: Vec<Option<f64>> = mask
            .iter()
            .enumerate()
            .map(|(i, &m)| m.then_some(i as f64))
            .collect();
        let s = TimeSeries::new("x", index, values).unwrap();
        let d = Dataset::new(vec![s]).unwrap();
        let aligned = d.align(true).unwrap();
        let idx = aligned.dataset.index();
        for t in 1..idx.len() {
            prop_assert!(idx.period(t - 1) < idx.period(t));
        }
        // Every surviving row is complete.
        prop_assert!(aligned.dataset.series()[0].is_complete());
    }

    #[test]
    fn fevd_rows_always_sum_to_one_hundred(seed in 0u64..500, k in 2usize..5, p in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (intercept, coefs, omega) = random_stable_var(k, p, 0.85, &mut rng);
        let chol = cholesky_factor(&omega).unwrap();
        let data = simulate_var(&intercept, &coefs, &chol, 80 + 40 * k, 50, &mut rng);
        let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
        let d = matrix_to_dataset(&data, &names).unwrap();
        let model = var_estimate(&d, p).unwrap();
        let f = fevd(&model, "v0", 12).unwrap();
        for row in &f.shares {
            let sum: f64 = row.iter().sum();
            prop_assert!((sum - 100.0).abs() < 1e-8);
            for &share in row {
                prop_assert!((-1e-9..=100.0 + 1e-9).contains(&share));
            }
        }
    }
}
