mod common;

use proptest::prelude::*;
use slope_core::{
    isotonic_regression, prox_sorted_l1, prox_sorted_l1_sorted_nonneg, sorted_l1_norm,
    LambdaSequence, ProxWorkspace,
};

fn lambda_strategy(p: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..3.0f64, p).prop_map(|mut v| {
        v.sort_by(|a, b| b.partial_cmp(a).unwrap());
        if v[0] == 0.0 {
            v[0] = 1.0;
        }
        v
    })
}

fn instance(max_p: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max_p).prop_flat_map(|p| (prop::collection::vec(-6.0..6.0f64, p), lambda_strategy(p)))
}

fn seq(v: &[f64]) -> LambdaSequence {
    LambdaSequence::new(v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn agrees_with_exhaustive_oracle((y, lam) in instance(8)) {
        let x = prox_sorted_l1(&y, &seq(&lam)).unwrap();
        let oracle = common::brute_force_prox(&y, &lam);
        for (a, b) in x.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-8, "{x:?} vs {oracle:?}");
        }
        prop_assert!(common::certificate_violation(&y, &x, &lam) <= 1e-9);
    }

    #[test]
    fn nonexpansive(
        (y1, lam) in instance(40),
        shift in prop::collection::vec(-2.0..2.0f64, 40),
    ) {
        let y2: Vec<f64> = y1.iter().zip(&shift).map(|(a, b)| a + b).collect();
        let l = seq(&lam);
        let (x1, x2) = (prox_sorted_l1(&y1, &l).unwrap(), prox_sorted_l1(&y2, &l).unwrap());
        let dx: f64 = x1.iter().zip(&x2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dy: f64 = y1.iter().zip(&y2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(dx <= dy + 1e-12);
    }

    #[test]
    fn permutation_and_sign_equivariant((y, lam) in instance(30), seed in any::<u64>()) {
        let l = seq(&lam);
        let x = prox_sorted_l1(&y, &l).unwrap();
        let mut perm: Vec<usize> = (0..y.len()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let py: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let px = prox_sorted_l1(&py, &l).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((px[k] - x[i]).abs() <= 1e-12);
        }
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let nx = prox_sorted_l1(&neg, &l).unwrap();
        for (a, b) in nx.iter().zip(&x) {
            prop_assert_eq!(*a, -*b);
        }
    }

    #[test]
    fn constant_lambda_is_soft_thresholding(y in prop::collection::vec(-6.0..6.0f64, 1..60), c in 0.0..4.0f64) {
        let l = LambdaSequence::constant(y.len(), c.max(1e-3)).unwrap();
        let x = prox_sorted_l1(&y, &l).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert!((xi - common::soft_threshold(*yi, c.max(1e-3))).abs() <= 1e-14);
        }
    }

    #[test]
    fn isotonic_link((y, lam) in instance(40)) {
        let mut w: Vec<f64> = y.iter().map(|v| v.abs()).collect();
        w.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let x = prox_sorted_l1_sorted_nonneg(&w, &seq(&lam)).unwrap();
        let diff: Vec<f64> = w.iter().zip(&lam).map(|(a, b)| a - b).collect();
        let iso = isotonic_regression(&diff).unwrap();
        for (a, b) in x.iter().zip(&iso) {
            prop_assert!((a - b.max(0.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn merge_count_is_linear((y, lam) in instance(200)) {
        let mut ws = ProxWorkspace::new();
        let mut out = vec![0.0; y.len()];
        ws.prox_into(&y, &seq(&lam), 1.0, &mut out).unwrap();
        prop_assert!(ws.last_merge_count() <= y.len());
    }

    #[test]
    fn norm_axioms(
        (a, lam) in instance(20),
        b in prop::collection::vec(-6.0..6.0f64, 20),
        t in -5.0..5.0f64,
    ) {
        let l = seq(&lam);
        let b = &b[..a.len()];
        let j = |v: &[f64]| sorted_l1_norm(v, &l).unwrap();
        let sum: Vec<f64> = a.iter().zip(b).map(|(u, v)| u + v).collect();
        prop_assert!(j(&sum) <= j(&a) + j(b) + 1e-12);
        let scaled: Vec<f64> = a.iter().map(|u| t * u).collect();
        prop_assert!((j(&scaled) - t.abs() * j(&a)).abs() <= 1e-12 * (1.0 + j(&scaled)));
        prop_assert!(j(&a) >= 0.0);
        prop_assert_eq!(j(&a) == 0.0, a.iter().all(|&v| v == 0.0));
        prop_assert_eq!(common::sorted_l1(&a, &lam), j(&a));
    }
}

#[test]
fn small_worked_examples() {
    let cases: [(&[f64], &[f64], &[f64]); 3] = [
        (&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0], &[2.0, 1.0, 0.0]),
        (&[1.0, 1.0], &[2.0, 0.0], &[0.0, 0.0]),
        (&[0.0, 0.0], &[1.0, 1.0], &[0.0, 0.0]),
    ];
    for (y, lam, want) in cases {
        assert_eq!(prox_sorted_l1(y, &seq(lam)).unwrap(), want.to_vec());
    }
}
