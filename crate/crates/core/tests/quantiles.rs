#![allow(clippy::excessive_precision)]

use slope_core::lambda::{
    inv_norm_cdf, lambda_bh, lambda_gaussian, lambda_oscar, norm_cdf, norm_sf,
};
use slope_core::SlopeError;

/// Standard normal quantiles at 50 significant digits, rounded to 20.
const FROZEN: [(f64, f64); 11] = [
    (1e-15, -7.941345326170996781),
    (1e-10, -6.3613409024040562047),
    (1e-6, -4.7534243088228989482),
    (0.001, -3.0902323061678135415),
    (0.025, -1.9599639845400542355),
    (0.1, -1.281551565544600467),
    (0.3, -0.52440051270804078404),
    (0.5, 0.0),
    (0.75, 0.6744897501960817432),
    (0.975, 1.9599639845400542355),
    (0.99999, 4.264890793922825),
];

#[test]
fn matches_frozen_high_precision_quantiles() {
    for (a, want) in FROZEN {
        let got = inv_norm_cdf(a).unwrap();
        let err = (got - want).abs();
        assert!(
            err <= 1e-9 * want.abs().max(1e-300) || err == 0.0,
            "α = {a}: {got} vs {want}"
        );
    }
}

/// Φ from the series `½ + φ(x)·Σ x^{2k+1}/(1·3···(2k+1))` for moderate |x|
/// and the continued fraction for the upper tail.
fn series_cdf(x: f64) -> f64 {
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if x.abs() < 5.0 {
        let (mut term, mut sum, mut k) = (x, x, 1.0);
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            term *= x * x / (2.0 * k + 1.0);
            sum += term;
            k += 1.0;
        }
        0.5 + pdf * sum
    } else {
        let t = x.abs();
        let mut cf = t;
        for k in (1..=200).rev() {
            cf = t + k as f64 / cf;
        }
        let tail = pdf / cf;
        if x > 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }
}

#[test]
fn round_trip_through_series_cdf() {
    for e in 0..=150 {
        let a = 10f64.powf(-15.0 + e as f64 * 0.1);
        if a >= 1.0 {
            break;
        }
        for alpha in [a, 1.0 - a] {
            if alpha <= 0.0 || alpha >= 1.0 {
                continue;
            }
            let back = series_cdf(inv_norm_cdf(alpha).unwrap());
            assert!(
                (back - alpha).abs() <= 1e-12,
                "α = {alpha:e}: Φ(Φ⁻¹(α)) = {back:e}"
            );
        }
    }
}

#[test]
fn library_cdf_agrees_with_series() {
    for i in -80..=80 {
        let x = i as f64 * 0.1;
        let (a, b) = (norm_cdf(x), series_cdf(x));
        assert!((a - b).abs() <= 1e-15 + 1e-13 * b, "x = {x}: {a} vs {b}");
    }
}

#[test]
fn domain_is_open_interval() {
    for a in [0.0, 1.0, -1e-300, 2.0, f64::NAN, f64::INFINITY] {
        assert!(matches!(inv_norm_cdf(a), Err(SlopeError::Domain(_))), "{a}");
    }
}

#[test]
fn bh_sequence_examples() {
    let one = lambda_bh(1, 0.5).unwrap();
    assert!((one[0] - 0.6744897501960817).abs() < 1e-12);
    let big = lambda_bh(5000, 0.1).unwrap();
    assert!((big[0] - 4.264890793922825).abs() < 1e-9);
    let s = big.as_slice();
    assert!(s.windows(2).all(|w| w[0] > w[1]));
    let last = lambda_bh(10, 0.999).unwrap();
    assert!((norm_sf(last[9]) - 0.999 * 10.0 / 20.0).abs() < 1e-14);
    assert!((last[9] - 0.0012533).abs() < 1e-6);
}

#[test]
fn gaussian_sequence_dominates_bh_and_is_monotone() {
    for (p, n, q) in [
        (10_000, 5000, 0.1),
        (2500, 5000, 0.05),
        (500, 250, 0.1),
        (1000, 1000, 0.05),
    ] {
        let g = lambda_gaussian(p, n, q).unwrap();
        let bh = lambda_bh(p, q).unwrap();
        assert_eq!(g.raw[0], bh[0]);
        for (i, r) in g.raw.iter().enumerate() {
            assert!(*r >= bh[i], "raw below BH at {i}");
        }
        let s = g.sequence.as_slice();
        assert!(s.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(s[g.k_star - 1], g.raw[g.k_star - 1]);
        assert!(s[g.k_star..].iter().all(|&v| v == s[g.k_star - 1]));
    }
}

#[test]
fn gaussian_sequence_can_rise_when_n_is_small() {
    // With n = p/2 the raw recursion turns upward after its minimum.
    let g = lambda_gaussian(10_000, 5000, 0.1).unwrap();
    assert!(g.raw.windows(2).any(|w| w[1] > w[0]));
}

#[test]
fn oscar_examples() {
    assert_eq!(
        lambda_oscar(3, 1.0, 0.0).unwrap().as_slice(),
        &[1.0, 1.0, 1.0]
    );
    assert_eq!(
        lambda_oscar(3, 0.0, 1.0).unwrap().as_slice(),
        &[2.0, 1.0, 0.0]
    );
    assert_eq!(lambda_oscar(1, 2.0, 5.0).unwrap().as_slice(), &[2.0]);
    assert!(lambda_oscar(3, 0.0, 0.0).is_err());
}
