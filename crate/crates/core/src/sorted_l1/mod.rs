//! The sorted-ℓ1 norm `Jλ(b) = Σ λi |b|(i)` and its proximal mapping.

mod isotonic;
mod prox;
mod sequence;

pub use isotonic::isotonic_regression;
pub use prox::{prox_sorted_l1, prox_sorted_l1_sorted_nonneg, ProxWorkspace};
pub use sequence::LambdaSequence;

use crate::error::{check_len, Result};

/// `Σ λi |b|(i)` where `|b|(1) ≥ … ≥ |b|(p)` are the sorted magnitudes.
pub fn sorted_l1_norm(b: &[f64], lambda: &LambdaSequence) -> Result<f64> {
    check_len("b", lambda.len(), b.len())?;
    Ok(sorted_l1_norm_unchecked(b, lambda.as_slice()))
}

pub(crate) fn sorted_l1_norm_unchecked(b: &[f64], lambda: &[f64]) -> f64 {
    let mut mags: Vec<f64> = b.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    mags.iter().zip(lambda).map(|(m, l)| m * l).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(v: &[f64]) -> LambdaSequence {
        LambdaSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn reductions() {
        assert_eq!(
            sorted_l1_norm(&[0.0, 0.0, 0.0], &seq(&[3.0, 2.0, 1.0])).unwrap(),
            0.0
        );
        // constant weights: plain l1
        assert_eq!(
            sorted_l1_norm(&[1.0, -2.0, 3.0], &seq(&[1.0, 1.0, 1.0])).unwrap(),
            6.0
        );
        // single leading weight: scaled l-infinity
        assert_eq!(
            sorted_l1_norm(&[1.0, -2.0, 3.0], &seq(&[2.0, 0.0, 0.0])).unwrap(),
            6.0
        );
    }

    #[test]
    fn matches_permutation_maximum() {
        // The sorted pairing maximizes Σ λi |b|π(i) over permutations π.
        let b = [3.0, 1.0];
        let l = seq(&[2.0, 0.5]);
        let brute = f64::max(2.0 * 3.0 + 0.5 * 1.0, 2.0 * 1.0 + 0.5 * 3.0);
        assert_eq!(sorted_l1_norm(&b, &l).unwrap(), brute);
        assert_eq!(brute, 6.5);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(sorted_l1_norm(&[1.0], &seq(&[1.0, 1.0])).is_err());
    }
}
