use serde::{Deserialize, Serialize};

use crate::error::{Result, SlopeError};
use crate::sorted_l1::LambdaSequence;

use super::normal::inv_norm_cdf;

pub(crate) fn check_level(q: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(SlopeError::InvalidArgument(format!(
            "FDR level q must lie in (0, 1), got {q}"
        )));
    }
    Ok(())
}

/// `Φ⁻¹(1 − i·q/2p)` for `i = 1..p`, the Benjamini–Hochberg critical values.
///
/// Entries whose tail probability `i·q/2p` reaches ½ are set to zero.
pub fn lambda_bh(p: usize, q: f64) -> Result<LambdaSequence> {
    check_level(q)?;
    if p == 0 {
        return Err(SlopeError::InvalidArgument("p must be ≥ 1".into()));
    }
    let values = (1..=p)
        .map(|i| bh_value(i, p, q))
        .collect::<Result<Vec<_>>>()?;
    LambdaSequence::new(values)
}

pub(crate) fn bh_value(i: usize, p: usize, q: f64) -> Result<f64> {
    let tail = i as f64 * q / (2.0 * p as f64);
    if tail >= 0.5 {
        return Ok(0.0);
    }
    // Φ⁻¹(1 − a) = −Φ⁻¹(a) keeps full relative precision for small a.
    Ok(-inv_norm_cdf(tail)?)
}

/// The recursively corrected sequence for Gaussian designs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSequence {
    /// `λG(i)` for every index where the recursion is defined.
    pub raw: Vec<f64>,
    /// 1-based location of the global minimum of `raw` (first on ties).
    pub k_star: usize,
    /// `raw` up to `k_star`, then held flat at `raw(k_star)`, length `p`.
    pub sequence: LambdaSequence,
}

/// `λG(i) = λBH(i)·√(1 + w(i−1)·Σ_{j<i} λG(j)²)` with `w(k) = 1/(n − k − 1)`,
/// truncated flat after its global minimum.
///
/// The recursion is evaluated while `w(i−1)` is defined (`i < n`). It is an
/// error if the minimum over that range sits at its last index with indices
/// left to fill, since the minimum is then not located.
pub fn lambda_gaussian(p: usize, n: usize, q: f64) -> Result<GaussianSequence> {
    check_level(q)?;
    if p == 0 {
        return Err(SlopeError::InvalidArgument("p must be ≥ 1".into()));
    }
    if n <= 2 {
        return Err(SlopeError::InvalidArgument(format!(
            "the Gaussian correction needs n > 2, got {n}"
        )));
    }

    let mut raw = Vec::with_capacity(p.min(n));
    let mut sum_sq = 0.0;
    for i in 1..=p {
        let bh = bh_value(i, p, q)?;
        let value = if i == 1 {
            bh
        } else {
            if n <= i {
                break;
            }
            bh * (1.0 + sum_sq / (n - i) as f64).sqrt()
        };
        sum_sq += value * value;
        raw.push(value);
    }

    let k_star = raw
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(best_i, best), (i, &v)| {
            if v < best {
                (i, v)
            } else {
                (best_i, best)
            }
        })
        .0
        + 1;
    if raw.len() < p && k_star == raw.len() {
        return Err(SlopeError::Construction {
            index: raw.len() + 1,
            reason: format!(
                "w(i−1) = 1/(n − i) is undefined for n = {n} before the sequence reached its minimum"
            ),
        });
    }

    // Running minimum up to k*, so the result is nonincreasing even if the
    // recursion has a bump before its global minimum.
    let mut values = Vec::with_capacity(p);
    let mut floor = f64::INFINITY;
    for &v in &raw[..k_star] {
        floor = floor.min(v);
        values.push(floor);
    }
    values.resize(p, floor);
    Ok(GaussianSequence {
        raw,
        k_star,
        sequence: LambdaSequence::new(values)?,
    })
}

/// OSCAR weights `λ1 + (p − i)·λ2`, a linearly decaying sequence.
pub fn lambda_oscar(p: usize, l1: f64, l2: f64) -> Result<LambdaSequence> {
    if p == 0 {
        return Err(SlopeError::InvalidArgument("p must be ≥ 1".into()));
    }
    if !(l1 >= 0.0 && l2 >= 0.0 && l1.is_finite() && l2.is_finite()) {
        return Err(SlopeError::InvalidArgument(format!(
            "OSCAR parameters must be finite and nonnegative, got l1 = {l1}, l2 = {l2}"
        )));
    }
    LambdaSequence::new((1..=p).map(|i| l1 + (p - i) as f64 * l2).collect())
}
