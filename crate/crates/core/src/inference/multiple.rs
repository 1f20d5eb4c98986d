use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Result, SlopeError};
use crate::lambda::{inv_norm_cdf, lambda_bh};
use crate::sorted_l1::prox_sorted_l1;

use super::one_based;

/// Hypotheses rejected by a procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionSet {
    /// Rejected hypotheses, 0-based and ascending (1-based in JSON).
    #[serde(with = "one_based")]
    pub rejected: Vec<usize>,
    /// Number of ordered statistics passed before stopping.
    pub threshold_index: usize,
    pub statistic_scale: f64,
}

impl RejectionSet {
    pub fn len(&self) -> usize {
        self.rejected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rejected.is_empty()
    }
}

fn check_inputs(stats: &[f64], sigma: f64, q: f64) -> Result<()> {
    check_finite("statistics", stats)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(SlopeError::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(SlopeError::InvalidArgument(format!(
            "q must lie in (0, 1), got {q}"
        )));
    }
    Ok(())
}

/// Indices ordered by decreasing `|stat|`, ties kept in input order.
fn order_by_magnitude(stats: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..stats.len()).collect();
    order.sort_by(|&a, &b| stats[b].abs().total_cmp(&stats[a].abs()));
    order
}

fn critical(i: usize, p: usize, q: f64) -> Result<f64> {
    inv_norm_cdf(1.0 - i as f64 * q / (2.0 * p as f64))
}

fn reject_top(stats: &[f64], order: &[usize], count: usize, sigma: f64) -> RejectionSet {
    debug_assert!(count <= stats.len());
    let mut rejected = order[..count].to_vec();
    rejected.sort_unstable();
    RejectionSet {
        rejected,
        threshold_index: count,
        statistic_scale: sigma,
    }
}

/// Benjamini–Hochberg step-up on two-sided z statistics.
///
/// Rejects the `i_BH` largest `|stat|`, where `i_BH` is the largest `i` with
/// `|stat|_(i)/σ ≥ Φ⁻¹(1 − iq/2p)`, or 0 if there is none.
pub fn bh_step_up(stats: &[f64], sigma: f64, q: f64) -> Result<RejectionSet> {
    check_inputs(stats, sigma, q)?;
    let p = stats.len();
    let order = order_by_magnitude(stats);
    let mut i_bh = 0;
    for (rank, &j) in order.iter().enumerate() {
        if stats[j].abs() / sigma >= critical(rank + 1, p, q)? {
            i_bh = rank + 1;
        }
    }
    Ok(reject_top(stats, &order, i_bh, sigma))
}

/// Step-down counterpart: rejects `H(1), …, H(i−1)` where `i` is the first
/// rank whose statistic falls below its critical value.
pub fn step_down(stats: &[f64], sigma: f64, q: f64) -> Result<RejectionSet> {
    check_inputs(stats, sigma, q)?;
    let p = stats.len();
    let order = order_by_magnitude(stats);
    let mut count = p;
    for (rank, &j) in order.iter().enumerate() {
        if stats[j].abs() / sigma < critical(rank + 1, p, q)? {
            count = rank;
            break;
        }
    }
    Ok(reject_top(stats, &order, count, sigma))
}

/// Hard thresholding of `ỹ` at `|ỹ|_(i_BH)`; all zeros when BH rejects nothing.
pub fn fdr_threshold_estimate(y_tilde: &[f64], sigma: f64, q: f64) -> Result<Vec<f64>> {
    let bh = bh_step_up(y_tilde, sigma, q)?;
    if bh.is_empty() {
        return Ok(vec![0.0; y_tilde.len()]);
    }
    let t = bh
        .rejected
        .iter()
        .map(|&i| y_tilde[i].abs())
        .fold(f64::INFINITY, f64::min);
    Ok(y_tilde
        .iter()
        .map(|&v| if v.abs() >= t { v } else { 0.0 })
        .collect())
}

/// SLOPE with `X = I` and `λ = σ·λ_BH`: a single prox evaluation, selecting
/// its nonzero entries.
pub fn slope_orthogonal_select(y_tilde: &[f64], sigma: f64, q: f64) -> Result<RejectionSet> {
    check_inputs(y_tilde, sigma, q)?;
    if y_tilde.is_empty() {
        return Err(SlopeError::InvalidArgument("no statistics given".into()));
    }
    let lambda = lambda_bh(y_tilde.len(), q)?.scaled(sigma)?;
    let fit = prox_sorted_l1(y_tilde, &lambda)?;
    let rejected: Vec<usize> = (0..fit.len()).filter(|&i| fit[i] != 0.0).collect();
    Ok(RejectionSet {
        threshold_index: rejected.len(),
        rejected,
        statistic_scale: sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_to_reject() {
        let r = bh_step_up(&[0.0; 10], 1.0, 0.1).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.threshold_index, 0);
        assert_eq!(
            fdr_threshold_estimate(&[0.1, -0.2], 1.0, 0.1).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn single_strong_statistic() {
        let r = bh_step_up(&[10.0 * 2.0], 2.0, 0.05).unwrap();
        assert_eq!(r.rejected, vec![0]);
        assert_eq!(
            fdr_threshold_estimate(&[20.0], 2.0, 0.05).unwrap(),
            vec![20.0]
        );
        assert_eq!(
            slope_orthogonal_select(&[20.0], 2.0, 0.05)
                .unwrap()
                .rejected,
            vec![0]
        );
    }

    #[test]
    fn step_up_passes_over_a_gap() {
        // Second-largest fails its cutoff but the third passes, so step-up
        // rejects three while step-down stops after one.
        let p = 4;
        let q = 0.5;
        let c: Vec<f64> = (1..=p).map(|i| critical(i, p, q).unwrap()).collect();
        let stats = [c[0] + 1.0, c[1] - 1e-3, c[2] + 0.0, 0.0];
        assert!(stats[1] > stats[2]);
        assert_eq!(bh_step_up(&stats, 1.0, q).unwrap().rejected, vec![0, 1, 2]);
        assert_eq!(step_down(&stats, 1.0, q).unwrap().rejected, vec![0]);
    }

    #[test]
    fn threshold_keeps_bh_set() {
        let y = [5.0, -0.3, 4.0, 0.1, -6.0, 2.5];
        let kept = fdr_threshold_estimate(&y, 1.0, 0.1).unwrap();
        let bh = bh_step_up(&y, 1.0, 0.1).unwrap();
        let nz: Vec<usize> = (0..y.len()).filter(|&i| kept[i] != 0.0).collect();
        assert_eq!(nz, bh.rejected);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(bh_step_up(&[1.0], 0.0, 0.1).is_err());
        assert!(bh_step_up(&[1.0], 1.0, 1.0).is_err());
        assert!(bh_step_up(&[f64::NAN], 1.0, 0.1).is_err());
    }

    #[test]
    fn json_uses_one_based_indices() {
        let r = RejectionSet {
            rejected: vec![0, 4],
            threshold_index: 2,
            statistic_scale: 1.0,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("[1,5]"), "{s}");
        assert_eq!(serde_json::from_str::<RejectionSet>(&s).unwrap(), r);
    }
}
