//! Duality-gap certificate.
//!
//! The Fenchel dual of `min ½‖y − Xb‖² + Jλ(b)` is
//! `max ½‖y‖² − ½‖y − θ‖²` over `θ` with `Xᵀθ` in the unit ball of the dual
//! norm, i.e. `Σ_{i≤k} |Xᵀθ|(i) ≤ Σ_{i≤k} λi` for every `k`. The residual
//! `r = y − Xb`, shrunk by the largest factor `c ≤ 1` that makes it feasible,
//! is a dual point, so `primal(b) − dual(c·r)` bounds the suboptimality of `b`.

use nalgebra::DVector;

use crate::error::{check_len, Result};
use crate::linalg::{mul_sparse, tr_mul};
use crate::sorted_l1::{sorted_l1_norm_unchecked, ProxWorkspace};

use super::SlopeProblem;

/// Largest `c ∈ [0, 1]` with `c·v` inside the dual ball of `Jλ`.
pub(crate) fn dual_scale(v: &[f64], lambda: &[f64]) -> f64 {
    let mut mags: Vec<f64> = v.iter().map(|c| c.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut scale = 1.0f64;
    let (mut cum_v, mut cum_l) = (0.0, 0.0);
    for (m, l) in mags.iter().zip(lambda) {
        cum_v += m;
        cum_l += l;
        if cum_v > 0.0 {
            scale = scale.min(cum_l / cum_v);
        }
    }
    scale
}

/// Returns `(primal, gap)` given the residual `r = y − Xb`, the correlations
/// `Xᵀr` and `Jλ(b)`.
pub(crate) fn primal_and_gap(
    y: &DVector<f64>,
    resid: &DVector<f64>,
    corr: &[f64],
    penalty: f64,
    lambda: &[f64],
) -> (f64, f64) {
    let rss = resid.norm_squared();
    let primal = 0.5 * rss + penalty;
    let c = dual_scale(corr, lambda);
    let dual = c * resid.dot(y) - 0.5 * c * c * rss;
    (primal, (primal - dual).max(0.0))
}

/// Certified upper bound on `objective(beta) − min objective`.
pub fn duality_gap(problem: &SlopeProblem<'_>, beta: &[f64]) -> Result<f64> {
    check_len("beta", problem.p(), beta.len())?;
    let mut fit = DVector::zeros(problem.n());
    mul_sparse(problem.x(), beta, &mut fit);
    let resid = problem.y() - fit;
    let mut corr = vec![0.0; problem.p()];
    tr_mul(problem.x(), &resid, &mut corr);
    let lambda = problem.lambda().as_slice();
    let penalty = sorted_l1_norm_unchecked(beta, lambda);
    Ok(primal_and_gap(problem.y(), &resid, &corr, penalty, lambda).1)
}

/// `‖β − prox_{tJλ}(β − t·Xᵀ(Xβ − y))‖₂`; zero exactly at minimizers.
pub fn fixed_point_residual(problem: &SlopeProblem<'_>, beta: &[f64], step: f64) -> Result<f64> {
    check_len("beta", problem.p(), beta.len())?;
    let mut fit = DVector::zeros(problem.n());
    mul_sparse(problem.x(), beta, &mut fit);
    let resid = problem.y() - fit;
    let mut corr = vec![0.0; problem.p()];
    tr_mul(problem.x(), &resid, &mut corr);
    let point: Vec<f64> = beta.iter().zip(&corr).map(|(b, c)| b + step * c).collect();
    let mut next = vec![0.0; problem.p()];
    ProxWorkspace::with_capacity(problem.p()).prox_into(
        &point,
        problem.lambda(),
        step,
        &mut next,
    )?;
    Ok(beta
        .iter()
        .zip(&next)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt())
}
