use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SlopeError};
use crate::linalg::{center, qr_least_squares, sample_std, select_columns};
use crate::solver::{operator_norm_sq, solve_from, SlopeProblem, SolverConfig};
use crate::sorted_l1::LambdaSequence;

use super::one_based;

const RANK_TOL: f64 = 1e-10;

/// Least squares of `y` on the columns `support` of `x`, without intercept.
///
/// Returns the coefficients (in `support` order) and the residual sum of
/// squares. An empty support gives `‖y‖²`.
pub fn ols_refit(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    support: &[usize],
) -> Result<(DVector<f64>, f64)> {
    check_len("y", x.nrows(), y.len())?;
    if let Some(&j) = support.iter().find(|&&j| j >= x.ncols()) {
        return Err(SlopeError::InvalidArgument(format!(
            "support index {j} out of range for {} columns",
            x.ncols()
        )));
    }
    if support.len() >= x.nrows() {
        return Err(SlopeError::Degenerate(format!(
            "support of size {} leaves no residual degrees of freedom with n = {}",
            support.len(),
            x.nrows()
        )));
    }
    let xs = select_columns(x, support);
    let coef =
        qr_least_squares(xs.clone(), y, RANK_TOL).map_err(|cols| SlopeError::RankDeficient {
            columns: cols.into_iter().map(|k| support[k]).collect(),
        })?;
    let resid = y - &xs * &coef;
    Ok((coef, resid.norm_squared()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledSlopeConfig {
    /// Cap on the number of SLOPE fits.
    pub max_iters: usize,
    pub solver: SolverConfig,
}

impl Default for ScaledSlopeConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledSlopeResult {
    pub beta: Vec<f64>,
    /// Least-squares coefficients on the final support, zero elsewhere.
    pub beta_debiased: Vec<f64>,
    #[serde(with = "one_based")]
    pub support: Vec<usize>,
    pub sigma_hat: f64,
    /// Number of SLOPE fits performed.
    pub iterations: usize,
    pub converged: bool,
    /// Whether every inner SLOPE solve met its tolerance.
    pub inner_converged: bool,
    /// The last two distinct supports when the loop hit its cap.
    pub cycle: Option<SupportCycle>,
}

/// Supports visited by the final two fits of a loop that did not settle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportCycle {
    #[serde(with = "one_based")]
    pub previous: Vec<usize>,
    #[serde(with = "one_based")]
    pub last: Vec<usize>,
}

/// Scaled SLOPE with default settings; see [`scaled_slope_with`].
pub fn scaled_slope(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda_unit: &LambdaSequence,
    max_iters: usize,
) -> Result<ScaledSlopeResult> {
    let config = ScaledSlopeConfig {
        max_iters,
        ..ScaledSlopeConfig::default()
    };
    scaled_slope_with(x, y, lambda_unit, &config, None)
}

/// SLOPE with the noise level estimated along the way.
///
/// Starting from the empty support, alternates between estimating
/// `σ̂² = RSS/(n − |S| − 1)` from a least-squares fit on `S` and refitting
/// SLOPE with `σ̂·λ`, until the support repeats. `y` is centered internally;
/// `x` should already have centered, unit-norm columns. `lipschitz` may carry
/// a precomputed `‖X‖²`.
pub fn scaled_slope_with(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda_unit: &LambdaSequence,
    config: &ScaledSlopeConfig,
    lipschitz: Option<f64>,
) -> Result<ScaledSlopeResult> {
    let (n, p) = (x.nrows(), x.ncols());
    check_len("y", n, y.len())?;
    check_len("lambda", p, lambda_unit.len())?;
    if config.max_iters == 0 {
        return Err(SlopeError::InvalidArgument("max_iters must be ≥ 1".into()));
    }
    if n < 3 {
        return Err(SlopeError::Degenerate(format!(
            "n = {n} is too small to estimate σ"
        )));
    }
    if sample_std(y.as_slice()) == 0.0 {
        return Err(SlopeError::Degenerate(
            "response has zero standard deviation".into(),
        ));
    }
    let mut yc = y.clone();
    center(&mut yc);
    let lip = lipschitz.unwrap_or_else(|| operator_norm_sq(x));

    let mut support: Vec<usize> = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut beta = vec![0.0; p];
    let mut sigma = 0.0;
    let mut inner_converged = true;

    for iteration in 1..=config.max_iters {
        if support.len() + 1 >= n {
            return Err(SlopeError::Degenerate(format!(
                "support reached {} variables with n = {n}",
                support.len()
            )));
        }
        let (_, rss) = ols_refit(x, &yc, &support)?;
        sigma = (rss / (n - support.len() - 1) as f64).sqrt();
        if sigma == 0.0 {
            return Err(SlopeError::Degenerate(format!(
                "perfect fit on {} variables leaves σ̂ = 0",
                support.len()
            )));
        }
        let problem = SlopeProblem::new(x, &yc, lambda_unit.scaled(sigma)?)?.with_lipschitz(lip);
        let sol = solve_from(&problem, &config.solver, Some(&beta))?;
        inner_converged &= sol.converged;
        beta = sol.beta;
        let next = sol.support;
        if next == support {
            return finish(
                x,
                &yc,
                beta,
                support,
                sigma,
                iteration,
                true,
                inner_converged,
                None,
            );
        }
        previous = Some(std::mem::replace(&mut support, next));
    }
    let cycle = previous.map(|prev| SupportCycle {
        previous: prev,
        last: support.clone(),
    });
    finish(
        x,
        &yc,
        beta,
        support,
        sigma,
        config.max_iters,
        false,
        inner_converged,
        cycle,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish(
    x: &DMatrix<f64>,
    yc: &DVector<f64>,
    beta: Vec<f64>,
    support: Vec<usize>,
    sigma_hat: f64,
    iterations: usize,
    converged: bool,
    inner_converged: bool,
    cycle: Option<SupportCycle>,
) -> Result<ScaledSlopeResult> {
    let mut beta_debiased = vec![0.0; beta.len()];
    if support.len() < x.nrows() {
        let (coef, _) = ols_refit(x, yc, &support)?;
        for (k, &j) in support.iter().enumerate() {
            beta_debiased[j] = coef[k];
        }
    }
    Ok(ScaledSlopeResult {
        beta,
        beta_debiased,
        support,
        sigma_hat,
        iterations,
        converged,
        inner_converged,
        cycle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormal(n: usize, p: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, p, |i, j| {
            ((i * 7 + j * 13) % 17) as f64 - 8.0 + (i == j) as u8 as f64
        });
        a.qr().q()
    }

    #[test]
    fn refit_on_empty_support() {
        let x = DMatrix::from_element(4, 2, 1.0);
        let y = DVector::from_vec(vec![1.0, -1.0, 2.0, -2.0]);
        let (coef, rss) = ols_refit(&x, &y, &[]).unwrap();
        assert_eq!(coef.len(), 0);
        assert_eq!(rss, 10.0);
    }

    #[test]
    fn refit_orthonormal_is_projection() {
        let x = orthonormal(12, 4);
        let y = DVector::from_fn(12, |i, _| (i as f64).cos());
        let (coef, rss) = ols_refit(&x, &y, &[1, 3]).unwrap();
        assert!((coef[0] - x.column(1).dot(&y)).abs() < 1e-12);
        assert!((coef[1] - x.column(3).dot(&y)).abs() < 1e-12);
        let expect = y.norm_squared() - coef.norm_squared();
        assert!((rss - expect).abs() < 1e-10);
    }

    #[test]
    fn refit_names_dependent_columns() {
        let mut x = DMatrix::from_fn(6, 3, |i, j| (i + 2 * j) as f64 + (i * j) as f64);
        let c = x.column(0) * 2.0;
        x.set_column(2, &c);
        let y = DVector::from_element(6, 1.0);
        match ols_refit(&x, &y, &[0, 2]) {
            Err(SlopeError::RankDeficient { columns }) => assert_eq!(columns, vec![2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_response_is_degenerate() {
        let x = orthonormal(10, 3);
        let lam = LambdaSequence::constant(3, 1.0).unwrap();
        let y = DVector::from_element(10, 0.0);
        assert!(matches!(
            scaled_slope(&x, &y, &lam, 10),
            Err(SlopeError::Degenerate(_))
        ));
    }

    #[test]
    fn finds_single_strong_column() {
        let n = 100;
        let x = orthonormal(n, 10);
        let mut y = x.column(0) * 10.0;
        for i in 0..n {
            y[i] += 0.05 * ((i * 37 % 11) as f64 - 5.0);
        }
        let lam = crate::lambda::lambda_bh(10, 0.05).unwrap();
        let res = scaled_slope(&x, &y, &lam, 100).unwrap();
        assert!(res.converged);
        assert_eq!(res.support, vec![0]);
        assert!(res.beta_debiased[0] > 9.5);
        assert!(res.sigma_hat > 0.0);
        let json = serde_json::to_value(&res).unwrap();
        assert_eq!(json["support"], serde_json::json!([1]));
    }
}
