use nalgebra::{DMatrix, DVector};

use super::config::{Scenario, SigmaMode, SimConfig};
use super::noise::draw_noise;
use super::orthogonal::place_signals;
use super::report::{SimRecord, SimReport};
use super::{par_map, signal_unit};
use crate::error::Result;
use crate::inference::{ols_refit, scaled_slope_with, ScaledSlopeConfig};
use crate::lambda::{inv_norm_cdf, SequenceKind, SequenceSpec};
use crate::linalg::mul_sparse;
use crate::rng::{pair_index, standard_normal, stream, Purpose};
use crate::solver::{operator_norm_sq, solve_from, SlopeProblem};
use crate::sorted_l1::LambdaSequence;

pub(crate) struct Fit {
    pub beta: Vec<f64>,
    pub support: Vec<usize>,
    pub sigma_hat: Option<f64>,
    pub converged: bool,
}

/// SLOPE with `σ·λ` for a known σ, or scaled SLOPE.
pub(crate) fn fit_slope(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda_unit: &LambdaSequence,
    config: &SimConfig,
    lipschitz: f64,
) -> Result<Fit> {
    match config.sigma_mode {
        SigmaMode::Known { sigma } => {
            let problem =
                SlopeProblem::new(x, y, lambda_unit.scaled(sigma)?)?.with_lipschitz(lipschitz);
            let sol = solve_from(&problem, &config.solver, None)?;
            Ok(Fit {
                beta: sol.beta,
                support: sol.support,
                sigma_hat: None,
                converged: sol.converged,
            })
        }
        SigmaMode::Scaled => {
            let cfg = ScaledSlopeConfig {
                max_iters: config.scaled_max_iters,
                solver: config.solver.clone(),
            };
            let res = scaled_slope_with(x, y, lambda_unit, &cfg, Some(lipschitz))?;
            Ok(Fit {
                beta: res.beta,
                support: res.support,
                sigma_hat: Some(res.sigma_hat),
                converged: res.converged,
            })
        }
    }
}

/// `‖X(b − β)‖²`.
pub(crate) fn prediction_error(x: &DMatrix<f64>, b: &[f64], beta: &[f64]) -> f64 {
    let diff: Vec<f64> = b.iter().zip(beta).map(|(u, v)| u - v).collect();
    let mut out = DVector::zeros(x.nrows());
    mul_sparse(x, &diff, &mut out);
    out.norm_squared()
}

/// Least-squares coefficients on `support`, zero elsewhere; `None` when the
/// refit is not identifiable.
pub(crate) fn debiased(x: &DMatrix<f64>, y: &DVector<f64>, support: &[usize]) -> Option<Vec<f64>> {
    let (coef, _) = ols_refit(x, y, support).ok()?;
    let mut b = vec![0.0; x.ncols()];
    for (k, &j) in support.iter().enumerate() {
        b[j] = coef[k];
    }
    Some(b)
}

/// Fresh `N(0, 1/n)` design for every `(k, replicate)`. Methods: `slope`
/// (raw fit), `slope_ols` (least squares on the SLOPE support) and, with
/// `compare_lasso`, `lasso_bonf` (constant `σ·Φ⁻¹(1 − q/2p)`).
pub fn run_gaussian_design(config: &SimConfig) -> Result<SimReport> {
    config.validate(Scenario::GaussianDesign)?;
    let (n, p) = (config.n, config.p);
    let spec = SequenceSpec {
        p,
        n: Some(n),
        q: config.q,
        kind: config.sequence_kind.clone(),
    };
    let shared = match spec.kind {
        SequenceKind::MonteCarlo { .. } => None,
        _ => Some(spec.build(None, config.seed)?),
    };
    let sigma = config.sigma_mode.noise_sigma();
    let bonf = LambdaSequence::constant(p, inv_norm_cdf(1.0 - config.q / (2.0 * p as f64))?)?;
    let amplitude = config.magnitude() * signal_unit(p);
    let scale = 1.0 / (n as f64).sqrt();
    let name = Scenario::GaussianDesign.name();

    let mut records = Vec::new();
    for &k in &config.k_list {
        let per_rep = par_map(config.replicates, |rep| {
            let idx = pair_index(k as u64, rep as u64);
            let mut rng = stream(config.seed, Purpose::Design, idx);
            let x = DMatrix::from_fn(n, p, |_, _| scale * standard_normal(&mut rng));
            let (beta, mask) = place_signals(config.seed, k, rep, p, amplitude);
            let mut y = DVector::zeros(n);
            mul_sparse(&x, &beta, &mut y);
            let signal_sq = y.norm_squared();
            let mut rng = stream(config.seed, Purpose::Noise, idx);
            y += draw_noise(&mut rng, n, sigma, config.error_dist);

            let lambda = match &shared {
                Some(l) => l.clone(),
                None => spec.build(Some(&x), config.seed.wrapping_add(idx))?,
            };
            let lip = operator_norm_sq(&x);
            let fit = fit_slope(&x, &y, &lambda, config, lip)?;
            let mut out = Vec::with_capacity(3);
            let mut raw = SimRecord::from_selection(name, "slope", k, rep, &fit.support, &mask)
                .with_rel_mse(prediction_error(&x, &fit.beta, &beta), signal_sq);
            raw.sigma_hat = fit.sigma_hat;
            raw.converged = Some(fit.converged);
            let mut refit = raw.clone();
            refit.method = "slope_ols".into();
            refit.rel_mse = debiased(&x, &y, &fit.support).and_then(|b| {
                raw.clone()
                    .with_rel_mse(prediction_error(&x, &b, &beta), signal_sq)
                    .rel_mse
            });
            out.push(raw);
            out.push(refit);

            if config.compare_lasso {
                let problem = SlopeProblem::new(&x, &y, bonf.scaled(sigma)?)?.with_lipschitz(lip);
                let sol = solve_from(&problem, &config.solver, None)?;
                let mut lasso =
                    SimRecord::from_selection(name, "lasso_bonf", k, rep, &sol.support, &mask)
                        .with_rel_mse(prediction_error(&x, &sol.beta, &beta), signal_sq);
                lasso.converged = Some(sol.converged);
                out.push(lasso);
            }
            Ok(out)
        })?;
        records.extend(per_rep.into_iter().flatten());
    }
    Ok(SimReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_deterministic_and_sane() {
        let mut c = SimConfig::new(Scenario::GaussianDesign, 60, 80, vec![0, 3], 0.1, 3, 4);
        c.signal_magnitude = Some(5.0);
        c.compare_lasso = true;
        let a = run_gaussian_design(&c).unwrap();
        assert_eq!(a, run_gaussian_design(&c).unwrap());
        assert_eq!(a.records.len(), 2 * 3 * 3);
        assert!(a.aggregate("slope", 3).unwrap().mean_tpp > 0.6);
        assert!(a.records.iter().all(|r| r.converged != Some(false)));
        assert!(a.aggregate("lasso_bonf", 0).is_some());
    }

    #[test]
    fn scaled_mode_reports_sigma() {
        let mut c = SimConfig::new(Scenario::GaussianDesign, 80, 40, vec![2], 0.1, 2, 4);
        c.signal_magnitude = Some(4.0);
        c.sigma_mode = SigmaMode::Scaled;
        c.sequence_kind = SequenceKind::GaussianStar;
        let a = run_gaussian_design(&c).unwrap();
        let s = a.aggregate("slope", 2).unwrap().mean_sigma_hat.unwrap();
        assert!(s > 0.5 && s < 2.0, "{s}");
    }
}
