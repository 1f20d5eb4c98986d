use nalgebra::DVector;

use crate::error::{check_len, Result, SlopeError};
use crate::linalg::{mul_sparse, tr_mul};
use crate::sorted_l1::{sorted_l1_norm_unchecked, ProxWorkspace};

use super::dual::primal_and_gap;
use super::{support_of, Acceleration, SlopeProblem, SlopeSolution, SolverConfig, StepRule};

/// Smallest step tried before backtracking gives up.
const MIN_STEP: f64 = 1e-300;

/// Solves from `b0 = 0` with the acceleration chosen in `config`.
pub fn solve(problem: &SlopeProblem<'_>, config: &SolverConfig) -> Result<SlopeSolution> {
    solve_from(problem, config, None)
}

/// Proximal gradient iterations `b ← prox_{tJλ}(b − t·Xᵀ(Xb − y))`.
pub fn solve_proximal_gradient(
    problem: &SlopeProblem<'_>,
    config: &SolverConfig,
) -> Result<SlopeSolution> {
    let config = SolverConfig {
        acceleration: Acceleration::Plain,
        ..config.clone()
    };
    solve_from(problem, &config, None)
}

/// Accelerated proximal gradient (FISTA) with `θ0 = 1`.
pub fn solve_fista(problem: &SlopeProblem<'_>, config: &SolverConfig) -> Result<SlopeSolution> {
    let config = SolverConfig {
        acceleration: Acceleration::Fista,
        ..config.clone()
    };
    solve_from(problem, &config, None)
}

/// Solves starting from `warm_start` (or zero).
pub fn solve_from(
    problem: &SlopeProblem<'_>,
    config: &SolverConfig,
    warm_start: Option<&[f64]>,
) -> Result<SlopeSolution> {
    config.validate()?;
    let (n, p) = (problem.n(), problem.p());
    let x = problem.x();
    let y = problem.y();
    let lambda = problem.lambda();

    let (mut step, shrink) = match config.step_rule {
        StepRule::Fixed(t) => {
            let lip = problem.lipschitz();
            if lip > 0.0 && t >= 2.0 / lip {
                return Err(SlopeError::InvalidArgument(format!(
                    "fixed step {t} must be below 2/‖X‖² = {}",
                    2.0 / lip
                )));
            }
            (t, None)
        }
        StepRule::Backtracking { shrink, initial } => {
            let t = initial.unwrap_or_else(|| {
                let lip = problem.lipschitz();
                if lip > 0.0 {
                    1.0 / lip
                } else {
                    1.0
                }
            });
            (t, Some(shrink))
        }
    };
    let accelerated = config.acceleration == Acceleration::Fista;

    let mut b = match warm_start {
        Some(b0) => {
            check_len("warm start", p, b0.len())?;
            b0.to_vec()
        }
        None => vec![0.0; p],
    };
    let mut xb = DVector::zeros(n);
    mul_sparse(x, &b, &mut xb);
    let mut a = b.clone();
    let mut xa = xb.clone();
    let mut theta = 1.0f64;

    let mut ws = ProxWorkspace::with_capacity(p);
    let mut grad = vec![0.0; p];
    let mut point = vec![0.0; p];
    let mut b_next = vec![0.0; p];
    let mut xb_next = DVector::zeros(n);
    let mut resid = DVector::zeros(n);
    let mut corr = vec![0.0; p];
    // For plain iterations `Xᵀ(y − Xb)` from the last gap check is the next
    // gradient (negated).
    let mut corr_is_current = false;

    let mut gap = f64::INFINITY;
    let mut objective = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=config.max_iters {
        iterations = k;
        // gradient of ½‖Xa − y‖² at a
        resid.copy_from(y);
        resid -= &xa;
        if !accelerated && corr_is_current {
            for (g, c) in grad.iter_mut().zip(&corr) {
                *g = -c;
            }
        } else {
            tr_mul(x, &resid, &mut grad);
            grad.iter_mut().for_each(|g| *g = -*g);
        }
        let f_a = 0.5 * resid.norm_squared();

        loop {
            for ((pt, ai), gi) in point.iter_mut().zip(&a).zip(&grad) {
                *pt = ai - step * gi;
            }
            ws.prox_into(&point, lambda, step, &mut b_next)
                .map_err(|e| SlopeError::NumericalFailure {
                    iteration: k,
                    reason: e.to_string(),
                })?;
            mul_sparse(x, &b_next, &mut xb_next);
            let Some(shrink) = shrink else { break };

            let f_next = 0.5 * (y - &xb_next).norm_squared();
            let mut lin = 0.0;
            let mut dist_sq = 0.0;
            for ((bn, ai), gi) in b_next.iter().zip(&a).zip(&grad) {
                let d = bn - ai;
                lin += gi * d;
                dist_sq += d * d;
            }
            let bound = f_a + lin + dist_sq / (2.0 * step);
            if f_next <= bound + 1e-12 * f_a.abs().max(1e-300) {
                break;
            }
            step *= shrink;
            if step < MIN_STEP {
                return Err(SlopeError::NumericalFailure {
                    iteration: k,
                    reason: "backtracking step underflow".into(),
                });
            }
        }

        if accelerated {
            let theta_next = 2.0 / (1.0 + (1.0 + 4.0 / (theta * theta)).sqrt());
            let momentum = theta_next * (1.0 / theta - 1.0);
            for ((ai, bn), bo) in a.iter_mut().zip(&b_next).zip(&b) {
                *ai = bn + momentum * (bn - bo);
            }
            xa.copy_from(&xb_next);
            xa.axpy(momentum, &xb_next, 1.0);
            xa.axpy(-momentum, &xb, 1.0);
            theta = theta_next;
        } else {
            a.copy_from_slice(&b_next);
            xa.copy_from(&xb_next);
        }
        std::mem::swap(&mut b, &mut b_next);
        std::mem::swap(&mut xb, &mut xb_next);
        corr_is_current = false;

        if !accelerated || k % config.gap_check_interval == 0 || k == config.max_iters {
            resid.copy_from(y);
            resid -= &xb;
            tr_mul(x, &resid, &mut corr);
            corr_is_current = true;
            let penalty = sorted_l1_norm_unchecked(&b, lambda.as_slice());
            let (primal, g) = primal_and_gap(y, &resid, &corr, penalty, lambda.as_slice());
            if !primal.is_finite() {
                return Err(SlopeError::NumericalFailure {
                    iteration: k,
                    reason: format!("objective became {primal}"),
                });
            }
            objective = primal;
            gap = g;
            if gap <= config.tolerance * primal.max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
    }

    Ok(SlopeSolution {
        support: support_of(&b),
        objective,
        iterations,
        converged,
        dual_gap: gap,
        beta: b,
    })
}
