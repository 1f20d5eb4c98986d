//! Regularization sequence with a Monte Carlo estimate of the shrinkage
//! correction, for designs that are not i.i.d. Gaussian.
//!
//! At grid index `i` the correction is the mean over random draws of
//! `(X_jᵀ X_S (X_SᵀX_S)⁻¹ λ_{1:i−1})²` with `|S| = i − 1` and `j ∉ S`, and
//! `λMC(i) = λBH(i)·√(1 + correction)`. Between grid points the sequence is
//! interpolated linearly. Estimation stops at the first grid point where the
//! sequence rises; everything after the previous grid point is held flat.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlopeError};
use crate::linalg::standardize_columns;
use crate::rng::{self, Purpose};
use crate::sorted_l1::LambdaSequence;

use super::sequences::{bh_value, check_level};

/// Consecutive singular draws tolerated before giving up.
pub const MAX_SINGULAR_RETRIES: usize = 100;
/// Draws whose Gram matrix has a reciprocal condition estimate below this
/// are treated as singular and redrawn.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    /// 1-based sequence index.
    pub index: usize,
    pub correction: f64,
    /// Standard error of the mean over draws.
    pub std_error: f64,
    pub draws: usize,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSequence {
    pub sequence: LambdaSequence,
    /// One entry per grid point actually evaluated.
    pub estimates: Vec<MonteCarloEstimate>,
    /// 1-based index after which the sequence is flat.
    pub truncated_at: usize,
}

/// `count` logarithmically spaced indices from 1 to `min(p, n/2)`, deduplicated.
pub fn default_grid(p: usize, n: usize, count: usize) -> Vec<usize> {
    let top = p.min(n / 2).max(1);
    let count = count.max(1);
    let mut grid: Vec<usize> = (0..count)
        .map(|k| {
            if count == 1 {
                1
            } else {
                let t = k as f64 / (count - 1) as f64;
                ((top as f64).powf(t)).round() as usize
            }
        })
        .collect();
    grid.push(1);
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// Monte Carlo corrected sequence for the design `x`.
///
/// The design is standardized internally (zero-mean, unit-norm columns).
/// `grid` holds sorted 1-based indices starting at 1. Draws for grid index
/// `i` use the random stream `(seed, i, draw)`.
pub fn lambda_monte_carlo(
    x: &DMatrix<f64>,
    q: f64,
    draws: usize,
    grid: &[usize],
    seed: u64,
) -> Result<MonteCarloSequence> {
    check_level(q)?;
    let (n, p) = (x.nrows(), x.ncols());
    if p == 0 || n < 2 {
        return Err(SlopeError::InvalidArgument(
            "Monte Carlo sequence needs n ≥ 2 and p ≥ 1".into(),
        ));
    }
    if draws == 0 {
        return Err(SlopeError::InvalidArgument("draws must be ≥ 1".into()));
    }
    if grid.first() != Some(&1) {
        return Err(SlopeError::InvalidArgument(
            "grid must start at index 1".into(),
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|&g| g > p) {
        return Err(SlopeError::InvalidArgument(format!(
            "grid must be strictly increasing within 1..={p}"
        )));
    }
    let mut xs = x.clone();
    standardize_columns(&mut xs)?;

    let bh: Vec<f64> = (1..=p).map(|i| bh_value(i, p, q)).collect::<Result<_>>()?;
    let mut lambda = vec![0.0; p];
    lambda[0] = bh[0];
    let mut estimates = vec![MonteCarloEstimate {
        index: 1,
        correction: 0.0,
        std_error: 0.0,
        draws: 0,
        lambda: bh[0],
    }];
    let mut truncated_at = 1;
    let mut last_correction = 0.0f64;

    for &g in &grid[1..] {
        let prev = estimates.last().expect("grid starts at 1").clone();
        // provisional values between grid points carry the last correction
        for i in prev.index + 1..g {
            lambda[i - 1] = bh[i - 1] * (1.0 + last_correction).sqrt();
        }
        if g > n {
            break;
        }
        let (correction, std_error) = estimate_correction(&xs, &lambda[..g - 1], draws, g, seed)?;
        let value = bh[g - 1] * (1.0 + correction).sqrt();
        if value > prev.lambda {
            break;
        }
        // linear interpolation between the two grid values
        let span = (g - prev.index) as f64;
        for i in prev.index + 1..g {
            let t = (i - prev.index) as f64 / span;
            lambda[i - 1] = prev.lambda + t * (value - prev.lambda);
        }
        lambda[g - 1] = value;
        last_correction = correction;
        truncated_at = g;
        estimates.push(MonteCarloEstimate {
            index: g,
            correction,
            std_error,
            draws,
            lambda: value,
        });
    }

    let flat = lambda[truncated_at - 1];
    lambda[truncated_at..].fill(flat);
    Ok(MonteCarloSequence {
        sequence: LambdaSequence::new(lambda)?,
        estimates,
        truncated_at,
    })
}

/// Mean and standard error of `(X_jᵀ X_S (X_SᵀX_S)⁻¹ λ_S)²` over random `(S, j)`.
fn estimate_correction(
    x: &DMatrix<f64>,
    lambda_s: &[f64],
    draws: usize,
    grid_index: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let (n, p) = (x.nrows(), x.ncols());
    let s = lambda_s.len();
    let lam = DVector::from_column_slice(lambda_s);
    let mut values = Vec::with_capacity(draws);

    for d in 0..draws {
        let mut rng = rng::stream(
            seed,
            Purpose::MonteCarloDraw,
            rng::pair_index(grid_index as u64, d as u64),
        );
        let mut failures = 0;
        let value = loop {
            let picked = index::sample(&mut rng, p, s + 1).into_vec();
            let (cols, j) = picked.split_at(s);
            let xs = DMatrix::from_fn(n, s, |r, k| x[(r, cols[k])]);
            let gram = xs.tr_mul(&xs);
            let cross = xs.tr_mul(&x.column(j[0]));
            match Cholesky::new(gram) {
                Some(chol) if rcond_estimate(chol.l_dirty(), s) >= RCOND_THRESHOLD => {
                    let coef = chol.solve(&lam);
                    break cross.dot(&coef).powi(2);
                }
                _ => {
                    failures += 1;
                    if failures >= MAX_SINGULAR_RETRIES {
                        return Err(SlopeError::Construction {
                            index: grid_index,
                            reason: format!(
                                "{MAX_SINGULAR_RETRIES} consecutive draws of X_S were numerically singular"
                            ),
                        });
                    }
                }
            }
        };
        values.push(value);
    }
    let mean = values.iter().sum::<f64>() / draws as f64;
    let se = if draws > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        (var / draws as f64).sqrt()
    } else {
        0.0
    };
    Ok((mean, se))
}

/// Ratio of extreme squared Cholesky pivots, a cheap proxy for `1/cond(G)`.
fn rcond_estimate(l: &DMatrix<f64>, s: usize) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..s {
        let d = l[(i, i)].abs();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    if hi == 0.0 {
        0.0
    } else {
        (lo / hi).powi(2)
    }
}
