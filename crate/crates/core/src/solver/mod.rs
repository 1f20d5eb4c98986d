//! Minimization of `½‖y − Xb‖² + Jλ(b)` by proximal gradient methods.

mod dual;
mod iterate;
mod norm;

pub use dual::{duality_gap, fixed_point_residual};
pub use iterate::{solve, solve_fista, solve_from, solve_proximal_gradient};
pub use norm::operator_norm_sq;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Result, SlopeError};
use crate::sorted_l1::{sorted_l1_norm_unchecked, LambdaSequence};

/// A SLOPE instance: design `X` (n×p), response `y` (n) and weights λ (p).
///
/// `X` and `y` are borrowed so the same design can back many problems.
#[derive(Debug, Clone)]
pub struct SlopeProblem<'a> {
    x: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    lambda: LambdaSequence,
    lipschitz: Option<f64>,
}

impl<'a> SlopeProblem<'a> {
    pub fn new(x: &'a DMatrix<f64>, y: &'a DVector<f64>, lambda: LambdaSequence) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(SlopeError::InvalidArgument(
                "design matrix must have n ≥ 1 rows and p ≥ 1 columns".into(),
            ));
        }
        check_len("y", x.nrows(), y.len())?;
        check_len("lambda", x.ncols(), lambda.len())?;
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(SlopeError::NonFinite {
                what: "X",
                index: k,
            });
        }
        if let Some(k) = y.iter().position(|v| !v.is_finite()) {
            return Err(SlopeError::NonFinite {
                what: "y",
                index: k,
            });
        }
        Ok(Self {
            x,
            y,
            lambda,
            lipschitz: None,
        })
    }

    /// Supplies a precomputed `‖X‖²`, skipping the power iteration.
    pub fn with_lipschitz(mut self, norm_sq: f64) -> Self {
        self.lipschitz = Some(norm_sq);
        self
    }

    pub fn x(&self) -> &DMatrix<f64> {
        self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        self.y
    }

    pub fn lambda(&self) -> &LambdaSequence {
        &self.lambda
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// `‖X‖²`, computed on demand unless supplied.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz.unwrap_or_else(|| operator_norm_sq(self.x))
    }

    /// `½‖y − Xb‖² + Jλ(b)`.
    pub fn objective(&self, beta: &[f64]) -> Result<f64> {
        check_len("beta", self.p(), beta.len())?;
        let mut fit = DVector::zeros(self.n());
        crate::linalg::mul_sparse(self.x, beta, &mut fit);
        let rss = (self.y - fit).norm_squared();
        Ok(0.5 * rss + sorted_l1_norm_unchecked(beta, self.lambda.as_slice()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Constant step `t` with `0 < t < 2/‖X‖²`.
    Fixed(f64),
    /// Backtracking from `initial` (default `1/‖X‖²`), multiplying by `shrink`
    /// until the quadratic upper bound holds.
    Backtracking { shrink: f64, initial: Option<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceleration {
    Plain,
    Fista,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Threshold on the duality gap relative to the primal objective.
    pub tolerance: f64,
    pub step_rule: StepRule,
    pub acceleration: Acceleration,
    /// The gap of accelerated iterates costs an extra `Xᵀr`; it is evaluated
    /// every this many iterations (and at the last one). Plain proximal
    /// gradient gets it for free and checks every iteration.
    pub gap_check_interval: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 20_000,
            tolerance: 1e-7,
            step_rule: StepRule::Backtracking {
                shrink: 0.5,
                initial: None,
            },
            acceleration: Acceleration::Fista,
            gap_check_interval: 10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(SlopeError::InvalidArgument("max_iters must be ≥ 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(SlopeError::InvalidArgument(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        if self.gap_check_interval == 0 {
            return Err(SlopeError::InvalidArgument(
                "gap_check_interval must be ≥ 1".into(),
            ));
        }
        match self.step_rule {
            StepRule::Fixed(t) if !(t > 0.0 && t.is_finite()) => Err(SlopeError::InvalidArgument(
                format!("fixed step must be positive, got {t}"),
            )),
            StepRule::Backtracking { shrink, initial } => {
                if !(shrink > 0.0 && shrink < 1.0) {
                    return Err(SlopeError::InvalidArgument(format!(
                        "backtracking shrink factor must lie in (0, 1), got {shrink}"
                    )));
                }
                if let Some(t) = initial {
                    if !(t > 0.0 && t.is_finite()) {
                        return Err(SlopeError::InvalidArgument(format!(
                            "initial step must be positive, got {t}"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSolution {
    pub beta: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub dual_gap: f64,
    /// 0-based indices of the exactly nonzero coefficients, ascending.
    pub support: Vec<usize>,
}

pub(crate) fn support_of(beta: &[f64]) -> Vec<usize> {
    beta.iter()
        .enumerate()
        .filter(|(_, &b)| b != 0.0)
        .map(|(i, _)| i)
        .collect()
}
