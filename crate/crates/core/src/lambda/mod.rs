//! Regularization sequences calibrated for false discovery rate control.

mod io;
mod monte_carlo;
mod normal;
mod sequences;

pub use io::{format_f64, read_lambda_csv, write_lambda_csv, LAMBDA_HEADER};
pub use monte_carlo::{
    default_grid, lambda_monte_carlo, MonteCarloEstimate, MonteCarloSequence, MAX_SINGULAR_RETRIES,
    RCOND_THRESHOLD,
};
pub use normal::{erf, erfc, inv_norm_cdf, norm_cdf, norm_pdf, norm_sf};
pub use sequences::{lambda_bh, lambda_gaussian, lambda_oscar, GaussianSequence};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlopeError};
use crate::sorted_l1::LambdaSequence;

/// Which sequence to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    Bh,
    GaussianStar,
    MonteCarlo {
        draws: usize,
        /// Number of log-spaced grid points (default 40).
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    Oscar {
        l1: f64,
        l2: f64,
    },
}

fn default_grid_points() -> usize {
    40
}

/// Everything needed to build a σ = 1 sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub p: usize,
    /// Sample size, required for the Gaussian and Monte Carlo kinds.
    pub n: Option<usize>,
    pub q: f64,
    pub kind: SequenceKind,
}

impl SequenceSpec {
    /// Builds the sequence; the Monte Carlo kind needs the design and uses `seed`.
    pub fn build(&self, design: Option<&DMatrix<f64>>, seed: u64) -> Result<LambdaSequence> {
        match &self.kind {
            SequenceKind::Bh => lambda_bh(self.p, self.q),
            SequenceKind::GaussianStar => {
                let n = self.require_n()?;
                Ok(lambda_gaussian(self.p, n, self.q)?.sequence)
            }
            SequenceKind::MonteCarlo { draws, grid_points } => {
                let x = design.ok_or_else(|| {
                    SlopeError::InvalidArgument(
                        "the Monte Carlo sequence requires a design matrix".into(),
                    )
                })?;
                let grid = default_grid(x.ncols(), x.nrows(), *grid_points);
                Ok(lambda_monte_carlo(x, self.q, *draws, &grid, seed)?.sequence)
            }
            SequenceKind::Oscar { l1, l2 } => lambda_oscar(self.p, *l1, *l2),
        }
    }

    fn require_n(&self) -> Result<usize> {
        self.n.ok_or_else(|| {
            SlopeError::InvalidArgument("sample size n is required for this sequence".into())
        })
    }
}
