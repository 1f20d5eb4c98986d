//! Exact proximal mapping of the sorted-ℓ1 norm.
//!
//! After normalizing the input (absolute values, sorted nonincreasing) the
//! prox reduces to a monotone least-squares problem on `|y| − λ` with a
//! nonnegativity clamp. It is solved with a stack of blocks: each new entry is
//! pushed as its own block and merged with its predecessor while the
//! predecessor's clamped level does not exceed its own. Every entry creates
//! one block and every block is merged away at most once, so the pass is
//! linear in `p`.

use crate::error::{check_finite, check_len, Result, SlopeError};

use super::LambdaSequence;

#[derive(Debug, Clone, Copy)]
struct Block {
    start: usize,
    end: usize,
    /// Unclamped running sum of `y − λ` over the block.
    sum: f64,
    /// Clamped block average `(sum / len)+`.
    level: f64,
}

/// Reusable buffers for repeated prox evaluations of the same dimension.
///
/// A workspace is meant for one thread at a time; keep one per solver.
#[derive(Debug, Default, Clone)]
pub struct ProxWorkspace {
    blocks: Vec<Block>,
    order: Vec<usize>,
    sorted: Vec<f64>,
    sorted_out: Vec<f64>,
    merges: usize,
}

impl ProxWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(p: usize) -> Self {
        Self {
            blocks: Vec::with_capacity(p),
            order: Vec::with_capacity(p),
            sorted: Vec::with_capacity(p),
            sorted_out: Vec::with_capacity(p),
            merges: 0,
        }
    }

    /// Number of block merges performed by the most recent call.
    pub fn last_merge_count(&self) -> usize {
        self.merges
    }

    /// Computes `prox_{scale·J_λ}(y)` into `out` for arbitrary signs and ordering.
    pub fn prox_into(
        &mut self,
        y: &[f64],
        lambda: &LambdaSequence,
        scale: f64,
        out: &mut [f64],
    ) -> Result<()> {
        let p = lambda.len();
        check_len("y", p, y.len())?;
        check_len("output", p, out.len())?;
        check_finite("y", y)?;
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(SlopeError::InvalidArgument(format!(
                "prox scale must be finite and nonnegative, got {scale}"
            )));
        }

        self.order.clear();
        self.order.extend(0..p);
        // Stable sort: ties keep input order, so the output is deterministic.
        self.order
            .sort_by(|&a, &b| y[b].abs().total_cmp(&y[a].abs()));

        let mut sorted = std::mem::take(&mut self.sorted);
        let mut sorted_out = std::mem::take(&mut self.sorted_out);
        sorted.clear();
        sorted.extend(self.order.iter().map(|&i| y[i].abs()));
        sorted_out.clear();
        sorted_out.resize(p, 0.0);

        self.prox_sorted_unchecked(&sorted, lambda.as_slice(), scale, &mut sorted_out);

        for (rank, &i) in self.order.iter().enumerate() {
            let v = sorted_out[rank];
            out[i] = if v == 0.0 {
                0.0
            } else if y[i] > 0.0 {
                v
            } else {
                -v
            };
        }
        self.sorted = sorted;
        self.sorted_out = sorted_out;
        Ok(())
    }

    /// Stack pass on already normalized input (`y` nonincreasing, nonnegative).
    ///
    /// The precondition is only checked in debug builds.
    pub fn prox_sorted_unchecked(
        &mut self,
        y: &[f64],
        lambda: &[f64],
        scale: f64,
        out: &mut [f64],
    ) {
        debug_assert!(y.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(y.last().is_none_or(|&v| v >= 0.0));
        debug_assert_eq!(y.len(), lambda.len());

        self.blocks.clear();
        self.merges = 0;
        for k in 0..y.len() {
            let sum = y[k] - scale * lambda[k];
            self.blocks.push(Block {
                start: k,
                end: k,
                sum,
                level: sum.max(0.0),
            });
            while self.blocks.len() > 1 {
                let top = self.blocks[self.blocks.len() - 1];
                let prev = self.blocks.len() - 2;
                if self.blocks[prev].level > top.level {
                    break;
                }
                self.blocks.pop();
                let prev = &mut self.blocks[prev];
                prev.end = top.end;
                prev.sum += top.sum;
                prev.level = (prev.sum / (prev.end - prev.start + 1) as f64).max(0.0);
                self.merges += 1;
            }
        }
        debug_assert!(self.merges <= y.len());
        for b in &self.blocks {
            out[b.start..=b.end].fill(b.level);
        }
    }
}

/// Unique minimizer of `½‖y − x‖² + Σ λi |x|(i)`.
pub fn prox_sorted_l1(y: &[f64], lambda: &LambdaSequence) -> Result<Vec<f64>> {
    let mut out = vec![0.0; y.len()];
    ProxWorkspace::with_capacity(y.len()).prox_into(y, lambda, 1.0, &mut out)?;
    Ok(out)
}

/// Prox for input already satisfying `y1 ≥ … ≥ yp ≥ 0`; the output is
/// nonincreasing and nonnegative.
pub fn prox_sorted_l1_sorted_nonneg(y: &[f64], lambda: &LambdaSequence) -> Result<Vec<f64>> {
    check_len("y", lambda.len(), y.len())?;
    check_finite("y", y)?;
    if let Some(i) = y.windows(2).position(|w| w[0] < w[1]) {
        return Err(SlopeError::InvalidArgument(format!(
            "y is not nonincreasing at index {i}"
        )));
    }
    if let Some(i) = y.iter().position(|&v| v < 0.0) {
        return Err(SlopeError::InvalidArgument(format!("y[{i}] is negative")));
    }
    let mut out = vec![0.0; y.len()];
    ProxWorkspace::with_capacity(y.len()).prox_sorted_unchecked(
        y,
        lambda.as_slice(),
        1.0,
        &mut out,
    );
    Ok(out)
}
