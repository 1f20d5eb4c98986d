use crate::error::{check_finite, Result};

/// Least-squares fit of `y` under the constraint `x1 ≥ x2 ≥ … ≥ xp`
/// (pool adjacent violators). No nonnegativity clamp is applied.
pub fn isotonic_regression(y: &[f64]) -> Result<Vec<f64>> {
    check_finite("y", y)?;
    // (start, len, sum)
    let mut blocks: Vec<(usize, usize, f64)> = Vec::with_capacity(y.len());
    for (k, &v) in y.iter().enumerate() {
        blocks.push((k, 1, v));
        while blocks.len() > 1 {
            let (_, len_top, sum_top) = blocks[blocks.len() - 1];
            let (_, len_prev, sum_prev) = blocks[blocks.len() - 2];
            if sum_prev / len_prev as f64 > sum_top / len_top as f64 {
                break;
            }
            blocks.pop();
            let prev = blocks.last_mut().expect("at least one block");
            prev.1 += len_top;
            prev.2 += sum_top;
        }
    }
    let mut out = vec![0.0; y.len()];
    for (start, len, sum) in blocks {
        out[start..start + len].fill(sum / len as f64);
    }
    Ok(out)
}
