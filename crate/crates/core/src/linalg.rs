//! Dense linear-algebra helpers shared by the solvers and simulations.
//!
//! Matrix-vector products are sequential with a fixed reduction order
//! (column by column, rows ascending), so results are bitwise reproducible
//! for a given build.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SlopeError};

/// `out = X·b`, skipping zero coefficients.
pub fn mul_sparse(x: &DMatrix<f64>, b: &[f64], out: &mut DVector<f64>) {
    out.fill(0.0);
    for (j, &bj) in b.iter().enumerate() {
        if bj != 0.0 {
            out.axpy(bj, &x.column(j), 1.0);
        }
    }
}

/// `out = Xᵀ·r`.
pub fn tr_mul(x: &DMatrix<f64>, r: &DVector<f64>, out: &mut [f64]) {
    for (j, o) in out.iter_mut().enumerate() {
        *o = x.column(j).dot(r);
    }
}

/// Column means and ℓ2 norms after centering, as applied by [`standardize_columns`].
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnScaling {
    pub means: Vec<f64>,
    pub norms: Vec<f64>,
}

/// Centers every column and scales it to unit ℓ2 norm, in place.
pub fn standardize_columns(x: &mut DMatrix<f64>) -> Result<ColumnScaling> {
    let n = x.nrows() as f64;
    let mut means = Vec::with_capacity(x.ncols());
    let mut norms = Vec::with_capacity(x.ncols());
    for (j, mut col) in x.column_iter_mut().enumerate() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
        let norm = col.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(SlopeError::Degenerate(format!(
                "column {} is constant and cannot be standardized",
                j + 1
            )));
        }
        col /= norm;
        means.push(mean);
        norms.push(norm);
    }
    Ok(ColumnScaling { means, norms })
}

/// Subtracts the mean in place and returns it.
pub fn center(y: &mut DVector<f64>) -> f64 {
    let mean = if y.is_empty() { 0.0 } else { y.mean() };
    y.add_scalar_mut(-mean);
    mean
}

/// Sample standard deviation with `n − 1` in the denominator.
pub fn sample_std(y: &[f64]) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Submatrix made of the listed columns, in the listed order.
pub fn select_columns(x: &DMatrix<f64>, columns: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(x.nrows(), columns.len(), |i, k| x[(i, columns[k])])
}

/// Least-squares solution through a Householder QR factorization.
///
/// Columns whose diagonal entry in `R` falls below `rel_tol · max |R_kk|` are
/// reported as linearly dependent on the preceding ones.
pub(crate) fn qr_least_squares(
    a: DMatrix<f64>,
    rhs: &DVector<f64>,
    rel_tol: f64,
) -> std::result::Result<DVector<f64>, Vec<usize>> {
    let k = a.ncols();
    if k == 0 {
        return Ok(DVector::zeros(0));
    }
    let qr = a.qr();
    let r = qr.r();
    let diag_max = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let dependent: Vec<usize> = (0..k)
        .filter(|&i| r[(i, i)].abs() <= rel_tol * diag_max || diag_max == 0.0)
        .collect();
    if !dependent.is_empty() {
        return Err(dependent);
    }
    let qty = qr.q().tr_mul(rhs);
    let coef = r
        .solve_upper_triangular(&qty)
        .expect("nonzero diagonal checked above");
    Ok(coef)
}
