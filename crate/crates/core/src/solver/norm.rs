use nalgebra::{DMatrix, DVector};

use crate::rng::{self, Purpose};

const POWER_SEED: u64 = 0x5_10_9E;
const MAX_POWER_ITERS: usize = 20_000;

/// Largest squared singular value `‖X‖²` by power iteration on `XᵀX`.
///
/// The starting vector comes from a fixed-seed stream, so the estimate is
/// deterministic. Iteration stops once the Rayleigh quotient changes by less
/// than `1e-11` relative between steps. A zero matrix yields 0.
pub fn operator_norm_sq(x: &DMatrix<f64>) -> f64 {
    let p = x.ncols();
    if p == 0 || x.nrows() == 0 {
        return 0.0;
    }
    let mut g = rng::stream(POWER_SEED, Purpose::PowerIteration, 0);
    let mut v = DVector::from_fn(p, |_, _| rng::standard_normal(&mut g));
    v.normalize_mut();

    let mut estimate = 0.0;
    let mut xv = DVector::zeros(x.nrows());
    let mut w = DVector::zeros(p);
    for _ in 0..MAX_POWER_ITERS {
        xv.gemv(1.0, x, &v, 0.0);
        w.gemv_tr(1.0, x, &xv, 0.0);
        let rayleigh = xv.norm_squared();
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        v.copy_from(&w);
        v /= wn;
        let done = (rayleigh - estimate).abs() <= 1e-11 * rayleigh;
        estimate = rayleigh;
        if done {
            break;
        }
    }
    // Rayleigh quotient of the final (normalized) iterate.
    xv.gemv(1.0, x, &v, 0.0);
    xv.norm_squared().max(estimate)
}
