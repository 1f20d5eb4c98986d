use nalgebra::DVector;
use rand::seq::index;
use rand::Rng;

use super::config::ErrorDist;
use crate::rng::{laplace, standard_normal};

/// `n` error terms with standard deviation `sigma` from `dist`.
pub fn draw_noise<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    sigma: f64,
    dist: ErrorDist,
) -> DVector<f64> {
    match dist {
        ErrorDist::Gaussian => DVector::from_fn(n, |_, _| sigma * standard_normal(rng)),
        ErrorDist::LaplaceUnitVar => DVector::from_fn(n, |_, _| {
            sigma * laplace(rng, std::f64::consts::FRAC_1_SQRT_2)
        }),
        ErrorDist::Contaminated { frac, scale } => {
            let mut z = DVector::from_fn(n, |_, _| sigma * standard_normal(rng));
            let m = ((frac * n as f64).round() as usize).min(n);
            for i in index::sample(rng, n, m) {
                z[i] = scale * sigma * standard_normal(rng);
            }
            z
        }
    }
}
