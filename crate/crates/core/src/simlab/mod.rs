//! Reproducible simulations measuring false discovery proportion, power and
//! prediction error of SLOPE and its comparators.
//!
//! Every random quantity is drawn from a stream keyed by the configured seed,
//! a [`Purpose`](crate::rng::Purpose) and the `(k, replicate)` pair, so a
//! report depends only on its configuration. Replicates run on
//! [`threads()`] worker threads and are collected in index order.

mod anova;
mod config;
mod gaussian;
mod gwas;
mod noise;
mod orthogonal;
mod report;

pub use anova::{
    equicorrelated_inv_sqrt, run_anova_study, run_anova_testing, AnovaConfig, AnovaStudy,
    Equicorrelated, VarianceMode,
};
pub use config::{ErrorDist, Scenario, SigmaMode, SimConfig};
pub use gaussian::run_gaussian_design;
pub use gwas::{genotype_design, run_gwas_sim, GenotypeDesign};
pub use noise::draw_noise;
pub use orthogonal::run_orthogonal_fdr;
pub use report::{Aggregate, SimRecord, SimReport, CSV_COLUMNS};

use crate::error::Result;

/// Environment variable overriding the worker-thread count.
pub const THREADS_ENV: &str = "SLOPE_THREADS";

/// Worker threads for replicate loops: `SLOPE_THREADS` when set to a positive
/// integer, otherwise the available parallelism.
pub fn threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f(0..count)` on up to [`threads()`] threads and returns the results
/// in index order. Fails with the error of the lowest failing index.
pub(crate) fn par_map<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    let workers = threads().min(count).max(1);
    if workers == 1 {
        return (0..count).map(&f).collect();
    }
    let mut slots: Vec<Option<Result<T>>> = (0..count).map(|_| None).collect();
    let chunk = count.div_ceil(workers);
    std::thread::scope(|s| {
        for (w, part) in slots.chunks_mut(chunk).enumerate() {
            let f = &f;
            s.spawn(move || {
                for (k, slot) in part.iter_mut().enumerate() {
                    *slot = Some(f(w * chunk + k));
                }
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.expect("every slot filled"))
        .collect()
}

/// Signal magnitude in units of `√(2 log p)`.
pub(crate) fn signal_unit(p: usize) -> f64 {
    (2.0 * (p as f64).ln()).sqrt()
}
