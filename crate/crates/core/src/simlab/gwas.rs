use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::config::{Scenario, SimConfig};
use super::gaussian::{debiased, fit_slope, prediction_error};
use super::noise::draw_noise;
use super::orthogonal::place_signals;
use super::report::{SimRecord, SimReport};
use super::{par_map, signal_unit};
use crate::error::Result;
use crate::inference::bh_step_up;
use crate::lambda::SequenceSpec;
use crate::linalg::{center, mul_sparse, standardize_columns};
use crate::rng::{pair_index, standard_normal, stream, Purpose};
use crate::solver::operator_norm_sq;
use crate::sorted_l1::LambdaSequence;

/// Standardized genotype matrix with its allele frequencies.
#[derive(Debug, Clone)]
pub struct GenotypeDesign {
    /// Additive coding `−1/0/1` for `aa/aA/AA`, centered with unit-norm columns.
    pub x: DMatrix<f64>,
    /// Dominance coding `−1` for homozygotes, `1` for heterozygotes, centered
    /// with unit-norm columns; a column with no variation is left at zero.
    pub z: Option<DMatrix<f64>>,
    pub maf: Vec<f64>,
}

/// Hardy–Weinberg genotypes for `n` individuals at `p` SNPs whose minor
/// allele frequency is uniform on (0.1, 0.5). SNPs that come out monomorphic
/// are redrawn.
pub fn genotype_design(
    n: usize,
    p: usize,
    seed: u64,
    index: u64,
    dominant: bool,
) -> Result<GenotypeDesign> {
    let mut rng = stream(seed, Purpose::Genotype, index);
    let mut raw = DMatrix::zeros(n, p);
    let mut maf = Vec::with_capacity(p);
    for j in 0..p {
        loop {
            let f: f64 = rng.random_range(0.1..0.5);
            for i in 0..n {
                let minor = (rng.random::<f64>() < f) as i32 + (rng.random::<f64>() < f) as i32;
                raw[(i, j)] = (1 - minor) as f64;
            }
            let first = raw[(0, j)];
            if n < 2 || raw.column(j).iter().any(|&v| v != first) {
                maf.push(f);
                break;
            }
        }
    }
    let z = dominant.then(|| {
        let mut z = raw.map(|v| if v == 0.0 { 1.0 } else { -1.0 });
        for mut col in z.column_iter_mut() {
            let mean = col.mean();
            col.add_scalar_mut(-mean);
            let norm = col.norm();
            if norm > 1e-12 {
                col /= norm;
            } else {
                col.fill(0.0);
            }
        }
        z
    });
    let mut x = raw;
    standardize_columns(&mut x)?;
    Ok(GenotypeDesign { x, z, maf })
}

/// Single-marker t statistics of centered `y` on unit-norm centered columns.
fn marginal_t(x: &DMatrix<f64>, y: &DVector<f64>) -> Vec<f64> {
    let n = x.nrows() as f64;
    let tss = y.norm_squared();
    x.column_iter()
        .map(|col| {
            let b = col.dot(y);
            let rss = (tss - b * b).max(0.0);
            let s = (rss / (n - 2.0)).sqrt();
            if s > 0.0 {
                b / s
            } else {
                0.0
            }
        })
        .collect()
}

struct Prepared {
    design: GenotypeDesign,
    lambda: LambdaSequence,
    lipschitz: f64,
}

fn prepare(config: &SimConfig, spec: &SequenceSpec, index: u64) -> Result<Prepared> {
    let design = genotype_design(
        config.n,
        config.p,
        config.seed,
        index,
        config.dominant_effects,
    )?;
    let lambda = spec.build(Some(&design.x), config.seed.wrapping_add(index))?;
    let lipschitz = operator_norm_sq(&design.x);
    Ok(Prepared {
        design,
        lambda,
        lipschitz,
    })
}

/// Idealized association study: `y = Xβ (+ Zγ) + z`, fitted by SLOPE on the
/// additive coding (method `slope`) and by BH on single-marker t tests
/// (method `bh_marginal`). The genotype matrix is shared across the run
/// unless `fresh_design` is set. Dominance effects, when enabled, are
/// `N(0, (2√(2 log p))²)` on the causal SNPs.
pub fn run_gwas_sim(config: &SimConfig) -> Result<SimReport> {
    config.validate(Scenario::Gwas)?;
    let (n, p) = (config.n, config.p);
    let spec = SequenceSpec {
        p,
        n: Some(n),
        q: config.q,
        kind: config.sequence_kind.clone(),
    };
    let shared = if config.fresh_design {
        None
    } else {
        Some(prepare(config, &spec, 0)?)
    };
    let sigma = config.sigma_mode.noise_sigma();
    let amplitude = config.magnitude() * signal_unit(p);
    let dominant_sd = 2.0 * signal_unit(p);
    let name = Scenario::Gwas.name();

    let mut records = Vec::new();
    for &k in &config.k_list {
        let per_rep = par_map(config.replicates, |rep| {
            let idx = pair_index(k as u64, rep as u64);
            let fresh;
            let prep = match &shared {
                Some(s) => s,
                None => {
                    fresh = prepare(config, &spec, pair_index(k as u64, rep as u64 + 1))?;
                    &fresh
                }
            };
            let x = &prep.design.x;
            let (beta, mask) = place_signals(config.seed, k, rep, p, amplitude);
            let mut mu = DVector::zeros(n);
            mul_sparse(x, &beta, &mut mu);
            let signal_sq = mu.norm_squared();
            let mut y = mu;
            if let Some(z) = &prep.design.z {
                let mut rng = stream(config.seed, Purpose::DominantEffects, idx);
                let gamma: Vec<f64> = mask
                    .iter()
                    .map(|&m| {
                        if m {
                            dominant_sd * standard_normal(&mut rng)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                let mut extra = DVector::zeros(n);
                mul_sparse(z, &gamma, &mut extra);
                y += extra;
            }
            let mut rng = stream(config.seed, Purpose::Noise, idx);
            y += draw_noise(&mut rng, n, sigma, config.error_dist);
            center(&mut y);

            let fit = fit_slope(x, &y, &prep.lambda, config, prep.lipschitz)?;
            let mut slope = SimRecord::from_selection(name, "slope", k, rep, &fit.support, &mask)
                .with_rel_mse(prediction_error(x, &fit.beta, &beta), signal_sq);
            slope.sigma_hat = fit.sigma_hat;
            slope.converged = Some(fit.converged);
            let mut refit = slope.clone();
            refit.method = "slope_ols".into();
            refit.rel_mse = debiased(x, &y, &fit.support).and_then(|b| {
                slope
                    .clone()
                    .with_rel_mse(prediction_error(x, &b, &beta), signal_sq)
                    .rel_mse
            });

            let bh = bh_step_up(&marginal_t(x, &y), 1.0, config.q)?;
            let marginal =
                SimRecord::from_selection(name, "bh_marginal", k, rep, &bh.rejected, &mask);
            Ok([slope, refit, marginal])
        })?;
        records.extend(per_rep.into_iter().flatten());
    }
    Ok(SimReport::from_records(records))
}
