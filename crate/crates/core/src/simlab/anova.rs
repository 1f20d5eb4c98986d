use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::orthogonal::place_signals;
use super::report::{SimRecord, SimReport};
use super::{par_map, signal_unit};
use crate::error::{Result, SlopeError};
use crate::inference::bh_step_up;
use crate::lambda::lambda_bh;
use crate::linalg::{center, standardize_columns};
use crate::rng::{pair_index, standard_normal, stream, Purpose};
use crate::solver::{solve, SlopeProblem, SolverConfig};

/// The matrix `a·I + b·J` (J the all-ones matrix) of order `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equicorrelated {
    pub p: usize,
    pub a: f64,
    pub b: f64,
}

impl Equicorrelated {
    /// `Σ^{-1/2}` for `Σ = σ²I + ρ(J − I)`, through its two eigenvalues
    /// `σ² − ρ` (multiplicity `p − 1`) and `σ² + (p − 1)ρ`.
    pub fn inv_sqrt(p: usize, sigma2: f64, rho: f64) -> Result<Self> {
        if p == 0 {
            return Err(SlopeError::InvalidArgument("p must be ≥ 1".into()));
        }
        let small = sigma2 - rho;
        let large = sigma2 + (p as f64 - 1.0) * rho;
        if !(small > 0.0 && large > 0.0) || !small.is_finite() || !large.is_finite() {
            return Err(SlopeError::Domain(format!(
                "σ² = {sigma2}, ρ = {rho} do not give a positive definite matrix for p = {p}"
            )));
        }
        let a = small.powf(-0.5);
        let b = (large.powf(-0.5) - a) / p as f64;
        Ok(Self { p, a, b })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.a + self.b
        } else {
            self.b
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        let s = self.b * v.sum();
        v.map(|x| self.a * x + s)
    }

    /// Euclidean norm of each column.
    pub fn column_norm(&self) -> f64 {
        ((self.a + self.b).powi(2) + (self.p as f64 - 1.0) * self.b * self.b).sqrt()
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.p, self.p, |i, j| self.entry(i, j))
    }
}

/// Dense `Σ^{-1/2}` for the equicorrelated covariance; see [`Equicorrelated::inv_sqrt`].
pub fn equicorrelated_inv_sqrt(p: usize, sigma2: f64, rho: f64) -> Result<DMatrix<f64>> {
    Ok(Equicorrelated::inv_sqrt(p, sigma2, rho)?.to_matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VarianceMode {
    #[default]
    Known,
    /// Unweighted-means estimates from the ANOVA mean squares.
    Estimated,
}

/// Means of `p` treatments measured once in each of `labs` laboratories,
/// `y_ij = μ_i + τ_j + z_ij` with `τ_j ~ N(0, σ²_τ)` and `z_ij ~ N(0, σ²_z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnovaConfig {
    pub p: usize,
    pub labs: usize,
    pub sigma_tau2: f64,
    pub sigma_z2: f64,
    pub k: usize,
    #[serde(default)]
    pub variance_mode: VarianceMode,
    /// Nonzero means equal this multiple of `√(2 log p)/c`, `c` being the
    /// column norm of `Σ^{-1/2}`.
    #[serde(default = "unit")]
    pub signal_magnitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl AnovaConfig {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SlopeError::InvalidArgument(m));
        if self.p < 2 {
            return bad("p must be ≥ 2".into());
        }
        if self.labs < 2 {
            return bad("labs must be ≥ 2".into());
        }
        if !(self.sigma_tau2 >= 0.0 && self.sigma_z2 > 0.0)
            || !(self.sigma_tau2 + self.sigma_z2).is_finite()
        {
            return bad(format!(
                "variance components must satisfy σ²_τ ≥ 0, σ²_z > 0; got {}, {}",
                self.sigma_tau2, self.sigma_z2
            ));
        }
        if self.k > self.p {
            return bad(format!("k = {} exceeds p = {}", self.k, self.p));
        }
        if !(self.signal_magnitude >= 0.0 && self.signal_magnitude.is_finite()) {
            return bad(format!(
                "signal_magnitude must be finite and ≥ 0, got {}",
                self.signal_magnitude
            ));
        }
        Ok(())
    }

    /// Covariance of the lab-averaged means, as `(σ², ρ)`.
    fn mean_covariance(&self, tau2: f64, z2: f64) -> (f64, f64) {
        let l = self.labs as f64;
        ((tau2 + z2) / l, tau2 / l)
    }
}

/// `(σ̂²_τ, σ̂²_z)` from the two-way layout `y` (`p × labs`), clamping a
/// negative `σ̂²_τ` to zero.
fn estimate_components(y: &DMatrix<f64>) -> (f64, f64) {
    let (p, labs) = (y.nrows() as f64, y.ncols() as f64);
    let grand = y.mean();
    let row_means: Vec<f64> = y.row_iter().map(|r| r.mean()).collect();
    let col_means: Vec<f64> = y.column_iter().map(|c| c.mean()).collect();
    let ms_tau = p * col_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (labs - 1.0);
    let mut sse = 0.0;
    for (j, col) in y.column_iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            sse += (v - row_means[i] - col_means[j] + grand).powi(2);
        }
    }
    let mse = sse / ((p - 1.0) * (labs - 1.0));
    (((ms_tau - mse) / p).max(0.0), mse)
}

/// Multiple testing of the treatment means: SLOPE with `λ_BH` on the
/// whitened regression (method `slope`) against BH on the marginal z scores
/// (method `bh`).
pub fn run_anova_testing(
    config: &AnovaConfig,
    q: f64,
    replicates: usize,
    seed: u64,
) -> Result<SimReport> {
    config.validate()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(SlopeError::InvalidArgument(format!(
            "q must lie in (0, 1), got {q}"
        )));
    }
    if replicates == 0 {
        return Err(SlopeError::InvalidArgument("replicates must be ≥ 1".into()));
    }
    let (p, labs, k) = (config.p, config.labs, config.k);
    let (s2, rho) = config.mean_covariance(config.sigma_tau2, config.sigma_z2);
    let truth = Equicorrelated::inv_sqrt(p, s2, rho)?;
    let mu_value = config.signal_magnitude * signal_unit(p) / truth.column_norm();
    let lambda = lambda_bh(p, q)?;
    let solver = SolverConfig::default();

    let per_rep = par_map(replicates, |rep| {
        let idx = pair_index(k as u64, rep as u64);
        let (mu, mask) = place_signals(seed, k, rep, p, mu_value);
        let mut lab_rng = stream(seed, Purpose::LabEffects, idx);
        let tau: Vec<f64> = (0..labs)
            .map(|_| config.sigma_tau2.sqrt() * standard_normal(&mut lab_rng))
            .collect();
        let mut rng = stream(seed, Purpose::Noise, idx);
        let sz = config.sigma_z2.sqrt();
        let y = DMatrix::from_fn(p, labs, |i, j| {
            mu[i] + tau[j] + sz * standard_normal(&mut rng)
        });
        let ybar = DVector::from_iterator(p, y.row_iter().map(|r| r.mean()));

        let (tau2, z2) = match config.variance_mode {
            VarianceMode::Known => (config.sigma_tau2, config.sigma_z2),
            VarianceMode::Estimated => estimate_components(&y),
        };
        let (s2, rho) = config.mean_covariance(tau2, z2);
        let w = Equicorrelated::inv_sqrt(p, s2, rho)?;

        let z_scores: Vec<f64> = ybar.iter().map(|v| v / s2.sqrt()).collect();
        let bh = bh_step_up(&z_scores, 1.0, q)?;
        let bh = SimRecord::from_selection("anova", "bh", k, rep, &bh.rejected, &mask);

        let mut yt = w.apply(&ybar);
        center(&mut yt);
        let mut x = w.to_matrix();
        standardize_columns(&mut x)?;
        let problem = SlopeProblem::new(&x, &yt, lambda.clone())?;
        let sol = solve(&problem, &solver)?;
        let mut slope = SimRecord::from_selection("anova", "slope", k, rep, &sol.support, &mask);
        slope.converged = Some(sol.converged);
        slope.sigma_hat = Some(s2.sqrt());
        Ok([slope, bh])
    })?;
    Ok(SimReport::from_records(
        per_rep.into_iter().flatten().collect(),
    ))
}

/// A sweep of [`run_anova_testing`] over several signal counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnovaStudy {
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_labs")]
    pub labs: usize,
    pub sigma_tau2: f64,
    pub sigma_z2: f64,
    pub k_list: Vec<usize>,
    #[serde(default)]
    pub variance_mode: VarianceMode,
    #[serde(default = "unit")]
    pub signal_magnitude: f64,
    pub q: f64,
    pub replicates: usize,
    pub seed: u64,
}

fn default_p() -> usize {
    1000
}

fn default_labs() -> usize {
    5
}

impl AnovaStudy {
    pub fn config_for(&self, k: usize) -> AnovaConfig {
        AnovaConfig {
            p: self.p,
            labs: self.labs,
            sigma_tau2: self.sigma_tau2,
            sigma_z2: self.sigma_z2,
            k,
            variance_mode: self.variance_mode,
            signal_magnitude: self.signal_magnitude,
        }
    }
}

pub fn run_anova_study(study: &AnovaStudy) -> Result<SimReport> {
    if study.k_list.is_empty() {
        return Err(SlopeError::InvalidArgument(
            "k_list must not be empty".into(),
        ));
    }
    let mut records = Vec::new();
    for &k in &study.k_list {
        records.extend(
            run_anova_testing(&study.config_for(k), study.q, study.replicates, study.seed)?.records,
        );
    }
    Ok(SimReport::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_whitening_entries() {
        let w = Equicorrelated::inv_sqrt(1000, 1.0, 0.5).unwrap();
        assert_eq!(format!("{:.4}", w.entry(0, 0)), "1.4128");
        assert_eq!(format!("{:.4}", w.entry(0, 1)), "-0.0014");
    }

    #[test]
    fn independent_case_is_diagonal() {
        let w = equicorrelated_inv_sqrt(4, 4.0, 0.0).unwrap();
        assert_eq!(w, DMatrix::identity(4, 4) * 0.5);
    }

    #[test]
    fn squares_to_inverse() {
        for &(p, s2, rho) in &[(5usize, 2.0, 0.7), (7, 1.0, -0.1), (3, 0.3, 0.29)] {
            let w = equicorrelated_inv_sqrt(p, s2, rho).unwrap();
            let sigma = DMatrix::from_fn(p, p, |i, j| if i == j { s2 } else { rho });
            let id = &w * &w * sigma;
            assert!((id - DMatrix::identity(p, p)).amax() < 1e-10);
        }
        assert!(matches!(
            equicorrelated_inv_sqrt(3, 1.0, 1.0),
            Err(SlopeError::Domain(_))
        ));
        assert!(matches!(
            equicorrelated_inv_sqrt(3, 1.0, -0.6),
            Err(SlopeError::Domain(_))
        ));
    }

    #[test]
    fn variance_estimates_recover_components() {
        let (p, labs) = (2000, 8);
        let mut rng = stream(1, Purpose::Noise, 0);
        let tau: Vec<f64> = (0..labs).map(|_| 2.0 * standard_normal(&mut rng)).collect();
        let y = DMatrix::from_fn(p, labs, |i, j| {
            (i % 7) as f64 + tau[j] + 1.5 * standard_normal(&mut rng)
        });
        let (t2, z2) = estimate_components(&y);
        assert!((z2 - 2.25).abs() < 0.1, "{z2}");
        // σ̂²_τ equals the sample variance of the lab effects up to noise.
        let m = tau.iter().sum::<f64>() / labs as f64;
        let sv = tau.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (labs - 1) as f64;
        assert!((t2 - sv).abs() < 0.05, "{t2} vs {sv}");
    }

    #[test]
    fn small_study_runs() {
        let study = AnovaStudy {
            p: 200,
            labs: 5,
            sigma_tau2: 2.5,
            sigma_z2: 2.5,
            k_list: vec![0, 10],
            variance_mode: VarianceMode::Estimated,
            signal_magnitude: 1.0,
            q: 0.1,
            replicates: 3,
            seed: 2,
        };
        let r = run_anova_study(&study).unwrap();
        assert_eq!(r.records.len(), 2 * 2 * 3);
        assert!(r.aggregate("slope", 10).unwrap().mean_tpp > 0.0);
    }
}
