use serde::{Deserialize, Serialize};

use crate::error::{Result, SlopeError};
use crate::lambda::SequenceKind;
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Orthogonal,
    GaussianDesign,
    Anova,
    Gwas,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Orthogonal => "orthogonal",
            Scenario::GaussianDesign => "gaussian_design",
            Scenario::Anova => "anova",
            Scenario::Gwas => "gwas",
        }
    }
}

/// How the noise level enters the fit. Under `Scaled` the noise has unit
/// standard deviation and the fit estimates it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SigmaMode {
    Known { sigma: f64 },
    Scaled,
}

impl SigmaMode {
    /// Standard deviation of the simulated noise.
    pub fn noise_sigma(self) -> f64 {
        match self {
            SigmaMode::Known { sigma } => sigma,
            SigmaMode::Scaled => 1.0,
        }
    }
}

impl Default for SigmaMode {
    fn default() -> Self {
        SigmaMode::Known { sigma: 1.0 }
    }
}

/// Distribution of the error terms, each with variance σ² before contamination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum ErrorDist {
    #[default]
    Gaussian,
    LaplaceUnitVar,
    /// A fraction `frac` of the entries is replaced by draws from
    /// `N(0, (scale·σ)²)`.
    Contaminated {
        frac: f64,
        scale: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub p: usize,
    pub k_list: Vec<usize>,
    /// Nonzero coefficients equal this multiple of `√(2 log p)`. Defaults
    /// to 5 for the orthogonal scenario, 1.2 for GWAS and 1 otherwise.
    #[serde(default)]
    pub signal_magnitude: Option<f64>,
    pub q: f64,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_kind")]
    pub sequence_kind: SequenceKind,
    #[serde(default)]
    pub sigma_mode: SigmaMode,
    #[serde(default)]
    pub error_dist: ErrorDist,
    /// Gaussian design: also fit the Lasso at the Bonferroni level.
    #[serde(default)]
    pub compare_lasso: bool,
    /// GWAS: draw a new genotype matrix for every replicate instead of
    /// sharing one across the run.
    #[serde(default)]
    pub fresh_design: bool,
    /// GWAS: add dominance effects on the causal SNPs.
    #[serde(default)]
    pub dominant_effects: bool,
    /// Cap on scaled-SLOPE outer iterations.
    #[serde(default = "default_scaled_iters")]
    pub scaled_max_iters: usize,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn default_kind() -> SequenceKind {
    SequenceKind::Bh
}

fn default_scaled_iters() -> usize {
    100
}

impl SimConfig {
    /// Config with defaults for everything but the required fields.
    pub fn new(
        scenario: Scenario,
        n: usize,
        p: usize,
        k_list: Vec<usize>,
        q: f64,
        replicates: usize,
        seed: u64,
    ) -> Self {
        Self {
            scenario,
            n,
            p,
            k_list,
            signal_magnitude: None,
            q,
            replicates,
            seed,
            sequence_kind: default_kind(),
            sigma_mode: SigmaMode::default(),
            error_dist: ErrorDist::default(),
            compare_lasso: false,
            fresh_design: false,
            dominant_effects: false,
            scaled_max_iters: default_scaled_iters(),
            solver: SolverConfig::default(),
        }
    }

    /// Signal magnitude in units of `√(2 log p)`, with the scenario default.
    pub fn magnitude(&self) -> f64 {
        self.signal_magnitude.unwrap_or(match self.scenario {
            Scenario::Orthogonal => 5.0,
            Scenario::Gwas => 1.2,
            Scenario::GaussianDesign | Scenario::Anova => 1.0,
        })
    }

    pub fn validate(&self, expected: Scenario) -> Result<()> {
        let bad = |m: String| Err(SlopeError::InvalidArgument(m));
        if self.scenario != expected {
            return bad(format!(
                "config is for scenario `{}`, expected `{}`",
                self.scenario.name(),
                expected.name()
            ));
        }
        if self.p == 0 {
            return bad("p must be ≥ 1".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be ≥ 1".into());
        }
        if self.k_list.is_empty() {
            return bad("k_list must not be empty".into());
        }
        if let Some(k) = self.k_list.iter().find(|&&k| k > self.p) {
            return bad(format!("k = {k} exceeds p = {}", self.p));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad(format!("q must lie in (0, 1), got {}", self.q));
        }
        let m = self.magnitude();
        if !(m >= 0.0 && m.is_finite()) {
            return bad(format!("signal_magnitude must be finite and ≥ 0, got {m}"));
        }
        if let SigmaMode::Known { sigma } = self.sigma_mode {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return bad(format!("sigma must be positive, got {sigma}"));
            }
        }
        if let ErrorDist::Contaminated { frac, scale } = self.error_dist {
            if !(0.0..=1.0).contains(&frac) {
                return bad(format!(
                    "contamination fraction must lie in [0, 1], got {frac}"
                ));
            }
            if !(scale >= 0.0 && scale.is_finite()) {
                return bad(format!(
                    "contamination scale must be finite and ≥ 0, got {scale}"
                ));
            }
        }
        if self.scaled_max_iters == 0 {
            return bad("scaled_max_iters must be ≥ 1".into());
        }
        self.solver.validate()
    }
}
