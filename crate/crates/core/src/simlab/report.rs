use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::lambda::format_f64;

/// Column names of the per-replicate CSV, in order.
pub const CSV_COLUMNS: [&str; 10] = [
    "scenario",
    "method",
    "k",
    "rep",
    "R",
    "V",
    "FDP",
    "TPP",
    "relMSE",
    "sigma_hat",
];

/// Outcome of one method on one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub scenario: String,
    pub method: String,
    pub k: usize,
    pub rep: usize,
    /// Number of selections.
    pub r: usize,
    /// False selections.
    pub v: usize,
    pub fdp: f64,
    pub tpp: f64,
    /// `100·‖μ̂ − μ‖²/‖μ‖²`; absent when `μ = 0`.
    pub rel_mse: Option<f64>,
    pub sigma_hat: Option<f64>,
    /// Convergence of the fit, where the method iterates.
    pub converged: Option<bool>,
}

impl SimRecord {
    /// Builds a record from the selected indices and a mask of true signals.
    pub(crate) fn from_selection(
        scenario: &str,
        method: &str,
        k: usize,
        rep: usize,
        selected: &[usize],
        is_signal: &[bool],
    ) -> Self {
        let r = selected.len();
        let tp = selected.iter().filter(|&&j| is_signal[j]).count();
        let v = r - tp;
        Self {
            scenario: scenario.to_owned(),
            method: method.to_owned(),
            k,
            rep,
            r,
            v,
            fdp: v as f64 / r.max(1) as f64,
            tpp: tp as f64 / k.max(1) as f64,
            rel_mse: None,
            sigma_hat: None,
            converged: None,
        }
    }

    pub(crate) fn with_rel_mse(mut self, err_sq: f64, signal_sq: f64) -> Self {
        self.rel_mse = (signal_sq > 0.0).then(|| 100.0 * err_sq / signal_sq);
        self
    }
}

/// Summary over the replicates of one `(method, k)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub scenario: String,
    pub method: String,
    pub k: usize,
    pub replicates: usize,
    pub mean_fdp: f64,
    /// Sample standard deviation of FDP over `√replicates`.
    pub se_fdp: f64,
    pub mean_tpp: f64,
    pub se_tpp: f64,
    pub mean_rel_mse: Option<f64>,
    pub mean_sigma_hat: Option<f64>,
    /// Fraction of replicates whose fit converged, for iterative methods.
    pub converged_fraction: Option<f64>,
    /// Fraction of replicates with no false selection.
    pub fraction_fdp_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub records: Vec<SimRecord>,
    pub aggregates: Vec<Aggregate>,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut count) = (0.0, 0usize);
    for v in values {
        sum += v;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

impl SimReport {
    /// Groups records by `(method, k)` in order of first appearance.
    pub fn from_records(records: Vec<SimRecord>) -> Self {
        let mut keys: Vec<(String, String, usize)> = Vec::new();
        for r in &records {
            let key = (r.scenario.clone(), r.method.clone(), r.k);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let aggregates = keys
            .into_iter()
            .map(|(scenario, method, k)| {
                let cell: Vec<&SimRecord> = records
                    .iter()
                    .filter(|r| r.scenario == scenario && r.method == method && r.k == k)
                    .collect();
                let fdp: Vec<f64> = cell.iter().map(|r| r.fdp).collect();
                let tpp: Vec<f64> = cell.iter().map(|r| r.tpp).collect();
                let (mean_fdp, se_fdp) = mean_se(&fdp);
                let (mean_tpp, se_tpp) = mean_se(&tpp);
                Aggregate {
                    replicates: cell.len(),
                    mean_fdp,
                    se_fdp,
                    mean_tpp,
                    se_tpp,
                    mean_rel_mse: mean_of(cell.iter().filter_map(|r| r.rel_mse)),
                    mean_sigma_hat: mean_of(cell.iter().filter_map(|r| r.sigma_hat)),
                    converged_fraction: mean_of(
                        cell.iter()
                            .filter_map(|r| r.converged.map(|c| c as u8 as f64)),
                    ),
                    fraction_fdp_zero: cell.iter().filter(|r| r.v == 0).count() as f64
                        / cell.len() as f64,
                    scenario,
                    method,
                    k,
                }
            })
            .collect();
        Self {
            records,
            aggregates,
        }
    }

    pub fn aggregate(&self, method: &str, k: usize) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.method == method && a.k == k)
    }

    /// Appends another report, recomputing aggregates.
    pub fn merge(self, other: SimReport) -> Self {
        let mut records = self.records;
        records.extend(other.records);
        Self::from_records(records)
    }

    /// One row per record with the columns of [`CSV_COLUMNS`]; missing
    /// values are empty fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.scenario,
                r.method,
                r.k,
                r.rep,
                r.r,
                r.v,
                format_f64(r.fdp),
                format_f64(r.tpp),
                opt(r.rel_mse),
                opt(r.sigma_hat)
            )?;
        }
        Ok(())
    }

    pub fn write_aggregates_json<W: Write>(&self, out: W) -> serde_json::Result<()> {
        serde_json::to_writer_pretty(out, &self.aggregates)
    }
}
