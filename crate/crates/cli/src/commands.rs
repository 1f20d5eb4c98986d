use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::{Args, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde::{Serialize, Serializer};

use slope_core::inference::{one_based, scaled_slope_with, ScaledSlopeConfig};
use slope_core::lambda::{
    default_grid, lambda_bh, lambda_gaussian, lambda_monte_carlo, lambda_oscar, read_lambda_csv,
    write_lambda_csv,
};
use slope_core::linalg::{center, standardize_columns};
use slope_core::simlab::{
    run_anova_study, run_gaussian_design, run_gwas_sim, run_orthogonal_fdr, AnovaStudy, Scenario,
    SimConfig, SimReport,
};
use slope_core::solver::{self, duality_gap, SlopeProblem, SolverConfig};
use slope_core::{LambdaSequence, ProxWorkspace};

use crate::io::{create, read_matrix, read_vector, write_column, write_json};
use crate::manifest::{sidecar, RunManifest};
use crate::{CliError, Status};

/// `--lambda` choices for `solve`.
#[derive(Debug, Clone, PartialEq)]
pub enum LambdaChoice {
    Bh,
    GaussianStar,
    MonteCarlo,
    File(PathBuf),
    Const(f64),
}

impl FromStr for LambdaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bh" => Ok(Self::Bh),
            "gstar" => Ok(Self::GaussianStar),
            "mc" => Ok(Self::MonteCarlo),
            _ => {
                if let Some(path) = s.strip_prefix("file:") {
                    Ok(Self::File(PathBuf::from(path)))
                } else if let Some(v) = s.strip_prefix("const:") {
                    v.parse()
                        .map(Self::Const)
                        .map_err(|_| format!("`{v}` is not a number"))
                } else {
                    Err("expected bh, gstar, mc, file:PATH or const:VALUE".into())
                }
            }
        }
    }
}

impl Serialize for LambdaChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let text = match self {
            Self::Bh => "bh".to_owned(),
            Self::GaussianStar => "gstar".to_owned(),
            Self::MonteCarlo => "mc".to_owned(),
            Self::File(p) => format!("file:{}", p.display()),
            Self::Const(v) => format!("const:{v}"),
        };
        s.serialize_str(&text)
    }
}

/// `--sigma` choices for `solve`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaChoice {
    Value(f64),
    Scaled,
}

impl FromStr for SigmaChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "scaled" {
            return Ok(Self::Scaled);
        }
        match s.parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Self::Value(v)),
            _ => Err("expected a positive number or `scaled`".into()),
        }
    }
}

impl Serialize for SigmaChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Value(v) => s.serialize_f64(*v),
            Self::Scaled => s.serialize_str("scaled"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

#[derive(Args, Serialize)]
pub struct SolveArgs {
    /// Design matrix CSV (n rows, p columns, optional header).
    #[arg(long)]
    x: PathBuf,
    /// Response CSV (one column).
    #[arg(long)]
    y: PathBuf,
    /// Sequence: bh, gstar, mc, file:PATH or const:VALUE.
    #[arg(long, default_value = "bh")]
    lambda: LambdaChoice,
    /// Target FDR level for generated sequences.
    #[arg(long, default_value_t = 0.1)]
    q: f64,
    /// Noise level multiplying the sequence, or `scaled` to estimate it.
    #[arg(long, default_value = "1")]
    sigma: SigmaChoice,
    /// Relative duality-gap tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    /// Output JSON path.
    #[arg(long)]
    out: PathBuf,
    /// Center y and give the columns of X zero mean and unit norm.
    #[arg(long, value_enum, default_value_t = Switch::On)]
    standardize: Switch,
    /// Monte Carlo draws per grid point (`--lambda mc`).
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    /// Monte Carlo grid points (`--lambda mc`).
    #[arg(long, default_value_t = 40)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on outer iterations with `--sigma scaled`.
    #[arg(long, default_value_t = 100)]
    scaled_max_iters: usize,
}

#[derive(Serialize)]
struct SolveOutput {
    /// Coefficients for the columns of X as given.
    beta: Vec<f64>,
    intercept: Option<f64>,
    /// Coefficients for the standardized columns, when standardization is on.
    beta_standardized: Option<Vec<f64>>,
    #[serde(serialize_with = "one_based::serialize")]
    support: Vec<usize>,
    objective: f64,
    dual_gap: f64,
    iterations: usize,
    converged: bool,
    sigma_hat: Option<f64>,
    scaled_iterations: Option<usize>,
}

fn solver_config(tol: f64, max_iters: usize) -> SolverConfig {
    SolverConfig {
        tolerance: tol,
        max_iters,
        ..SolverConfig::default()
    }
}

fn build_solve_lambda(args: &SolveArgs, x: &DMatrix<f64>) -> Result<LambdaSequence, CliError> {
    let (n, p) = (x.nrows(), x.ncols());
    let lambda = match &args.lambda {
        LambdaChoice::Bh => lambda_bh(p, args.q)?,
        LambdaChoice::GaussianStar => lambda_gaussian(p, n, args.q)?.sequence,
        LambdaChoice::MonteCarlo => {
            lambda_monte_carlo(
                x,
                args.q,
                args.draws,
                &default_grid(p, n, args.grid),
                args.seed,
            )?
            .sequence
        }
        LambdaChoice::File(path) => {
            let file = File::open(path).map_err(|e| CliError::io(path, e))?;
            read_lambda_csv(BufReader::new(file))
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?
        }
        LambdaChoice::Const(v) => LambdaSequence::constant(p, *v)?,
    };
    if lambda.len() != p {
        return Err(CliError::input(format!(
            "lambda has {} entries but X has {p} columns",
            lambda.len()
        )));
    }
    Ok(lambda)
}

pub fn solve(args: SolveArgs) -> Result<Status, CliError> {
    let started = Instant::now();
    let x = read_matrix(&args.x)?;
    let y = read_vector(&args.y)?;
    if x.nrows() != y.len() {
        return Err(CliError::input(format!(
            "X has {} rows but y has {} entries",
            x.nrows(),
            y.len()
        )));
    }
    let mut xf = x.clone();
    let mut yf = y.clone();
    let scaling = match args.standardize {
        Switch::On => Some(standardize_columns(&mut xf)?),
        Switch::Off => None,
    };
    let mut y_mean = match args.standardize {
        Switch::On => Some(center(&mut yf)),
        Switch::Off => None,
    };
    let lambda = build_solve_lambda(&args, &xf)?;
    let config = solver_config(args.tol, args.max_iters);

    let (beta, iterations, converged, sigma_hat, scaled_iterations, objective, dual_gap) =
        match args.sigma {
            SigmaChoice::Value(sigma) => {
                let problem = SlopeProblem::new(&xf, &yf, lambda.scaled(sigma)?)?;
                let sol = solver::solve(&problem, &config)?;
                (
                    sol.beta,
                    sol.iterations,
                    sol.converged,
                    None,
                    None,
                    sol.objective,
                    sol.dual_gap,
                )
            }
            SigmaChoice::Scaled => {
                let cfg = ScaledSlopeConfig {
                    max_iters: args.scaled_max_iters,
                    solver: config,
                };
                let res = scaled_slope_with(&xf, &yf, &lambda, &cfg, None)?;
                if y_mean.is_none() {
                    y_mean = Some(center(&mut yf));
                }
                let problem = SlopeProblem::new(&xf, &yf, lambda.scaled(res.sigma_hat)?)?;
                let objective = problem.objective(&res.beta)?;
                let gap = duality_gap(&problem, &res.beta)?;
                (
                    res.beta,
                    res.iterations,
                    res.converged && res.inner_converged,
                    Some(res.sigma_hat),
                    Some(res.iterations),
                    objective,
                    gap,
                )
            }
        };

    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    let (beta_out, intercept, beta_standardized) = match &scaling {
        Some(s) => {
            let orig: Vec<f64> = beta.iter().zip(&s.norms).map(|(b, nrm)| b / nrm).collect();
            let shift: f64 = orig.iter().zip(&s.means).map(|(b, m)| b * m).sum();
            (orig, y_mean.map(|m| m - shift), Some(beta))
        }
        None => (beta, y_mean, None),
    };
    let output = SolveOutput {
        beta: beta_out,
        intercept,
        beta_standardized,
        support,
        objective,
        dual_gap,
        iterations,
        converged,
        sigma_hat,
        scaled_iterations,
    };
    write_json(&args.out, &output)?;
    RunManifest::write(
        &sidecar(&args.out, "manifest"),
        "solve",
        &args,
        Some(args.seed),
        started,
        vec![args.out.clone()],
    )?;
    Ok(if converged {
        Status::Ok
    } else {
        Status::NotConverged
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaKind {
    Bh,
    Gstar,
    Oscar,
    Mc,
}

#[derive(Args, Serialize)]
pub struct LambdaArgs {
    #[arg(long, value_enum)]
    kind: LambdaKind,
    /// Number of predictors (taken from --x for mc).
    #[arg(long)]
    p: Option<usize>,
    /// Sample size (gstar).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    q: f64,
    /// Monte Carlo draws per grid point.
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    /// Monte Carlo grid points.
    #[arg(long, default_value_t = 40)]
    grid: usize,
    /// Design matrix CSV (mc).
    #[arg(long)]
    x: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// OSCAR constant term.
    #[arg(long)]
    l1: Option<f64>,
    /// OSCAR slope.
    #[arg(long)]
    l2: Option<f64>,
}

fn required<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::input(format!("--{flag} is required for --kind {kind}")))
}

pub fn lambda(args: LambdaArgs) -> Result<Status, CliError> {
    let started = Instant::now();
    let mut outputs = vec![args.out.clone()];
    let seq = match args.kind {
        LambdaKind::Bh => lambda_bh(required(args.p, "p", "bh")?, args.q)?,
        LambdaKind::Oscar => lambda_oscar(
            required(args.p, "p", "oscar")?,
            required(args.l1, "l1", "oscar")?,
            required(args.l2, "l2", "oscar")?,
        )?,
        LambdaKind::Gstar => {
            let p = required(args.p, "p", "gstar")?;
            let n = required(args.n, "n", "gstar")?;
            let g = lambda_gaussian(p, n, args.q)?;
            let path = sidecar(&args.out, "kstar");
            write_json(
                &path,
                &serde_json::json!({ "k_star": g.k_star, "p": p, "n": n, "q": args.q, "raw": g.raw }),
            )?;
            outputs.push(path);
            g.sequence
        }
        LambdaKind::Mc => {
            let path = args
                .x
                .as_ref()
                .ok_or_else(|| CliError::input("--x is required for --kind mc"))?;
            let x = read_matrix(path)?;
            if let Some(p) = args.p {
                if p != x.ncols() {
                    return Err(CliError::input(format!(
                        "--p {p} disagrees with the {} columns of {}",
                        x.ncols(),
                        path.display()
                    )));
                }
            }
            let grid = default_grid(x.ncols(), x.nrows(), args.grid);
            let mc = lambda_monte_carlo(&x, args.q, args.draws, &grid, args.seed)?;
            let meta = sidecar(&args.out, "mc");
            write_json(
                &meta,
                &serde_json::json!({ "truncated_at": mc.truncated_at, "estimates": mc.estimates }),
            )?;
            outputs.push(meta);
            mc.sequence
        }
    };
    let mut w = create(&args.out)?;
    write_lambda_csv(&seq, &mut w).map_err(|e| CliError::io(&args.out, e))?;
    std::io::Write::flush(&mut w).map_err(|e| CliError::io(&args.out, e))?;
    RunManifest::write(
        &sidecar(&args.out, "manifest"),
        "lambda",
        &args,
        Some(args.seed),
        started,
        outputs,
    )?;
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioArg {
    Orthogonal,
    Gaussian,
    Anova,
    Gwas,
}

#[derive(Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_config<T: serde::de::DeserializeOwned>(
    path: &std::path::Path,
    value: serde_json::Value,
) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let at = e.path().to_string();
        CliError::input(format!("{}: at `{at}`: {}", path.display(), e.inner()))
    })
}

pub fn simulate(args: SimulateArgs) -> Result<Status, CliError> {
    let started = Instant::now();
    let text = std::fs::read_to_string(&args.config).map_err(|e| CliError::io(&args.config, e))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", args.config.display())))?;
    let obj = value.as_object_mut().ok_or_else(|| {
        CliError::input(format!("{}: expected a JSON object", args.config.display()))
    })?;
    if let Some(seed) = args.seed {
        obj.insert("seed".into(), seed.into());
    }
    let scenario = match args.scenario {
        ScenarioArg::Orthogonal => Some(Scenario::Orthogonal),
        ScenarioArg::Gaussian => Some(Scenario::GaussianDesign),
        ScenarioArg::Gwas => Some(Scenario::Gwas),
        ScenarioArg::Anova => None,
    };
    if let Some(s) = scenario {
        obj.entry("scenario")
            .or_insert_with(|| serde_json::to_value(s).expect("unit variant"));
    }

    std::fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let (report, effective, seed): (SimReport, serde_json::Value, u64) = match scenario {
        None => {
            let study: AnovaStudy = parse_config(&args.config, value)?;
            let report = run_anova_study(&study)?;
            (
                report,
                serde_json::to_value(&study).expect("serializable"),
                study.seed,
            )
        }
        Some(s) => {
            let config: SimConfig = parse_config(&args.config, value)?;
            if config.scenario != s {
                return Err(CliError::input(format!(
                    "{}: scenario `{}` does not match --scenario",
                    args.config.display(),
                    config.scenario.name()
                )));
            }
            let report = match s {
                Scenario::Orthogonal => run_orthogonal_fdr(&config)?,
                Scenario::GaussianDesign => run_gaussian_design(&config)?,
                Scenario::Gwas => run_gwas_sim(&config)?,
                Scenario::Anova => unreachable!("handled above"),
            };
            (
                report,
                serde_json::to_value(&config).expect("serializable"),
                config.seed,
            )
        }
    };
    let csv_path = args.out.join("report.csv");
    let mut w = create(&csv_path)?;
    report
        .write_csv(&mut w)
        .map_err(|e| CliError::io(&csv_path, e))?;
    std::io::Write::flush(&mut w).map_err(|e| CliError::io(&csv_path, e))?;
    let agg_path = args.out.join("aggregates.json");
    write_json(&agg_path, &report.aggregates)?;
    RunManifest::write(
        &args.out.join("manifest.json"),
        "simulate",
        serde_json::json!({ "scenario": args.scenario, "config": effective }),
        Some(seed),
        started,
        vec![csv_path, agg_path],
    )?;
    Ok(Status::Ok)
}

/// `--bench` value: `none` or a repeat count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bench {
    None,
    Repeats(usize),
}

impl FromStr for Bench {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(Self::None);
        }
        match s.parse::<usize>() {
            Ok(r) if r > 0 => Ok(Self::Repeats(r)),
            _ => Err("expected `none` or a positive repeat count".into()),
        }
    }
}

impl Serialize for Bench {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::None => s.serialize_str("none"),
            Self::Repeats(r) => s.serialize_u64(*r as u64),
        }
    }
}

#[derive(Args, Serialize)]
pub struct ProxArgs {
    /// Input vector CSV (one column).
    #[arg(long)]
    y: PathBuf,
    /// Sequence CSV with a `lambda` header.
    #[arg(long)]
    lambda: PathBuf,
    #[arg(long, default_value = "none")]
    bench: Bench,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

fn median(mut times: Vec<Duration>) -> Duration {
    times.sort();
    times[times.len() / 2]
}

pub fn prox(args: ProxArgs) -> Result<Status, CliError> {
    let started = Instant::now();
    let y: DVector<f64> = read_vector(&args.y)?;
    let file = File::open(&args.lambda).map_err(|e| CliError::io(&args.lambda, e))?;
    let lambda = read_lambda_csv(BufReader::new(file))
        .map_err(|e| CliError::input(format!("{}: {e}", args.lambda.display())))?;
    if lambda.len() != y.len() {
        return Err(CliError::input(format!(
            "y has {} entries but lambda has {}",
            y.len(),
            lambda.len()
        )));
    }
    let p = y.len();
    let mut ws = ProxWorkspace::with_capacity(p);
    let mut out = vec![0.0; p];
    ws.prox_into(y.as_slice(), &lambda, 1.0, &mut out)?;
    write_column(&args.out, "prox", &out)?;

    if let Bench::Repeats(r) = args.bench {
        let mut total = Vec::with_capacity(r);
        let mut sink = vec![0.0; p];
        for _ in 0..r {
            let t = Instant::now();
            ws.prox_into(y.as_slice(), &lambda, 1.0, &mut sink)?;
            total.push(t.elapsed());
        }
        let mut sorted: Vec<f64> = y.iter().map(|v| v.abs()).collect();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut after = Vec::with_capacity(r);
        for _ in 0..r {
            let t = Instant::now();
            ws.prox_sorted_unchecked(&sorted, lambda.as_slice(), 1.0, &mut sink);
            after.push(t.elapsed());
        }
        println!("p = {p}, repeats = {r}");
        println!(
            "total prox time (median, s): {:.6e}",
            median(total).as_secs_f64()
        );
        println!(
            "prox time after normalization (median, s): {:.6e}",
            median(after).as_secs_f64()
        );
    }
    RunManifest::write(
        &sidecar(&args.out, "manifest"),
        "prox",
        &args,
        None,
        started,
        vec![args.out.clone()],
    )?;
    Ok(Status::Ok)
}
