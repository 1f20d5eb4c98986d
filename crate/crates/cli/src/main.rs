//! `slope`: command-line front end for SLOPE fitting, regularization
//! sequences, the sorted-ℓ1 prox and simulations.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 when a solver stopped at
//! its iteration cap (output is still written).

mod commands;
mod io;
mod manifest;

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{LambdaArgs, ProxArgs, SimulateArgs, SolveArgs};

#[derive(Parser)]
#[command(name = "slope", version, about = "Sorted L-one penalized estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit SLOPE to a design matrix and response.
    Solve(SolveArgs),
    /// Generate a regularization sequence.
    Lambda(LambdaArgs),
    /// Run a simulation scenario from a JSON config.
    Simulate(SimulateArgs),
    /// Evaluate the sorted-ℓ1 prox, optionally timing it.
    Prox(ProxArgs),
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Ok,
    NotConverged,
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        Self::input(format!("{}: {err}", path.display()))
    }
}

impl From<slope_core::SlopeError> for CliError {
    fn from(e: slope_core::SlopeError) -> Self {
        Self::input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Lambda(args) => commands::lambda(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Prox(args) => commands::prox(args),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::NotConverged) => {
            eprintln!("warning: the solver stopped at its iteration cap before converging");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(1)
        }
    }
}
