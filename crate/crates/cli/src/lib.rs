//! Spec ingestion, command dispatch and report emission for the `cstarcat`
//! binary.

pub mod commands;
pub mod error;
pub mod ingest;
pub mod output;
pub mod spec;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use cstarcat::Tolerances;

pub use error::{CliError, EXIT_CHECK_FAILED, EXIT_INPUT};
pub use output::{CommandOutput, Format};

#[derive(Debug, Parser)]
#[command(name = "cstarcat", version, about = "Finite-dimensional C*-categories: validation, K-theory, crossed products")]
pub struct Cli {
    /// Relative membership tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_mem: f64,
    /// Rank and eigenvalue-cluster threshold.
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub tol_rank: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "CSTARCAT_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cap on the dimension of any closure computation.
    #[arg(long, global = true, default_value_t = 20_000)]
    pub max_dim: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the C*-category axioms and the group action.
    Validate { spec: PathBuf },
    /// K0 of A(C).
    K0 { spec: PathBuf },
    /// Reduced crossed product by the group or a subgroup.
    Crossed {
        spec: PathBuf,
        /// Subgroup as element indices or names, e.g. `0,3` or `{e}`.
        #[arg(long)]
        subgroup: Option<String>,
    },
    /// Orbit functor on all orbits G/H with comparison checks.
    Orbit { spec: PathBuf },
    /// Morita verdict and K0 map of a functor out of the spec's category.
    Morita {
        spec: PathBuf,
        #[arg(long)]
        functor: PathBuf,
    },
    /// Random orthogonal sums with the norm formula and comparison unitaries.
    SumsCheck {
        spec: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Re-emit a spec in canonical form.
    Fmt { spec: PathBuf },
}

impl Cli {
    pub fn settings(&self) -> commands::Settings {
        commands::Settings {
            seed: self.seed,
            tol: Tolerances {
                mem: self.tol_mem,
                rank: self.tol_rank,
                max_dim: self.max_dim,
                ..Tolerances::default()
            },
        }
    }
}

/// Runs one command and returns the bytes for stdout with the exit code.
pub fn run(cli: &Cli) -> Result<(Vec<u8>, i32), CliError> {
    let s = cli.settings();
    let out = match &cli.command {
        Command::Validate { spec } => commands::validate_cmd(spec, &s)?,
        Command::K0 { spec } => commands::k0_cmd(spec, &s)?,
        Command::Crossed { spec, subgroup } => commands::crossed_cmd(spec, subgroup.as_deref(), &s)?,
        Command::Orbit { spec } => commands::orbit_cmd(spec, &s)?,
        Command::Morita { spec, functor } => commands::morita_cmd(spec, functor, &s)?,
        Command::SumsCheck { spec, trials } => commands::sums_cmd(spec, *trials, &s)?,
        Command::Fmt { spec } => return Ok((commands::fmt_cmd(spec)?.into_bytes(), 0)),
    };
    let code = if out.passed() { 0 } else { EXIT_CHECK_FAILED };
    Ok((out.emit(cli.format), code))
}
