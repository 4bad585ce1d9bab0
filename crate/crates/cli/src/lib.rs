//! Command line front end over the core library: literal parsing, a
//! key=value settings file merged under explicit flags, and deterministic
//! CSV or JSON rendering with the full run configuration in every header.

pub mod commands;
pub mod config;
pub mod grid;
pub mod literals;
pub mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{components, constants, count, expand, generic, reduce, trace, verify};
use crate::config::{Common, CommonFlags, Settings};

/// Failure modes of a run, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A flag, config entry, or library precondition was violated.
    #[error("{0}")]
    Validation(String),
    /// A step budget ran out; any partial results were already written.
    #[error("{0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Budget(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(1),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "hurwitz",
    version,
    about = "Continued fraction expansion, form reduction, geodesic coding, and lattice counting"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand a value into minus continued fraction digits.
    Expand(expand::ExpandArgs),
    /// Reduce a binary quadratic form and report the reducing word.
    Reduce(reduce::ReduceArgs),
    /// Code a reduced geodesic into segments with return times and cusp verdicts.
    Trace(trace::TraceArgs),
    /// Count primitive lattice points of a value band over a radius grid.
    Count(count::CountArgs),
    /// Compare lattice counts with flow component counts over a radius grid.
    Components(components::ComponentsArgs),
    /// Check the counting inequalities for a reduced form over a radius grid.
    Verify(verify::VerifyArgs),
    /// Expected excursion statistics of a measure typical digit sequence.
    Generic(generic::GenericArgs),
    /// Print the coding constants with certified enclosures.
    Constants(constants::ConstantsArgs),
}

/// Parses the command line, merges the settings file, and runs the
/// selected subcommand.
pub fn run() -> CliResult<()> {
    let cli = Cli::parse();
    run_parsed(cli)
}

/// Runs an already parsed invocation.
pub fn run_parsed(cli: Cli) -> CliResult<()> {
    let mut settings = match &cli.common.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::empty(),
    };
    let common = Common::resolve(&cli.common, &mut settings)?;
    if let Some(workers) = common.workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    match cli.command {
        Command::Expand(args) => {
            let resolved = expand::resolve(args, &mut settings)?;
            settings.finish()?;
            expand::execute(&common, resolved)
        }
        Command::Reduce(args) => {
            let resolved = reduce::resolve(args, &mut settings)?;
            settings.finish()?;
            reduce::execute(&common, resolved)
        }
        Command::Trace(args) => {
            let resolved = trace::resolve(args, &mut settings)?;
            settings.finish()?;
            trace::execute(&common, resolved)
        }
        Command::Count(args) => {
            let resolved = count::resolve(args, &mut settings, common.format)?;
            settings.finish()?;
            count::execute(&common, resolved)
        }
        Command::Components(args) => {
            let resolved = components::resolve(args, &mut settings)?;
            settings.finish()?;
            components::execute(&common, resolved)
        }
        Command::Verify(args) => {
            let resolved = verify::resolve(args, &mut settings)?;
            settings.finish()?;
            verify::execute(&common, resolved)
        }
        Command::Generic(args) => {
            let resolved = generic::resolve(args, &mut settings)?;
            settings.finish()?;
            generic::execute(&common, resolved)
        }
        Command::Constants(args) => {
            let resolved = constants::resolve(args, &mut settings)?;
            settings.finish()?;
            constants::execute(&common, resolved)
        }
    }
}
