//! Command-line front end: configuration, experiment runs and CSV output.

pub mod commands;
pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::Params;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_HONEST_FAILURE: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] etadense::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use etadense::Error as E;
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                E::Io { .. } => EXIT_IO,
                E::QuadratureNonconvergence { .. }
                | E::RootFindFailure { .. }
                | E::EvalFailure(_)
                | E::BranchObstruction { .. }
                | E::WindowExhausted { .. }
                | E::TooFewSamples { .. } => EXIT_NUMERIC,
                _ => EXIT_VALIDATION,
            },
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "etadense", version, about = "Iterated log-zeta integrals and denseness experiments")]
pub struct Cli {
    /// TOML file with default parameters (or a manifest from an earlier run).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// ζ, log ζ, the horizontal and vertical integrals and the bridge residual over a t-grid.
    Eval(Params),
    /// Mean-square error of the Dirichlet approximation for several cutoffs.
    Meansquare(Params),
    /// Search for a height where the horizontal integral is close to a target.
    Hunt(Params),
    /// Angles closing a polygon of radii, or a torus point from a prime window.
    Polygon(Params),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::Meansquare(_) => "meansquare",
            Command::Hunt(_) => "hunt",
            Command::Polygon(_) => "polygon",
        }
    }

    fn params(&self) -> &Params {
        match self {
            Command::Eval(p) | Command::Meansquare(p) | Command::Hunt(p) | Command::Polygon(p) => p,
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let file = match &cli.config {
        Some(path) => Params::from_file(path)?,
        None => Params::default(),
    };
    let params = file.merged(cli.command.params());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = params.threads {
        if n == 0 {
            return Err(CliError::Validation("threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Validation(e.to_string()))?;
    let name = cli.command.name();
    pool.install(|| match name {
        "eval" => commands::cmd_eval(&params),
        "meansquare" => commands::cmd_meansquare(&params),
        "hunt" => commands::cmd_hunt(&params),
        _ => commands::cmd_polygon(&params),
    })
}
