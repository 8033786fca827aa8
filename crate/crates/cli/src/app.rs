//! Command-line front end: argument parsing, config loading with located
//! error messages, and output handling.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::config::{self, ConfigError, Experiment, Overrides};
use crate::experiments::{self, Report, RunError};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "temporal-hierarchy",
    version,
    about = "Temporal quantum correlation experiments"
)]
pub struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// TOML experiment file.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV destination; overrides `output`. Standard output when neither is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of grid points; overrides `grid.points`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Channel rate; overrides `channel.rate`.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Qubit 1-2 coupling; overrides `causal.j`.
    #[arg(long = "J")]
    pub j: Option<f64>,
    /// Qubit 3-1 coupling; overrides `causal.j31`.
    #[arg(long = "J31")]
    pub j31: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Solver(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        Self::Solver(e.to_string())
    }
}

/// `path:line: key: message`, or the flag that supplied the value.
fn describe(err: &ConfigError, src: &str, path: &Path, ov: &Overrides) -> String {
    if let Some(flag) = ov.flag_for(&err.key) {
        return format!("{flag}: {}", err.message);
    }
    match config::locate(src, &err.key) {
        Some(line) => format!("{}:{line}: {err}", path.display()),
        None => format!("{}: {err}", path.display()),
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary");
    PathBuf::from(name)
}

/// Loads, validates and runs. The CSV goes to the output path (or stdout)
/// and the summary line to stdout, or to stderr when stdout carries CSV.
pub fn run_cli(args: &Args) -> Result<Report, CliError> {
    let src = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = config::parse(&src).map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let ov = Overrides {
        out: args.out.clone(),
        points: args.points,
        gamma: args.gamma,
        j: args.j,
        j31: args.j31,
    };
    let plan = cfg
        .apply(&ov, args.experiment)
        .and_then(|()| config::validate(&cfg, args.experiment))
        .map_err(|e| CliError::Config(describe(&e, &src, &args.config, &ov)))?;

    let report = experiments::run(&plan)?;
    let csv = report.table.to_csv();
    match &cfg.output {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let sidecar = summary_path(path);
            fs::write(&sidecar, format!("{}\n", report.summary))
                .map_err(|e| CliError::Io(format!("{}: {e}", sidecar.display())))?;
            println!("{}", report.summary);
        }
        None => {
            std::io::stdout()
                .write_all(csv.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))?;
            eprintln!("{}", report.summary);
        }
    }
    Ok(report)
}
