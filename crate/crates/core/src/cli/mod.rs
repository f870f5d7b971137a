//! Command-line front end. Exit codes: 0 success, 2 configuration or usage
//! error, 3 numerical failure, 4 inconclusive verdict.

pub mod commands;
pub mod config;
pub mod csv;
pub mod store;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{ConfigError, ConfigErrorKind, RunConfig};
pub use store::{ResultStore, StoreError};

use crate::experiments::Scenario;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Store(#[from] StoreError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] crate::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) | CliError::Store(StoreError::HashMismatch { .. }) | CliError::Store(StoreError::Malformed { .. }) => EXIT_CONFIG,
            CliError::Store(StoreError::Io { .. }) | CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fewbody", version, about = "Two- and three-body threshold spectra")]
struct Cli {
    /// Run configuration (INI).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides `numerics.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides `numerics.tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-pair Birman-Schwinger quantities.
    TwoBody {
        #[command(subcommand)]
        op: TwoBodyOp,
    },
    /// Three-body solvers and scenarios.
    ThreeBody {
        #[command(subcommand)]
        op: ThreeBodyOp,
    },
    /// Operator inequalities and closed-form checks.
    Checks {
        #[command(subcommand)]
        op: ChecksOp,
    },
    /// Parse, validate and echo the configuration with its hash.
    ValidateConfig,
}

#[derive(Debug, Subcommand)]
enum TwoBodyOp {
    Threshold,
    MuCurve,
    Classify,
    WProbe,
}

#[derive(Debug, Subcommand)]
enum ThreeBodyOp {
    Ground,
    Sweep {
        /// Append-only record file; completed points are skipped on rerun.
        #[arg(long)]
        store: Option<PathBuf>,
    },
    Dichotomy {
        /// `no-pair-resonance` or `pair-resonance`; overrides the config.
        #[arg(long)]
        scenario: Option<String>,
    },
    Efimov,
    Theta0,
    BsRadius,
    CrossValidate,
}

#[derive(Debug, Subcommand)]
enum ChecksOp {
    Bounds,
    Green6,
    Jlog,
    Merkuriev,
}

fn load(cli: &Cli, required: bool) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::parse_file(p)?,
        None if required => return Err(CliError::Usage("--config is required".into())),
        None => RunConfig::default(),
    };
    cfg.apply_overrides(cli.seed, cli.tol)?;
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<commands::Outcome, CliError> {
    use commands::*;
    let needs_model = !matches!(cli.command, Command::Checks { op: ChecksOp::Green6 | ChecksOp::Merkuriev });
    let cfg = load(cli, needs_model)?;
    eprintln!("config hash {}", cfg.hash());
    match &cli.command {
        Command::TwoBody { op } => match op {
            TwoBodyOp::Threshold => two_body_threshold(&cfg),
            TwoBodyOp::MuCurve => two_body_mu_curve(&cfg),
            TwoBodyOp::Classify => two_body_classify(&cfg),
            TwoBodyOp::WProbe => two_body_w_probe(&cfg),
        },
        Command::ThreeBody { op } => match op {
            ThreeBodyOp::Ground => three_body_ground(&cfg),
            ThreeBodyOp::Sweep { store } => three_body_sweep(&cfg, store.as_deref()),
            ThreeBodyOp::Dichotomy { scenario } => {
                let sc = match scenario {
                    Some(s) => Some(Scenario::parse(s).ok_or_else(|| CliError::Usage(format!("unknown scenario `{s}`")))?),
                    None => None,
                };
                three_body_dichotomy(&cfg, sc)
            }
            ThreeBodyOp::Efimov => three_body_efimov(&cfg),
            ThreeBodyOp::Theta0 => three_body_theta0(&cfg),
            ThreeBodyOp::BsRadius => three_body_bs_radius(&cfg),
            ThreeBodyOp::CrossValidate => three_body_cross_validate(&cfg),
        },
        Command::Checks { op } => match op {
            ChecksOp::Bounds => checks_bounds(&cfg),
            ChecksOp::Green6 => checks_green6(&cfg),
            ChecksOp::Jlog => checks_jlog(&cfg),
            ChecksOp::Merkuriev => checks_merkuriev(&cfg),
        },
        Command::ValidateConfig => {
            let mut t = csv::Table::new(&["key", "value"]);
            let mut section = "";
            for line in cfg.echo().lines() {
                match line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                    Some(s) => section = s,
                    None => {
                        let (k, v) = line.split_once(" = ").unwrap_or((line, ""));
                        t.push(vec![format!("{section}.{k}"), v.into()]);
                    }
                }
            }
            t.push(vec!["hash".into(), cfg.hash()]);
            Ok(t.into())
        }
    }
}

fn emit(cli: &Cli, out: &commands::Outcome) -> Result<(), CliError> {
    match &cli.out {
        Some(p) => std::fs::write(p, out.table.to_bytes())?,
        None => {
            let mut so = std::io::stdout().lock();
            out.table.write_to(&mut so)?;
            so.flush()?;
        }
    }
    for n in &out.notes {
        eprintln!("{n}");
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit status.
pub fn run_command(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let run = || dispatch(&cli).and_then(|o| emit(&cli, &o).map(|_| o.inconclusive));
    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(CliError::Usage(format!("thread pool: {e}"))),
        },
        None => run(),
    };
    match result {
        Ok(false) => EXIT_OK,
        Ok(true) => EXIT_INCONCLUSIVE,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
