use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use ifmid::commands;
use ifmid::config::{parse_n_list, BackendKey, Mode, PartialConfig, ProblemKey, ReferenceKey};

/// Integrating-factor midpoint solver for the wave benchmarks, with
/// a posteriori error estimation and adaptive step control.
#[derive(Parser, Debug)]
#[command(name = "ifmid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Uniform-step sweep: error, estimator, orders and effectivity per N
    Converge {
        #[command(flatten)]
        common: Common,
        /// Step counts, comma separated (e.g. 16,32,64)
        #[arg(long = "n-list")]
        n_list: Option<String>,
    },
    /// Tolerance-driven adaptive run with step-size trajectory
    Adapt {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tol: Option<f64>,
        /// Initial step size
        #[arg(long)]
        k0: Option<f64>,
        /// Largest allowed step size
        #[arg(long = "kmax")]
        k_max: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Flat `key = value` config file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    problem: Option<ProblemKey>,
    /// Number of interior grid points
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, value_enum)]
    backend: Option<BackendKey>,
    #[arg(long)]
    theta: Option<f64>,
    /// Solution the error is measured against
    #[arg(long, value_enum)]
    reference: Option<ReferenceKey>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            problem: self.problem,
            m: self.m,
            backend: self.backend,
            theta: self.theta,
            reference: self.reference,
            out: self.out.clone(),
            ..Default::default()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (mode, common, flags) = match cli.command {
        Command::Converge { common, n_list } => {
            let flags = PartialConfig {
                n_list: n_list.as_deref().map(parse_n_list).transpose()?,
                ..common.partial()
            };
            (Mode::Converge, common, flags)
        }
        Command::Adapt {
            common,
            tol,
            k0,
            k_max,
        } => {
            let flags = PartialConfig {
                tol,
                k0,
                k_max,
                ..common.partial()
            };
            (Mode::Adapt, common, flags)
        }
    };
    let file = match &common.config {
        Some(path) => PartialConfig::from_file(path)?,
        None => PartialConfig::default(),
    };
    let cfg = flags.over(file).resolve(mode)?;
    let written = match mode {
        Mode::Converge => commands::converge(&cfg)?,
        Mode::Adapt => commands::adapt(&cfg)?,
    };
    for f in written.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
