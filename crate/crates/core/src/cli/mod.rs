//! Command-line front end: JSON run configurations with dotted overrides,
//! atomic artifact output and exit codes `0` pass, `1` criterion failed,
//! `2` invalid input, `3` numerical failure.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use config::{load_config, LoadedConfig, RunConfig, CONSTANTS_ENV};

use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "nscert", version, about = "Spectral Navier-Stokes toolkit with regularity certificates")]
#[command(after_help = "Any config value can be overridden with --dotted.key=value anywhere on the command line.")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to `output.dir` of the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimates missing Sobolev constants and writes the table and bundle.
    EstimateConstants(Common),
    /// Integrates the Galerkin system and exports diagnostics.
    Simulate(Common),
    /// Evaluates one criterion and writes its certificate.
    #[command(subcommand)]
    Certify(CertifyCommand),
    /// Prints Sobolev norms of a snapshot file.
    Norms {
        snapshot: PathBuf,
        /// Orders `s` of `|u|_{s,L}`.
        #[arg(long = "s", default_values_t = vec![0.0, 0.5, 1.0], allow_negative_numbers = true)]
        orders: Vec<f64>,
        /// Also print the `L^p` norm.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Merges certificate files into one report with an index CSV.
    Report {
        files: Vec<PathBuf>,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CertifyCommand {
    /// Small-data condition.
    Small(Common),
    /// Proximity conditions and the closeness estimate.
    Stability(Common),
    /// Caloric lower bound on the lifetime.
    Caloric(Common),
    /// A-posteriori condition over a truncation schedule.
    Aposteriori(Common),
}

/// Dotted `--a.b=value` arguments are config overrides, everything else goes to clap.
fn split_overrides(args: Vec<OsString>) -> (Vec<OsString>, Vec<String>) {
    let mut rest = Vec::new();
    let mut overrides = Vec::new();
    for a in args {
        match a.to_str() {
            Some(s) if s.starts_with("--") && s.split_once('=').is_some_and(|(k, _)| k.contains('.')) => {
                overrides.push(s.to_string())
            }
            _ => rest.push(a),
        }
    }
    (rest, overrides)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) => 3,
        _ => 2,
    }
}

fn dispatch(cli: Cli, overrides: Vec<String>) -> crate::Result<Outcome> {
    let with = |c: Common, f: fn(&mut commands::Context) -> crate::Result<Outcome>| {
        let loaded = load_config(c.config.as_deref(), &overrides)?;
        let mut ctx = commands::Context::new(loaded, c.out)?;
        f(&mut ctx)
    };
    match cli.command {
        Command::EstimateConstants(c) => with(c, commands::estimate_constants),
        Command::Simulate(c) => with(c, commands::simulate),
        Command::Certify(CertifyCommand::Small(c)) => with(c, commands::certify_small),
        Command::Certify(CertifyCommand::Stability(c)) => with(c, commands::certify_stability),
        Command::Certify(CertifyCommand::Caloric(c)) => with(c, commands::certify_caloric),
        Command::Certify(CertifyCommand::Aposteriori(c)) => with(c, commands::certify_aposteriori),
        Command::Norms { snapshot, orders, p } => commands::norms(&snapshot, &orders, p),
        Command::Report { files, out } => commands::report(&files, &out),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let (rest, overrides) = split_overrides(args.into_iter().map(Into::into).collect());
    let cli = match Cli::try_parse_from(rest) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli, overrides) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
