//! `pcsft`: seeded experiments on Gaussian-field realizations of quantum
//! states, observables, evolutions and channels.
//!
//! Every command writes a JSON report (stdout or `--out`) and optionally a
//! flat TSV table (`--table`). Exit status is 0 when every check passes, 1
//! when a check fails and 2 for input or validation errors.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;

use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{ChannelOptions, Evolution, Sampling};
pub use crate::error::CliError;
use crate::report::Report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pcsft",
    version,
    about = "Classical random-field experiments for quantum states and channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample N(0, sigma^2 rho) and compare ensemble statistics with rho.
    Sample {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classical average of <A phi, phi> against sigma^2 Tr(rho A).
    Average {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        observable: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evolve the field under exp(-i t H / hbar) and compare with U rho U*.
    Evolve {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a Kraus block filter on independent field copies against the
    /// exact channel.
    Channel {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Skip the Monte Carlo run.
        #[arg(long)]
        exact_only: bool,
        /// Accept blocks that are not trace preserving.
        #[arg(long)]
        unchecked: bool,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check a Kraus set for completeness under both conventions.
    Validate {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Required: every run is reproducible from its seed.
    #[arg(long)]
    pub seed: u64,
}

impl From<SamplingArgs> for Sampling {
    fn from(a: SamplingArgs) -> Self {
        Sampling {
            sigma2: a.sigma2,
            n: a.n,
            seed: a.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a flat TSV table of quantities and checks.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Sample { output, .. }
            | Command::Average { output, .. }
            | Command::Evolve { output, .. }
            | Command::Channel { output, .. }
            | Command::Validate { output, .. } => output,
        }
    }
}

pub fn execute(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Sample { state, sampling, .. } => commands::sample(state, (*sampling).into()),
        Command::Average {
            state,
            observable,
            sampling,
            ..
        } => commands::average(state, observable, (*sampling).into()),
        Command::Evolve {
            state,
            hamiltonian,
            t,
            hbar,
            tol,
            sampling,
            ..
        } => commands::evolve(
            state,
            hamiltonian,
            Evolution {
                t: *t,
                hbar: *hbar,
                tol: *tol,
            },
            (*sampling).into(),
        ),
        Command::Channel {
            state,
            channel,
            tol,
            exact_only,
            unchecked,
            sampling,
            ..
        } => commands::channel(
            state,
            channel,
            ChannelOptions {
                tol: *tol,
                exact_only: *exact_only,
                unchecked: *unchecked,
            },
            (*sampling).into(),
        ),
        Command::Validate { channel, tol, .. } => commands::validate(channel, *tol),
    }
}

fn emit(report: &Report, output: &OutputArgs) -> Result<(), CliError> {
    let json = report.to_json();
    match &output.out {
        Some(path) => io::write_text(path, &json)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(json.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    if let Some(path) = &output.table {
        io::write_text(path, &report.to_table())?;
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    let outcome = execute(&cli.command).and_then(|report| {
        emit(&report, cli.command.output())?;
        Ok(report.passed())
    });
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
