//! The `qcc` command-line tool.
//!
//! Every number on the command line may carry a unit (`10.56MHz`, `20mK`,
//! `3us`, `5e3/s`); bare numbers are natural units, or SI when the model
//! file says `"units": "si"`. Exit codes: 0 success, 2 bad input,
//! 3 numerical failure, 4 divergent result requested as a plain scalar.

mod commands;
pub mod model_file;
pub mod output;
pub mod quantity;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "qcc", version, about = "Minimum control power for open quantum systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state of a model file.
    Steady(SteadyArgs),
    /// Minimum power to hold a target state, with per-channel flows.
    Cost(CostArgs),
    /// Resolved-sideband cooling: steady state, powers and efficiency.
    Sideband(SidebandArgs),
    /// Minimum power to keep a qubit colder than its bath.
    QubitCool(QubitCoolArgs),
    /// Free-energy cost of qubit errors in a quantum computer.
    QcCost(QcCostArgs),
    /// Convergence of the finite-step reset protocol to the minimum power.
    ProtocolCheck(ProtocolArgs),
}

#[derive(Debug, Args)]
pub struct SteadyArgs {
    pub model: PathBuf,
    /// Emit CSV instead of a table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    pub model: PathBuf,
    /// `model` (the file's target_state), `gibbs:<T>`, `ground`, `mixed`,
    /// `basis:<k>` or `steady`.
    #[arg(long, default_value = "model")]
    pub target: String,
    /// Reservoir temperature; defaults to the model's reference temperature.
    #[arg(long)]
    pub temp: Option<String>,
    /// Print only the minimum power.
    #[arg(long)]
    pub scalar: bool,
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct SidebandArgs {
    /// Mechanical frequency ω.
    #[arg(long)]
    pub omega: Option<String>,
    /// Auxiliary (cavity) frequency Ω.
    #[arg(long = "Omega")]
    pub big_omega: Option<String>,
    /// Beam-splitter coupling g.
    #[arg(long)]
    pub g: Option<String>,
    /// Mechanical damping γ.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Auxiliary damping γ′.
    #[arg(long = "gamma-prime")]
    pub gamma_prime: Option<String>,
    #[arg(long)]
    pub temp: Option<String>,
    /// Start from the Teufel et al. (2011) device parameters; without
    /// `--gamma-prime` three auxiliary damping curves are produced.
    #[arg(long)]
    pub teufel: bool,
    /// `<param>:<start>:<stop>:<count>[:log]` with param `g` or `gamma-prime`.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Also solve the truncated master equation with this many Fock levels
    /// per mode.
    #[arg(long)]
    pub oracle: Option<usize>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a polyline plot here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Column to plot: `eps`, `T_eff` or `n_a`.
    #[arg(long, default_value = "eps")]
    pub plot: String,
}

#[derive(Debug, Args)]
pub struct QubitCoolArgs {
    #[arg(long = "E")]
    pub gap: String,
    #[arg(long = "T")]
    pub temp: String,
    #[arg(long = "Tc")]
    pub cold_temp: String,
    #[arg(long)]
    pub gamma: String,
    /// `full` (exact for a Gibbs target) or `approx` (deep ground state).
    #[arg(long, default_value = "full")]
    pub mode: String,
    /// Shift the qubit gap by this much through a coupled auxiliary qubit.
    #[arg(long)]
    pub strong: Option<String>,
    /// Auxiliary qubit gap; defaults to ten times the larger of E and ε.
    #[arg(long = "aux-gap")]
    pub aux_gap: Option<String>,
    #[arg(long)]
    pub scalar: bool,
}

#[derive(Debug, Args)]
pub struct QcCostArgs {
    /// Amplitude-damping rate.
    #[arg(long)]
    pub gamma: String,
    /// Depolarizing rate.
    #[arg(long)]
    pub beta: String,
    /// Gate time.
    #[arg(long)]
    pub tau: String,
    #[arg(long = "E")]
    pub gap: String,
    #[arg(long = "T")]
    pub temp: String,
    /// Number of fresh qubits the computation consumes.
    #[arg(long = "M", default_value_t = 1)]
    pub qubits: u64,
    /// Average over this many Haar-random pure states instead of the formula.
    #[arg(long = "monte-carlo")]
    pub monte_carlo: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    pub model: PathBuf,
    #[arg(long, default_value = "model")]
    pub target: String,
    #[arg(long)]
    pub temp: Option<String>,
    /// Comma-separated decreasing step sizes; defaults to five halvings
    /// from `0.01 / max rate`.
    #[arg(long, value_delimiter = ',')]
    pub dts: Option<Vec<String>>,
    #[arg(long)]
    pub csv: bool,
}

/// A failed command, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Input(String),
    Numerical(String),
    DivergentScalar(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::DivergentScalar(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::DivergentScalar(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. }
            | Error::NotHermitian { .. }
            | Error::InvalidDensityMatrix(_)
            | Error::InvalidParameter(_) => CliError::Input(e.to_string()),
            Error::Singular { .. }
            | Error::NonUniqueSteadyState
            | Error::SolverFailure(_)
            | Error::StepTooLarge { .. }
            | Error::TraceDrift { .. }
            | Error::NotSteady { .. }
            | Error::AllDivergent => CliError::Numerical(e.to_string()),
        }
    }
}

fn configure_threads() {
    let threads = std::env::var("QCC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    if let Some(n) = threads {
        // Fails only if a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    configure_threads();
    let command_line = std::iter::once("qcc".to_string())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join(" ");
    match commands::dispatch(&cli.command, &command_line) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
