use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Libration-point dynamics of the Hill problem: analytic reduction,
/// orbit synthesis, correction and continuation.
#[derive(Debug, Parser)]
#[command(name = "hill-libration", version)]
pub struct Cli {
    /// Output format (defaults depend on the command).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// `key = value` file with tolerances and step controls.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Model constants, bifurcation thresholds and a consistency audit.
    Constants,
    /// Exact rational coefficient tables of the normal-form chain.
    Tables,
    /// Equilibria of the reduced flow on the sphere.
    Equilibria {
        #[arg(long = "L", allow_negative_numbers = true)]
        lp: f64,
    },
    /// Level curves of the reduced Hamiltonian.
    Sphere {
        #[arg(long = "L", allow_negative_numbers = true)]
        lp: f64,
        /// Energy level, or `auto` for a grid through every equilibrium energy.
        #[arg(long = "h", default_value = "auto", allow_negative_numbers = true)]
        h: String,
        /// Nodes along I1 per level.
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Analytic orbit in the original coordinates.
    Orbit {
        #[arg(long)]
        family: String,
        #[arg(long = "L", allow_negative_numbers = true)]
        lp: f64,
        /// Mean anomaly of the emitted initial condition (default: recommended seed phase).
        #[arg(long, allow_negative_numbers = true)]
        phase: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Numerical propagation of the Hill equations.
    Propagate {
        /// JSON file, or six comma-separated numbers.
        #[arg(long, allow_hyphen_values = true)]
        ic: String,
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        tol: Option<f64>,
        /// Equispaced output samples.
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Differential correction to a periodic orbit.
    Correct {
        #[arg(long, allow_hyphen_values = true)]
        ic: String,
        /// Period guess; taken from the document when omitted.
        #[arg(long = "T", allow_negative_numbers = true)]
        period: Option<f64>,
        /// Target energy (default: keep the energy of the seed).
        #[arg(long, allow_negative_numbers = true, conflicts_with = "fixed_period")]
        energy: Option<f64>,
        /// Hold the period fixed instead of the energy.
        #[arg(long)]
        fixed_period: bool,
        #[arg(long, value_enum, default_value_t = SymmetryArg::Auto)]
        symmetry: SymmetryArg,
    },
    /// Pseudo-arclength continuation of a family from a start orbit.
    Family {
        /// Orbit JSON (as written by `orbit` or `correct`).
        #[arg(long)]
        start: PathBuf,
        #[arg(long, default_value_t = 50)]
        members: usize,
        /// Continue towards decreasing energy.
        #[arg(long)]
        descending: bool,
        /// Stop after passing this energy.
        #[arg(long, allow_negative_numbers = true)]
        energy_limit: Option<f64>,
        #[arg(long, value_enum, default_value_t = SymmetryArg::Auto)]
        symmetry: SymmetryArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SymmetryArg {
    Auto,
    Off,
    Force,
}

/// 2 for invalid input, 3 for numerical failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<hill_libration::Error>() {
        Some(e) if e.is_numerical() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
