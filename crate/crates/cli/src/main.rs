//! `pairsim`: reproduction driver for the pair-creation simulations.
//!
//! Subcommands and their outputs (all under `--out-dir`, default `results/`):
//!
//! - `sweep`        → `sweep.csv`, `sweep.json`: one row per (x, method);
//!   the analytic/matrix rows trace the particle-number curve, the
//!   `shots` rows its finite-sampling counterpart.
//! - `trajectory`   → `trajectory_x<x>_n<N>.csv`: fixed-basis populations
//!   through the transition with the analytic plateau as a constant column.
//! - `noise-study`  → `noise_study.json`: raw / mitigated / ZNE estimates on
//!   a synthetic device at shallow depth.
//! - `dump-schedule`, `dump-circuit`: inspection aids; stdout unless
//!   `--out-dir` is given.
//! - `verify`: fast self-checks; prints a PASS/FAIL table.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod commands;
mod output;
mod study;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::sweep::Method;

#[derive(Debug, Parser)]
#[command(
    name = "pairsim",
    version,
    about = "Trotterized simulation of cosmological pair creation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Particle number across an x grid for several methods.
    Sweep(SweepArgs),
    /// Time-resolved populations for one or more x values.
    Trajectory(TrajectoryArgs),
    /// Raw, readout-mitigated and ZNE estimates on a synthetic noisy device.
    NoiseStudy(NoiseStudyArgs),
    /// Coefficient schedule as CSV.
    DumpSchedule(DumpArgs),
    /// Synthesized gate list in the circuit text format.
    DumpCircuit(DumpArgs),
    /// Run the embedded verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct XGrid {
    /// Comma-separated x = -k·η_e values.
    #[arg(long = "x", value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, conflicts_with_all = ["x_min", "x_max", "x_points"])]
    pub x: Option<Vec<f64>>,
    /// Lower end of a log-spaced grid.
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    /// Upper end of a log-spaced grid.
    #[arg(long)]
    pub x_max: Option<f64>,
    /// Number of log-spaced points.
    #[arg(long)]
    pub x_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// JSON noise model (`readout`, `p1`, `p2`); defaults to the built-in device model.
    #[arg(long)]
    pub model_file: Option<PathBuf>,
    /// Gate-noise scale factors for zero-noise extrapolation.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [1.0, 1.5, 2.0])]
    pub factors: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub grid: XGrid,
    /// Trotter steps; per-method defaults when omitted.
    #[arg(long)]
    pub n_steps: Option<usize>,
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [Method::Analytic, Method::Matrix])]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 4096)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub grid: XGrid,
    #[arg(long, default_value_t = 2500)]
    pub n_steps: usize,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseStudyArgs {
    #[command(flatten)]
    pub grid: XGrid,
    #[arg(long, default_value_t = 1)]
    pub n_steps: usize,
    #[arg(long, default_value_t = 4096)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, default_value = "results")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[arg(long = "x", allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 1)]
    pub n_steps: usize,
    /// Write to this directory instead of stdout.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// JSON file with alternative `z`/`a` Pauli sums, e.g. to check a modified encoding.
    #[arg(long)]
    pub generators: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sweep(a) => commands::sweep(&a),
        Command::Trajectory(a) => commands::trajectory(&a),
        Command::NoiseStudy(a) => commands::noise_study(&a),
        Command::DumpSchedule(a) => commands::dump_schedule(&a),
        Command::DumpCircuit(a) => commands::dump_circuit(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
