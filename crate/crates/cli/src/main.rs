//! `qsearch`: run the three quantum search algorithms on exact simulation
//! engines, dump schedules, sweep parameters, and verify the numeric claims.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 run failure,
//! 4 verification failure.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qsearch",
    version,
    about = "Quantum search by Grover iterations, Hamiltonian evolution and local adiabatic evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write the per-step trajectory as CSV.
    Run(RunArgs),
    /// Dump the adiabatic schedule (angles, energies, gap) on an s-grid.
    Schedule(ScheduleArgs),
    /// Run one algorithm across an axis of values and aggregate results.
    Sweep(SweepArgs),
    /// Run the verification checks and report PASS/FAIL per check.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Algorithm: grover | analog | adiabatic.
    #[arg(long)]
    alg: String,
    /// Search register size n (database size N = 2^n).
    #[arg(long, value_name = "N_QUBITS")]
    n_qubits: u32,
    /// Marked basis index, or `random:<seed>` for a seeded draw.
    #[arg(long, default_value = "random:7")]
    marked: String,
    /// Target error parameter; required for analog and adiabatic.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Step-count override replacing the algorithm's default.
    #[arg(long)]
    steps: Option<u64>,
    /// Engine: statevector | gates | twolevel.
    #[arg(long, default_value = "statevector")]
    engine: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Sample the final state this many times and append the histogram.
    #[arg(long)]
    shots: Option<u64>,
    /// Seed for the measurement sampler.
    #[arg(long, default_value_t = 1)]
    shot_seed: u64,
    /// Write the full gate program (one gate per line) to this path.
    #[arg(long, value_name = "PATH")]
    emit_gates: Option<std::path::PathBuf>,
    /// Write the step plan (j,s,dt0,dtf) to this path.
    #[arg(long, value_name = "PATH")]
    emit_plan: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    /// Register size n (sets N = 2^n); alternative to --n-states.
    #[arg(long, conflicts_with = "n_states")]
    n_qubits: Option<u32>,
    /// Database size N as a real number >= 2.
    #[arg(long)]
    n_states: Option<f64>,
    /// Target error parameter of the schedule.
    #[arg(long)]
    epsilon: f64,
    /// Number of grid points in s.
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Also dump the R-step staircase approximation.
    #[arg(long)]
    steps: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Path for the staircase CSV (defaults to `<out>.staircase.csv`).
    #[arg(long)]
    staircase_out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep axis: R | N | epsilon.
    #[arg(long)]
    axis: String,
    /// Comma-separated, strictly increasing axis values.
    #[arg(long)]
    values: String,
    /// Algorithm: grover | analog | adiabatic.
    #[arg(long)]
    alg: String,
    /// Register size n; fixed parameter unless the axis is N.
    #[arg(long)]
    n_qubits: Option<u32>,
    /// Error parameter; fixed unless the axis is epsilon.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Engine: statevector | gates | twolevel.
    #[arg(long, default_value = "statevector")]
    engine: String,
    /// Repetitions per axis value (marked index redrawn per repetition).
    #[arg(long, default_value_t = 1)]
    reps: u32,
    /// Base seed for the marked-index draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; QSEARCH_THREADS env is used when the flag is absent,
    /// and the available parallelism when both are.
    #[arg(long)]
    threads: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// fast: library invariants; full: adds dense propagator probes.
    #[arg(long, default_value = "fast")]
    level: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => commands::run(args),
        Command::Schedule(args) => commands::schedule(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Verify(args) => commands::verify(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(err.exit_code())
        }
    }
}
