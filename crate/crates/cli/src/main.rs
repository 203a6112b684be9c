use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod settings;

use commands::*;

#[derive(Parser, Debug)]
#[command(
    name = "honeycomb",
    version,
    about = "Oscillatory associative memory on honeycomb Kuramoto networks"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    pub(crate) config: Option<PathBuf>,
    /// Write the main result here instead of stdout.
    #[arg(long, short, global = true)]
    pub(crate) out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the number of storable patterns N_eq, node count n and C = N_eq/n.
    Capacity(CapacityArgs),
    /// Write the phase-locked configuration stored at memory index s.
    Encode(EncodeArgs),
    /// Read a phase file and print the memory index it stores.
    Decode(DecodeArgs),
    /// Monte-Carlo retrieval success versus perturbation magnitude.
    BasinSweep(SweepArgs),
    /// Relax random states and classify every equilibrium reached.
    EnumerateStable(EnumerateArgs),
    /// Certify the quadratic Lyapunov basin of the two-pentagon splay state.
    Lyapunov(LyapunovArgs),
    /// Simulate coupled CDW relaxation oscillators on a honeycomb.
    Cdw(CdwArgs),
    /// Integrate the phase dynamics and dump the trajectory as CSV.
    Simulate(SimulateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let result = match cli.command {
        Command::Capacity(a) => capacity(c, a),
        Command::Encode(a) => encode(c, a),
        Command::Decode(a) => decode(c, a),
        Command::BasinSweep(a) => basin_sweep(c, a),
        Command::EnumerateStable(a) => enumerate_stable(c, a),
        Command::Lyapunov(a) => lyapunov(c, a),
        Command::Cdw(a) => cdw(c, a),
        Command::Simulate(a) => simulate(c, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
