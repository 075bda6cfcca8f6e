// `!(x > 0.0)` is meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use config::{Mode, RunConfig, Settings};

/// Exact Rydberg-ring dynamics in the symmetric sector.
#[derive(Parser)]
#[command(name = "rydring", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the size of the symmetric bases.
    Basis(Common),
    /// Evolve the vacuum and write the observable series and summary.
    Evolve(Common),
    /// Compare the perfect-blockade and effective dynamics at finite delta.
    Compare(Common),
    /// Density of states and interaction manifolds.
    Spectrum(Common),
    /// Coupling graph of the perfect-blockade Hamiltonian as DOT.
    Graph(Common),
    /// Check the symmetric-basis run against the full-space oracle.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file with settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (mode, common) = match Cli::parse().command {
        Command::Basis(c) => (Mode::Basis, c),
        Command::Evolve(c) => (Mode::Evolve, c),
        Command::Compare(c) => (Mode::Compare, c),
        Command::Spectrum(c) => (Mode::Spectrum, c),
        Command::Graph(c) => (Mode::Graph, c),
        Command::Verify(c) => (Mode::Verify, c),
    };
    let result = RunConfig::resolve(mode, common.settings, common.config.as_deref())
        .and_then(|config| commands::run(&config));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rydring: {e}");
            e.exit_code()
        }
    }
}
