//! Command-line front end for `ptdoublet-core`: configuration, subcommands
//! and report files.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use cli::{Cli, Command};
use config::{RunConfig, OUT_ENV};
use error::CliError;

/// Runs one parsed command line and returns the exit code.
pub fn run(cli: &Cli, env_out: Option<&str>) -> u8 {
    match execute(cli, env_out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, env_out: Option<&str>) -> Result<u8, CliError> {
    let cfg = RunConfig::resolve(cli.command.overrides(), env_out)?;
    match &cli.command {
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Wavefunction(_) => commands::wavefunction(&cfg),
        Command::Verify(_) => commands::verify(&cfg),
        Command::ContourExport(_) => commands::contour_export(&cfg),
    }
}

/// `PTDOUBLET_OUT`, if set.
pub fn env_out() -> Option<String> {
    std::env::var(OUT_ENV).ok()
}
