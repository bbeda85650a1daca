use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{BranchArg, Format, ModelKind, ProfileArg};

#[derive(Debug, Parser)]
#[command(name = "ptdoublet", version, about = "Spectra, wavefunctions and checks for the PT-symmetric Natanzon-class model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eckart levels or Natanzon doublets for N = 0..=nmax.
    Spectrum(Overrides),
    /// Samples of one closed-form state on the contour, with a JSON sidecar.
    Wavefunction(Overrides),
    /// Runs the selected checks; exits 1 if any fails.
    Verify(Overrides),
    /// The contour r(t), xi(t) and its validation figures.
    ContourExport(Overrides),
}

impl Command {
    pub fn overrides(&self) -> &Overrides {
        match self {
            Command::Spectrum(o) | Command::Wavefunction(o) | Command::Verify(o) | Command::ContourExport(o) => o,
        }
    }
}

/// Flags shared by every subcommand; unset flags fall back to the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long = "A")]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long = "C", allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long = "N")]
    pub n: Option<u32>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    #[arg(long = "T")]
    pub t_max: Option<f64>,
    /// Grid points.
    #[arg(long = "n")]
    pub points: Option<usize>,
    /// Arch amplitude for the finite-difference oracle.
    #[arg(long)]
    pub numeric_eps0: Option<f64>,
    /// Comma-separated: contour, liouville, residual, pt-defect, nodes, numeric-match, or all.
    #[arg(long)]
    pub checks: Option<String>,
    /// Natanzon energy used by the Liouville check instead of the exact one.
    #[arg(long, allow_negative_numbers = true)]
    pub ed_override: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}
