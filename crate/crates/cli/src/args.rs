use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::compute::MethodChoice;
use crate::figure::FigureName;

/// Virtual photon populations of a lossy Lorentz medium. Frequencies are in
/// units of the resonance frequency omega0.
#[derive(Debug, Parser)]
#[command(name = "vacuum-census", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dielectric function at a complex frequency.
    Eps(EpsArgs),
    /// The two polariton roots at one wavevector.
    Roots(RootsArgs),
    /// Photon population N_k at one wavevector.
    Nk(NkArgs),
    /// Run a JSON sweep spec and write CSV plus a JSON sidecar.
    Sweep(SweepArgs),
    /// Write the datasets of one figure.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct MediumArgs {
    /// Coupling strength omega_c.
    #[arg(long, allow_negative_numbers = true)]
    pub wc: f64,
    /// Matter loss rate gamma_L.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gl: f64,
}

#[derive(Debug, Args)]
pub struct EpsArgs {
    #[command(flatten)]
    pub medium: MediumArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub omega: f64,
    /// Imaginary part of the frequency.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega_im: f64,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    #[command(flatten)]
    pub medium: MediumArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub ck: f64,
}

#[derive(Debug, Args)]
pub struct NkArgs {
    #[command(flatten)]
    pub medium: MediumArgs,
    /// Photonic loss rate gamma_P; selects the dual-loss engine under `auto`.
    #[arg(long, allow_negative_numbers = true)]
    pub gp: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub ck: f64,
    /// Relative tolerance of the numerical methods.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,
    /// Also evaluate closed form and quadrature and require agreement to 1e-4.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args)]
pub struct Jobs {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, env = "VACUUM_CENSUS_JOBS", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub spec: PathBuf,
    /// CSV output; the sidecar goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub jobs: Jobs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
    #[arg(long, default_value = ".")]
    pub outdir: PathBuf,
    #[command(flatten)]
    pub jobs: Jobs,
}
