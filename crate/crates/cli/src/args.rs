use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "spinphase", version, about = "Noncyclic phase of precessing spin-1/2 states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Continuously tracked phase curves with visibility and jump events
    Curve(CurveArgs),
    /// Difference observable for a polar angle and its mirror, with their sum
    Critique(CritiqueArgs),
    /// Precession angles where the overlap vanishes
    Singularities(SingularitiesArgs),
    /// Scaling-law residual maps for partially polarized beams
    MixedCheck(MixedCheckArgs),
    /// Simulated interferometer run with fitted fringe phases
    Interfere(InterfereArgs),
}

#[derive(Args, Debug, Clone, serde::Serialize)]
pub struct Common {
    /// Polar angles in degrees, comma separated
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub theta_deg: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi_min_deg: f64,
    #[arg(long, default_value_t = 720.0, allow_negative_numbers = true)]
    pub phi_max_deg: f64,
    /// Grid intervals between phi-min and phi-max
    #[arg(long, default_value_t = 720)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Visibility below which the phase is undefined
    #[arg(long, default_value_t = 1e-9)]
    pub tol_orth: f64,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct CritiqueArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct SingularitiesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct MixedCheckArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Degrees of polarization in (0, 1], comma separated
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    pub p: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Law::Linear)]
    pub law: Law,
}

#[derive(Args, Debug, serde::Serialize)]
pub struct InterfereArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    /// Degree of polarization in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Mean count scale per fringe
    #[arg(long, default_value_t = 1e4)]
    pub mean_count: f64,
    /// Random seed for Poisson noise; without it the fringes are noiseless
    #[arg(long)]
    pub seed: Option<u64>,
    /// Analyzer settings per fringe
    #[arg(long, default_value_t = 16)]
    pub chi_count: usize,
    /// Visibility must exceed this many standard errors to define a phase
    #[arg(long, default_value_t = 3.0)]
    pub k_sigma: f64,
    #[arg(long, value_enum, default_value_t = Mode::Direct)]
    pub mode: Mode,
    /// Fail on a step-size violation instead of recording an unresolved jump
    #[arg(long)]
    pub strict: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Law {
    Linear,
    Tangent,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    Difference,
}
