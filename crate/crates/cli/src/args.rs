use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nonclass", version, about = "Nonclassicality tests for bosonic states under thermal-loss noise")]
pub struct Cli {
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
    /// Largest thermal photon number that still permits nonclassicality.
    Threshold(ThresholdArgs),
    /// s-parameterized distribution (or noisy P-function) on a disk grid.
    Pfunc(PfuncArgs),
    /// Gaussian witness means, clean and after a thermal-loss channel.
    Witness(WitnessArgs),
    /// Simulated unbalanced-homodyne counts and the reconstruction series.
    Homodyne(HomodyneArgs),
    /// Discrete Bochner test on a set of phase-space points.
    Bochner(BochnerArgs),
}

impl Command {
    pub fn format(&self) -> Option<Format> {
        match self {
            Command::Threshold(a) => Some(a.out.format.unwrap_or(Format::Json)),
            Command::Pfunc(a) => Some(a.out.format.unwrap_or(Format::Csv)),
            Command::Witness(a) => Some(a.out.format.unwrap_or(Format::Json)),
            Command::Homodyne(a) => Some(a.out.format.unwrap_or(Format::Json)),
            Command::Bochner(a) => Some(a.out.format.unwrap_or(Format::Json)),
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// State spec as a JSON file path or inline JSON.
    #[arg(long)]
    pub state: String,
}

#[derive(Debug, Args)]
pub struct ChannelArgs {
    /// Channel transmissivity.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Thermal photons of the environment.
    #[arg(long)]
    pub nbar: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GammaArgs {
    /// Witness center, real part.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma_re: f64,
    /// Witness center, imaginary part.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma_im: f64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub eta: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PfuncArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Ordering parameter; defaults to 1 (the P-function) when a channel is given.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Grid center.
    #[command(flatten)]
    pub gamma: GammaArgs,
    #[arg(long, default_value_t = 2.0)]
    pub grid_radius: f64,
    #[arg(long, default_value_t = 0.1)]
    pub grid_step: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Witness width a^2.
    #[arg(long)]
    pub a2: f64,
    /// Witness center.
    #[command(flatten)]
    pub gamma: GammaArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct HomodyneArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Witness width a^2.
    #[arg(long)]
    pub a2: f64,
    /// Local-oscillator displacement.
    #[command(flatten)]
    pub gamma: GammaArgs,
    /// Detector efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta_h: f64,
    /// Number of simulated detection events.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Seed for the shot sampler.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BochnerArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// JSON array of {"re": .., "im": ..} points.
    #[arg(long)]
    pub points: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}
