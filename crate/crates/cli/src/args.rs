use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use scadenoise::denoise::{DenoiseConfig, Detector, Method};
use scadenoise::noise::NoiseKind;
use scadenoise::solvers::Sl0Params;

#[derive(Debug, Parser)]
#[command(name = "scadenoise", version, about = "Impulse-noise removal by sparse recovery in the block DCT domain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Denoise one PGM image.
    Denoise(DenoiseCmd),
    /// Sweep noise levels and methods over one image and write a CSV.
    Experiment(ExperimentCmd),
    /// Generate a synthetic test image.
    Synth(SynthCmd),
}

#[derive(Debug, Args)]
pub struct DenoiseCmd {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Clean image to report PSNR against.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentCmd {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub noise: NoiseArg,
    /// Comma-separated corruption probabilities; defaults depend on --noise.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// Comma-separated methods; defaults depend on --noise.
    #[arg(long, value_delimiter = ',', value_enum)]
    pub methods: Option<Vec<MethodArg>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
    /// Directory for noisy and denoised PGMs of every cell.
    #[arg(long)]
    pub save_images: Option<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct SynthCmd {
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = SynthKind::ZeroTail)]
    pub kind: SynthKind,
    /// Side length in pixels; must be a multiple of the block size.
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    #[arg(long, default_value_t = 8)]
    pub block_size: usize,
    #[arg(long, default_value_t = 2.0)]
    pub cr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SynthKind {
    ZeroTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum MethodArg {
    MedianOnly,
    Sca,
    SpSca,
    Combined,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::MedianOnly => Method::MedianOnly,
            MethodArg::Sca => Method::Sca,
            MethodArg::SpSca => Method::SpSca,
            MethodArg::Combined => Method::Combined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum NoiseArg {
    RandomValued,
    SaltPepper,
    Missing,
}

impl From<NoiseArg> for NoiseKind {
    fn from(k: NoiseArg) -> Self {
        match k {
            NoiseArg::RandomValued => NoiseKind::RandomValued,
            NoiseArg::SaltPepper => NoiseKind::SaltPepper,
            NoiseArg::Missing => NoiseKind::Missing,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum DetectorArg {
    SaltPepper,
    Missing,
}

/// Reconstruction settings shared by `denoise` and `experiment`.
#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Sca)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 8)]
    pub block_size: usize,
    /// Compression ratio; the first round(N²/cr) zigzag coefficients are free.
    #[arg(long, default_value_t = 2.0)]
    pub cr: f64,
    /// Impulse amplitudes at or below this (gray levels) are ignored.
    #[arg(long, default_value_t = 10.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 3)]
    pub median_window: usize,
    #[arg(long, default_value_t = 0.01)]
    pub sl0_sigma_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sl0_decrease: f64,
    #[arg(long, default_value_t = 2.0)]
    pub sl0_mu: f64,
    #[arg(long, default_value_t = 3)]
    pub sl0_inner: usize,
    /// Skip the least-squares refit after annealing.
    #[arg(long)]
    pub sl0_no_polish: bool,
    /// How sp_sca finds corrupted pixels (denoise only; experiment infers it).
    #[arg(long, value_enum, default_value_t = DetectorArg::SaltPepper)]
    pub detector: DetectorArg,
}

impl ConfigArgs {
    pub fn to_config(&self) -> DenoiseConfig {
        DenoiseConfig {
            block_size: self.block_size,
            compression_ratio: self.cr,
            sl0: Sl0Params {
                sigma_min: self.sl0_sigma_min,
                sigma_decrease: self.sl0_decrease,
                mu: self.sl0_mu,
                inner_iterations: self.sl0_inner,
                polish: !self.sl0_no_polish,
            },
            tau: self.tau,
            median_window: self.median_window,
            method: self.method.into(),
            detector: match self.detector {
                DetectorArg::SaltPepper => Detector::SaltPepper,
                DetectorArg::Missing => Detector::Missing,
            },
        }
    }
}
