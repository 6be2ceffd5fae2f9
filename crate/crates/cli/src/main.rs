mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "mfvmd", version, about = "MF-VMD signal decomposition and bolt echo analysis")]
struct Cli {
    /// Directory for artifacts.
    #[arg(long, global = true, env = "MFVMD_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// JSON run configuration (`"schema": 1`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Skip SVG output.
    #[arg(long, global = true)]
    no_plot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic record.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Plain VMD of a signal CSV.
    #[command(allow_negative_numbers = true)]
    Decompose(DecomposeArgs),
    /// Morphological pre-filter followed by VMD.
    #[command(allow_negative_numbers = true)]
    MfDecompose(MfDecomposeArgs),
    /// Hilbert spectrum of the (optionally pre-filtered) decomposition.
    #[command(allow_negative_numbers = true)]
    Spectrum(SpectrumArgs),
    /// Echo pick and anchor length for a bolt record.
    #[command(allow_negative_numbers = true)]
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Piecewise 10/20/10 kHz tone, 1 MHz, 2000 samples.
    Eq10,
    /// Same as eq10 with 5 dB additive noise.
    Eq10Noisy,
    /// Synthetic bolt record, 3 m at 6000 m/s.
    Bolt,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    /// Add white Gaussian noise at this SNR.
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    echo_amplitude: Option<f64>,
    #[arg(long)]
    bolt_length: Option<f64>,
    #[arg(long)]
    velocity: Option<f64>,
    /// Output CSV file name inside the output directory.
    #[arg(long, default_value = "signal.csv")]
    name: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum InitArg {
    Uniform,
    Zero,
    Random,
}

#[derive(Args, Default)]
pub struct VmdArgs {
    /// Number of modes K.
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum)]
    init: Option<InitArg>,
    /// Seed for random initialization.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Default)]
pub struct SeArgs {
    /// Flat structuring element width.
    #[arg(long, conflicts_with = "se_auto")]
    se_width: Option<usize>,
    /// Choose the width automatically up to this maximum.
    #[arg(long, value_name = "MAX_WIDTH")]
    se_auto: Option<usize>,
    /// Correlation threshold for automatic selection.
    #[arg(long, requires = "se_auto")]
    se_threshold: Option<f64>,
}

#[derive(Args)]
pub struct DecomposeArgs {
    /// Signal CSV.
    input: PathBuf,
    #[command(flatten)]
    vmd: VmdArgs,
}

#[derive(Args)]
pub struct MfDecomposeArgs {
    input: PathBuf,
    #[command(flatten)]
    vmd: VmdArgs,
    #[command(flatten)]
    se: SeArgs,
}

#[derive(Args)]
pub struct SpectrumArgs {
    input: PathBuf,
    #[command(flatten)]
    vmd: VmdArgs,
    #[command(flatten)]
    se: SeArgs,
    #[arg(long, default_value_t = 256)]
    freq_bins: usize,
    #[arg(long, default_value_t = 200)]
    time_bins: usize,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    input: PathBuf,
    #[command(flatten)]
    vmd: VmdArgs,
    #[command(flatten)]
    se: SeArgs,
    /// Wave velocity in m/s.
    #[arg(long)]
    velocity: Option<f64>,
    /// Leading interval in seconds excluded from echo picking.
    #[arg(long)]
    blank_time: Option<f64>,
    #[arg(long)]
    min_ratio: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error code={} message={:?}", e.code(), e.to_string());
            ExitCode::from(1)
        }
    }
}
