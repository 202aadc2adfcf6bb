use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Worst-case queue lengths at a traffic light: constants, simulation and
/// recognition of closed forms.
#[derive(Debug, Parser)]
#[command(name = "tlqueue", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The constant χ_ℓ(p) of the Gumbel-type law.
    #[command(subcommand)]
    Chi(ChiCommand),
    /// Monte Carlo histogram of the maximum queue length.
    Simulate(SimulateArgs),
    /// Gumbel-type pmf of the maximum queue length.
    Predict(PredictArgs),
    /// Exact finite-n distribution of the maximum by dynamic programming.
    Exact(ExactArgs),
    /// Total variation and chi-square between a histogram and a pmf.
    Compare(CompareArgs),
    /// Recover exact algebraic forms from numbers or data.
    #[command(subcommand)]
    Recognize(RecognizeCommand),
    /// Expected maxima of all light strategies over a grid of p.
    Strategy(StrategyArgs),
    /// Static SVG charts.
    #[command(subcommand)]
    Plot(PlotCommand),
}

#[derive(Debug, Subcommand)]
pub enum ChiCommand {
    /// Closed form as a nested radical.
    Closed(ChiClosedArgs),
    /// Estimate from truncated transition matrices.
    Spectral(ChiSpectralArgs),
}

#[derive(Debug, Subcommand)]
pub enum RecognizeCommand {
    /// Minimal integer polynomial of a high-precision decimal.
    Minpoly(MinpolyArgs),
    /// Nested-radical form of a root of a quadratic or quartic.
    Radical(RadicalArgs),
    /// Integer polynomial through (x, y) points.
    Fit(FitArgs),
}

#[derive(Debug, Subcommand)]
pub enum PlotCommand {
    /// Empirical histogram with predicted pmf markers.
    Histogram(PlotHistogramArgs),
    /// Expected-maximum curves E_0..E_3 from a strategy table.
    Strategy(PlotStrategyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineArg {
    #[default]
    Auto,
    Stepwise,
    Blocked,
}

#[derive(Debug, Args, Serialize)]
pub struct ChiClosedArgs {
    /// Block length (1, 2 or 3).
    #[arg(long)]
    pub ell: u32,
    /// Arrival probability as a/b or a decimal.
    #[arg(long)]
    pub p: String,
    /// Decimal digits of the printed value.
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ChiSpectralArgs {
    #[arg(long)]
    pub ell: u32,
    /// Arrival probability as a/b (decimals are rejected).
    #[arg(long)]
    pub p: String,
    /// Largest truncation level.
    #[arg(long, default_value_t = 400)]
    pub k_max: usize,
    /// Spacing of truncation levels.
    #[arg(long, default_value_t = 10)]
    pub step: usize,
    /// Relative agreement of successive estimates counted as convergence.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Guard digits added to the working precision.
    #[arg(long, default_value_t = 60)]
    pub guard: u32,
    /// Worker threads (default: $TLQUEUE_WORKERS or 1).
    #[arg(long, env = "TLQUEUE_WORKERS", default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Block length; shorthand for --schedule block:<ell>.
    #[arg(long, conflicts_with = "schedule")]
    pub ell: Option<u32>,
    /// block:<ell>, pattern:<RG word> or random.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub p: String,
    /// Steps per run; scientific notation such as 1e6 is accepted.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, env = "TLQUEUE_WORKERS", default_value_t = 1)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t)]
    pub engine: EngineArg,
    /// Histogram CSV; the summary JSON goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub ell: u32,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExactArgs {
    #[arg(long, conflicts_with = "schedule")]
    pub ell: Option<u32>,
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub p: String,
    #[arg(long)]
    pub n: String,
    /// Use exact rational arithmetic (slow; exact rational p only).
    #[arg(long)]
    pub rational: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Histogram CSV (level,count).
    #[arg(long)]
    pub hist: PathBuf,
    /// Prediction CSV (m,cdf,pmf).
    #[arg(long)]
    pub pmf: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct MinpolyArgs {
    /// The number, as a decimal string.
    #[arg(long)]
    pub y: String,
    #[arg(long, default_value_t = 4)]
    pub max_degree: usize,
    /// Digits to use (at most those present in the input).
    #[arg(long, default_value_t = 100)]
    pub precision: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct RadicalArgs {
    /// Integer coefficients, constant term first, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Vec<String>,
    /// Square-free integer D of the field Q(√D).
    #[arg(long)]
    pub d: String,
    /// Pick the real root nearest this value (default: the largest).
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// CSV with header x,y and integer entries.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub max_degree: usize,
    /// Also try integer multipliers up to this bound.
    #[arg(long)]
    pub rescale: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct StrategyArgs {
    #[arg(long, default_value = "1e10")]
    pub n: String,
    #[arg(long, default_value_t = 0.15)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.41)]
    pub p_max: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PlotHistogramArgs {
    #[arg(long)]
    pub hist: PathBuf,
    #[arg(long)]
    pub pmf: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PlotStrategyArgs {
    /// CSV with header p,E0,E1,E2,E3.
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}
