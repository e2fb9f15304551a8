use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "jointcal",
    version,
    about = "Jump-diffusion option pricing, VIX replication and joint calibration"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// JSON configuration for the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Directory for output files and the run manifest. Tables go to stdout
    /// when absent (price, iv, vix) or to the current directory (others).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Price European options under Black-Scholes, Bates or the simple jump diffusion.
    Price(PriceArgs),
    /// Black-Scholes implied volatilities of option prices.
    Iv(IvArgs),
    /// Replicated VIX term structure from a quote panel.
    Vix(VixArgs),
    /// Fit the Bates model to a surface and VIX term structure.
    Calibrate(CalibrateArgs),
    /// Run the synthetic parameter-recovery study.
    Simulate(SimulateArgs),
    /// Log-contract multiplier and VS-VIX spread series from calibration results.
    Report(ReportArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bs,
    Bates,
    Sjd,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Call,
    Put,
    /// Put below spot, call at or above.
    Otm,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MarketArgs {
    #[arg(long, default_value_t = 100.0)]
    pub spot: f64,
    /// Continuously compounded rate.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rate: f64,
    /// Continuously compounded dividend yield.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub dividend: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PriceArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Black-Scholes volatility (decimal).
    #[arg(long)]
    pub vol: Option<f64>,
    /// JSON parameter file (Bates or SJD parameters).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Fixed log jump size.
    #[arg(long, allow_hyphen_values = true)]
    pub jump: Option<f64>,
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub strikes: Vec<f64>,
    /// Maturities in years.
    #[arg(long, value_delimiter = ',', required = true)]
    pub maturities: Vec<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Otm)]
    pub kind: KindArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct IvArgs {
    /// CSV with columns strike, maturity (years), kind, price.
    #[arg(long, conflicts_with_all = ["strike", "maturity", "price"])]
    pub quotes: Option<PathBuf>,
    #[arg(long)]
    pub strike: Option<f64>,
    #[arg(long)]
    pub maturity: Option<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Otm)]
    pub kind: KindArg,
    #[arg(long)]
    pub price: Option<f64>,
    #[command(flatten)]
    pub market: MarketArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VixArgs {
    /// Quote panel CSV.
    #[arg(long)]
    pub panel: PathBuf,
    /// Also write the per-horizon mean and standard deviation across dates
    /// (the only table printed when writing to stdout).
    #[arg(long)]
    pub aggregate: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CalibrateArgs {
    /// Quote panel CSV; every trade date is calibrated.
    #[arg(long, conflicts_with_all = ["surface", "synthetic"])]
    pub panel: Option<PathBuf>,
    /// Surface JSON, used with --term-structure.
    #[arg(long, requires = "term_structure")]
    pub surface: Option<PathBuf>,
    /// Observed term-structure JSON.
    #[arg(long)]
    pub term_structure: Option<PathBuf>,
    /// Generate the market from this Bates parameter file.
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
    /// Overrides the configured alpha.
    #[arg(long, conflicts_with = "alpha_sweep")]
    pub alpha: Option<f64>,
    /// Calibrate once per listed alpha.
    #[arg(long, value_delimiter = ',')]
    pub alpha_sweep: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    /// Study specification JSON (same as --config).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n_draws: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ReportArgs {
    /// Directory of calibration result JSON files.
    #[arg(long)]
    pub results_dir: PathBuf,
    #[arg(long, default_value_t = jointcal::report::MOVING_AVERAGE_WINDOW)]
    pub window: usize,
}
