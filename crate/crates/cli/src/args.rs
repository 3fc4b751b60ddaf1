use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "critspin", version, about = "Exact laws and limit theorems for critical spin magnetizations")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Output file. Defaults to `$CRITSPIN_OUT_DIR/<command>.<format>` when
    /// that variable is set, and to standard output otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampling; recorded in every output header.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact cumulant polynomials, Q(r), and checks against exact laws.
    Cumulants(CumulantsArgs),
    /// Distance of the tilted law to its limit along a ladder of sizes.
    LimitLaw(LimitLawArgs),
    /// Kolmogorov rate certificates for the critical Curie-Weiss model.
    Rate(RateArgs),
    /// Local limit check for the critical Curie-Weiss magnetization.
    LocalLimit(LocalLimitArgs),
    /// Exact tails against the precise-deviation estimate.
    Deviations(DeviationsArgs),
    /// The residue on a grid next to its limit.
    Residue(ResidueArgs),
    /// One exact sample of a spin configuration.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Curie-Weiss.
    Cw,
    /// One-dimensional Ising chain.
    Ising,
    /// Ising chain with an extra mean-field coupling.
    Mixed,
    /// Nearest-neighbour walk.
    Walk,
    /// Independent spins.
    Iid,
}

/// Integer that may be written as `1000000` or `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

#[derive(Debug, Args, Serialize)]
#[group(required = true, multiple = false, id = "what")]
pub struct CumulantsMode {
    /// Emit the numerator polynomial P_r of the 2r-th cumulant estimate.
    #[arg(long)]
    pub r: Option<usize>,
    /// Emit Q(1), ..., Q(q) by both enumeration routes.
    #[arg(long)]
    pub q: Option<usize>,
    /// Emit the joint cumulant polynomial of the spins at these sites.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub indices: Option<Vec<u64>>,
    /// Compare cumulants from the joint-cumulant expansion with those of the exact law.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CumulantsArgs {
    #[command(flatten)]
    pub mode: CumulantsMode,
    /// Chain length for `--verify`.
    #[arg(long, default_value_t = 12, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Highest even order checked by `--verify`.
    #[arg(long, default_value_t = 6)]
    pub max_order: usize,
    /// With `--r`: chain lengths at which to set |κ_2r|/n next to the estimate.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, requires = "r")]
    pub ladder: Option<Vec<u64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitLawArgs {
    #[arg(long, value_enum, default_value_t = Model::Cw)]
    pub model: Model,
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub ladder: Option<Vec<u64>>,
    /// Largest size; the ladder is then n/4, n/2, n.
    #[arg(long, value_parser = parse_count)]
    pub n: Option<u64>,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.3)]
    pub beta: f64,
    /// Mean-field coupling of the mixed model; defaults to e^{-2β}, the critical value.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RateArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_count, default_value = "100,400,1600,10000,100000")]
    pub ladder: Vec<u64>,
    /// Half-width of the strip used for the Fourier decay.
    #[arg(long, default_value_t = 0.77)]
    pub b: f64,
    /// Width of the smoothing kernel.
    #[arg(long = "D", default_value_t = 0.77)]
    #[serde(rename = "D")]
    pub d: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct LocalLimitArgs {
    /// Largest size; the ladder is then n/100, n/10, n.
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub ladder: Option<Vec<u64>>,
    /// Closed interval `a,b`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, default_value = "0,1")]
    pub interval: Vec<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DeviationsArgs {
    #[arg(long, value_enum, default_value_t = Model::Iid)]
    pub model: Model,
    #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// Deviation level on the scale of t_n.
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, value_delimiter = ',', value_parser = parse_count, default_value = "10000,100000,1000000")]
    pub ladder: Vec<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ResidueArgs {
    #[arg(long, value_enum, default_value_t = Model::Ising)]
    pub model: Model,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 10_000, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum, default_value_t = Model::Ising)]
    pub model: Model,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 100, value_parser = parse_count)]
    pub n: u64,
}
