//! Command-line surface.

use std::path::PathBuf;

use anticross::estimate::EstimatorMethod;
use anticross::metrology::MeasurementDirection;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "anticross", version, about = "Fisher information scans and estimation runs for two-level anti-crossing models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state QFI, fidelity oracle and spectrum over λ, φ or θ.
    QfiScan(QfiScanArgs),
    /// Efficiency g(x, r) over the (r1, r3) disk.
    GSurface(GSurfaceArgs),
    /// Thermal QFI split and measurement Fisher information over β.
    ThermalScan(ThermalScanArgs),
    /// Simulated estimation runs against the Cramér-Rao bounds.
    Estimate(EstimateArgs),
    /// Parse a model file and report warnings.
    ModelValidate(ModelValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Recorded in the output header; only `estimate` draws random numbers.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanVar {
    Lambda,
    /// Mixing angle of the perturbation model.
    Phi,
    /// Measurement direction `(sinθ, 0, cosθ)` at fixed λ.
    Theta,
}

#[derive(Debug, Clone, Args)]
pub struct QfiScanArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = ScanVar::Lambda)]
    pub var: ScanVar,
    /// `lo:hi`; defaults to the model domain for λ scans.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    /// Fixed λ for φ and θ scans.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Adds projective Fisher information columns for this direction.
    #[arg(long, value_parser = parse_direction)]
    pub direction: Option<MeasurementDirection>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GSurfaceArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.1,10,100")]
    pub x: Vec<f64>,
    /// Points per axis of the (r1, r3) grid.
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ThermalScanArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    /// β range `lo:hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: (f64, f64),
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    /// Logarithmic β spacing.
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_parser = parse_direction, default_value = "sigma1")]
    pub direction: MeasurementDirection,
    /// Summary JSON path; defaults to `<out>.summary.json` when `--out` is set.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_true: f64,
    #[arg(long, value_parser = parse_direction, default_value = "sigma1")]
    pub direction: MeasurementDirection,
    /// Inverse temperature; `inf` for the ground state.
    #[arg(long, default_value_t = f64::INFINITY)]
    pub beta: f64,
    /// Measurements per batch.
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 500)]
    pub batches: usize,
    #[arg(long, value_enum, default_value_t = Method::Mle)]
    pub method: Method,
    /// Search interval `lo:hi`; defaults to the model domain.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub range: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1025)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    /// Accepted for symmetry with the scans; estimates do not use it.
    #[arg(long)]
    pub steps: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Mle,
    Bayes,
}

impl From<Method> for EstimatorMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Mle => EstimatorMethod::Mle,
            Method::Bayes => EstimatorMethod::Bayes,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ModelValidateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Sample points used to look for crossings and Δ ≤ 0.
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `lo:hi` with `lo < hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("bad lower bound {a:?}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("bad upper bound {b:?}: {e}"))?;
    if !(lo < hi) {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// `sigma1`, `sigma2`, `sigma3` or three comma-separated components.
pub fn parse_direction(s: &str) -> Result<MeasurementDirection, String> {
    match s {
        "sigma1" | "x" => return Ok(MeasurementDirection::SIGMA1),
        "sigma2" | "y" => return Ok(MeasurementDirection::SIGMA2),
        "sigma3" | "z" => return Ok(MeasurementDirection::SIGMA3),
        _ => {}
    }
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad component {p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b, c] => MeasurementDirection::new(a, b, c).map_err(|e| e.to_string()),
        _ => Err(format!("expected r1,r2,r3, got {s:?}")),
    }
}
