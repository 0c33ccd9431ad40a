use clap::{Args, Parser, Subcommand, ValueEnum};
use epimetrics::error::{Error, Result};
use epimetrics::{NumericConfig, WeightFunction};
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "cvxlab",
    version,
    about = "Metrics lab for coercive convex functions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Evaluate one metric on a pair of function specs.
    Metric(MetricArgs),
    /// Run metrics along a sequence family and report convergence verdicts.
    Converge(ConvergeArgs),
    /// Verify an isometry spec on a corpus directory.
    Isometry(IsometryArgs),
    /// Conjugate a function spec.
    Conjugate(ConjugateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricName {
    /// Weighted L^p distance (needs full-dimensional domains).
    DeltaZetaP,
    /// p = 1 distance via the epigraph measure (cross-check route).
    DeltaZeta1Measure,
    /// Level-set integral with the bounded-penalty Hausdorff extension.
    DeltaZetaH,
    /// Conjugate sup-norm fixed point.
    DeltaConjugate,
    /// Rockafellar-Wets integrated epigraph distance.
    RwEpi,
    /// Level-set integral with the translation-invariant extension
    /// (infinite on vertical shifts).
    TildeIntegral,
}

impl MetricName {
    pub fn as_str(&self) -> &'static str {
        match self {
            MetricName::DeltaZetaP => "delta-zeta-p",
            MetricName::DeltaZeta1Measure => "delta-zeta-1-measure",
            MetricName::DeltaZetaH => "delta-zeta-h",
            MetricName::DeltaConjugate => "delta-conjugate",
            MetricName::RwEpi => "rw-epi",
            MetricName::TildeIntegral => "tilde-integral",
        }
    }
}

#[derive(Args)]
pub struct CommonArgs {
    /// Numeric configuration file (TOML or JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Weight function as JSON, e.g. '{"kind":"exponential","c":1.0}'.
    #[arg(long)]
    pub zeta: Option<String>,
    /// Seed for every randomized fallback.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the full report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write the row data as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Metric to evaluate.
    #[arg(long, value_enum)]
    pub metric: MetricName,
    /// Exponent for the weighted L^p metric.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    /// Truncation for the rho integral (rw-epi only; 0 = config default).
    #[arg(long, default_value_t = 0.0)]
    pub rho_max: f64,
    /// Function spec for u.
    pub u: PathBuf,
    /// Function spec for v.
    pub v: PathBuf,
}

#[derive(Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Sequence family name from the registry.
    #[arg(long)]
    pub family: String,
    /// Extra family definitions (JSON file) merged over the built-ins.
    #[arg(long)]
    pub families: Option<PathBuf>,
    /// Metrics to run along the family (repeatable).
    #[arg(long = "metric", value_enum, required = true)]
    pub metrics: Vec<MetricName>,
    /// Index range "a..b".
    #[arg(long, default_value = "1..64")]
    pub k_range: String,
    /// Number of schedule points (log-spaced; the final three indices are
    /// always included).
    #[arg(long, default_value_t = 12)]
    pub points: usize,
    /// Convergence tolerance for the verdicts.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Exponent for the weighted L^p metric.
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
}

#[derive(Args)]
pub struct IsometryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Isometry spec JSON: {"phi": [[..]], "x0": [..], "zeta": {..}}.
    #[arg(long)]
    pub spec: PathBuf,
    /// Directory of function spec JSON files (paired in name order).
    #[arg(long)]
    pub corpus: PathBuf,
}

#[derive(Args)]
pub struct ConjugateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Function spec to conjugate.
    pub input: PathBuf,
    /// Output path for the conjugate spec (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also biconjugate and print the sup deviation from the input.
    #[arg(long)]
    pub check_roundtrip: bool,
}

/// Optional config file: numeric settings plus default weight/tolerance.
#[derive(Default, Deserialize)]
#[serde(default)]
pub struct LabConfig {
    pub numeric: Option<NumericConfig>,
    pub zeta: Option<WeightFunction>,
}

pub fn load_config(common: &CommonArgs) -> Result<(NumericConfig, WeightFunction)> {
    let mut file_cfg = LabConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        file_cfg = if path.extension().and_then(|e| e.to_str()) == Some("toml") {
            toml::from_str(&text).map_err(|e| Error::Parse(format!("bad TOML config: {e}")))?
        } else {
            serde_json::from_str(&text)?
        };
    }
    let mut numeric = file_cfg.numeric.unwrap_or_default();
    if let Some(seed) = common.seed {
        numeric.seed = seed;
    }
    let zeta = match &common.zeta {
        Some(json) => serde_json::from_str(json)?,
        None => file_cfg
            .zeta
            .unwrap_or_else(|| WeightFunction::exponential(1.0)),
    };
    Ok((numeric, zeta))
}

pub fn parse_k_range(s: &str) -> Result<(u64, u64)> {
    let parts: Vec<&str> = s.split("..").collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("bad k range `{s}`: expected a..b")));
    }
    let a: u64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad k range start `{}`", parts[0])))?;
    let b: u64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad k range end `{}`", parts[1])))?;
    if a == 0 || b < a {
        return Err(Error::Parse(format!(
            "k range must satisfy 1 <= a <= b, got {s}"
        )));
    }
    Ok((a, b))
}
