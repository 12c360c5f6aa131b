use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use manifest_core::{ClusterCovariance, GeometryMode, LabelColumn, Method};

#[derive(Debug, Parser)]
#[command(
    name = "manifest",
    version,
    about = "Feature selection on the manifold of per-class feature kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score the features of a labeled CSV table.
    Score(ScoreArgs),
    /// Monte Carlo selection benchmark on XOR data with 100 binary features.
    BenchXor(BenchXorArgs),
    /// Monte Carlo selection benchmark on Gaussian clusters at hypercube vertices.
    BenchHypercube(BenchHypercubeArgs),
    /// Write leading eigenvectors of the mean and difference operators as CSV.
    DumpOperators(DumpArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV table with one row per sample.
    #[arg(long)]
    pub input: PathBuf,
    /// Label column: header name, or 0-based index.
    #[arg(long, default_value = "label")]
    pub label: LabelColumn,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Percentile of within-class feature distances used as kernel scale.
    #[arg(long, default_value_t = 50.0)]
    pub scale_percentile: f64,
    /// Multiplier applied to the percentile distance.
    #[arg(long, default_value_t = 1.0)]
    pub scale_factor: f64,
    /// Symmetric normalization passes applied to each kernel.
    #[arg(long, default_value_t = 0)]
    pub normalize_iters: usize,
    /// Always use the fixed-rank SPSD geometry.
    #[arg(long, conflicts_with = "spd_only")]
    pub force_spsd: bool,
    /// Fail instead of falling back to SPSD geometry for singular kernels.
    #[arg(long)]
    pub spd_only: bool,
}

impl KernelArgs {
    pub fn geometry(&self) -> GeometryMode {
        if self.force_spsd {
            GeometryMode::ForceSpsd
        } else if self.spd_only {
            GeometryMode::SpdOnly
        } else {
            GeometryMode::Auto
        }
    }
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Number of features to select.
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub output: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output_file: Option<PathBuf>,
    /// Include eigenvalue bound diagnostics for the top `n` eigenvectors of the first kernel.
    #[arg(long)]
    pub bounds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchCommon {
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Trial `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated subset of manifest, fisher, pearson.
    #[arg(long, value_delimiter = ',', default_value = "manifest,fisher,pearson")]
    pub methods: Vec<Method>,
    /// Omit per-trial detail from the report.
    #[arg(long)]
    pub summary_only: bool,
    #[arg(long)]
    pub output_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchXorArgs {
    #[command(flatten)]
    pub common: BenchCommon,
    #[arg(long, default_value_t = 0.1)]
    pub scale_factor: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Covariance {
    Isotropic,
    RandomLinear,
}

impl From<Covariance> for ClusterCovariance {
    fn from(c: Covariance) -> Self {
        match c {
            Covariance::Isotropic => ClusterCovariance::Isotropic,
            Covariance::RandomLinear => ClusterCovariance::RandomLinear,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchHypercubeArgs {
    #[command(flatten)]
    pub common: BenchCommon,
    /// Rows drawn from each generated dataset for scoring.
    #[arg(long, default_value_t = 50)]
    pub train_subsample: usize,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    #[arg(long, default_value_t = 0)]
    pub normalize_iters: usize,
    #[arg(long, default_value_t = 50.0)]
    pub scale_percentile: f64,
    #[arg(long, default_value_t = 2.0)]
    pub scale_factor: f64,
    /// Cluster shape around each vertex.
    #[arg(long, value_enum, default_value_t = Covariance::RandomLinear)]
    pub cluster_covariance: Covariance,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub kernel: KernelArgs,
    /// Number of leading eigenvectors written per operator.
    #[arg(long, default_value_t = 2)]
    pub top_m: usize,
    /// Output directory, created if missing.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Dataset {
    Xor,
    Hypercube,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub dataset: Dataset,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Override the number of samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Write the informative feature indices here as JSON.
    #[arg(long)]
    pub informative_file: Option<PathBuf>,
}
