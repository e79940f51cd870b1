use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmsnet::baseline::Kernel;
use rmsnet::harness::Objective;
use rmsnet::rms::TieRule;
use rmsnet::similarity::DistanceTransform;
use rmsnet::ErrorKind;
use serde::Serialize;

mod commands;

/// Community detection with KNN-based revised medoid shift.
#[derive(Debug, Parser)]
#[command(name = "rmsnet", version)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores). Results do
    /// not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster a graph and write the clustering as JSON.
    Detect(DetectArgs),
    /// Run a parameter sweep and write one CSV row per parameter.
    Sweep(SweepArgs),
    /// Score an existing clustering file against a graph.
    Metrics(MetricsArgs),
    /// Rewrite a graph as a canonical undirected edge list.
    Convert(ConvertArgs),
    /// Run every dataset in a manifest and compare with the published numbers.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Gml,
    Edgelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Rms,
    #[value(alias = "medoid-shift")]
    Medoidshift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Edgelist,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Graph file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Format,
    /// Treat edges as directed arcs and fold them into undirected edges.
    #[arg(long)]
    pub directed: bool,
    /// Use edge weights as similarities instead of common-neighbor counts.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TruthArgs {
    /// Ground truth as `name label` lines.
    #[arg(long, conflicts_with = "truth_attribute")]
    pub truth: Option<PathBuf>,
    /// GML node attribute holding the ground-truth community.
    #[arg(long)]
    pub truth_attribute: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MethodArgs {
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// RMS tie rule: lowest-index or prefer-self.
    #[arg(long, default_value = "lowest-index")]
    pub tie_rule: TieRule,
    /// Let nodes shift to neighbors they share no similarity with.
    #[arg(long)]
    pub shift_through_zero: bool,
    /// Give up on RMS after this many rounds (default: node count).
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Baseline similarity-to-distance transform: reciprocal or maxminus.
    #[arg(long, default_value = "reciprocal")]
    pub transform: DistanceTransform,
    /// Baseline kernel: gaussian or constant.
    #[arg(long, default_value = "gaussian")]
    pub kernel: Kernel,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    /// Neighbor count for RMS.
    #[arg(long)]
    pub k: Option<usize>,
    /// Baseline radius; `inf` for unbounded.
    #[arg(long)]
    pub radius: Option<f64>,
    #[command(flatten)]
    pub truth: TruthArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub method: MethodArgs,
    #[arg(long, requires = "k_max")]
    pub k_min: Option<usize>,
    #[arg(long, requires = "k_min")]
    pub k_max: Option<usize>,
    /// Comma-separated radii, e.g. `0,0.25,inf`.
    #[arg(long, value_delimiter = ',', conflicts_with = "radius_steps")]
    pub radii: Option<Vec<f64>>,
    /// Evenly spaced radii from 0 to the largest distance.
    #[arg(long)]
    pub radius_steps: Option<usize>,
    /// modularity or nmi.
    #[arg(long, default_value = "modularity")]
    pub objective: Objective,
    #[command(flatten)]
    pub truth: TruthArgs,
    /// Leave the wall_ms column empty so output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Clustering JSON as written by `detect`.
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub truth: TruthArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "edgelist")]
    pub to: Target,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Directory holding `manifest.json` and the dataset files.
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
    /// Write the text table here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Also write per-dataset sweep CSVs into this directory.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

/// A problem with the flags themselves, found after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<rmsnet::Error>().map(rmsnet::Error::kind) {
        Some(ErrorKind::Usage) => 1,
        Some(ErrorKind::Algorithm) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
