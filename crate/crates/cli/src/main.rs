//! `graphcoreset`: generate graphs, select coresets, run baselines and
//! experiments, evaluate estimates, and replay recorded runs.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] graphcoreset::Error),
    #[error("{0}")]
    Usage(String),
    #[error("replay mismatch: {0}")]
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use graphcoreset::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Io { .. }) => 3,
            CliError::Core(E::Numerical(_)) | CliError::Mismatch(_) => 4,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "graphcoreset", version, about = "Cost-aware greedy coreset selection on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic graph or point cloud.
    Generate(GenerateArgs),
    /// Select a weighted coreset with the greedy geodesic optimizer.
    Select(SelectArgs),
    /// Select vertices with a reference method.
    Baseline(BaselineArgs),
    /// Run an experiment family and write comparison CSVs.
    Experiment(ExperimentArgs),
    /// Evaluate a coreset's mean estimate of a vertex function.
    Eval(EvalArgs),
    /// Re-run a recorded command and check its outputs are unchanged.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Sbm,
    PowerlawTree,
    Random,
    GaussianMixture,
    KnnKernel,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Block sizes (sbm).
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<usize>>,
    #[arg(long)]
    pub p_in: Option<f64>,
    #[arg(long)]
    pub p_out: Option<f64>,
    /// Vertex or point count (powerlaw-tree, random, gaussian-mixture).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 3.0)]
    pub exponent: f64,
    /// Edge probability (random).
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub max_attempts: usize,
    /// Component means, `;` between components and `,` between coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub means: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Point cloud CSV (knn-kernel).
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub knn: usize,
    #[arg(long, default_value_t = 1.0)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GraphInput {
    /// Graph JSON, or an edge list for any other extension.
    #[arg(long)]
    pub graph: PathBuf,
    /// Read a third weight column from edge lists.
    #[arg(long)]
    pub weighted: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CostInput {
    /// Whitespace-separated per-vertex costs.
    #[arg(long, conflicts_with = "uniform_costs")]
    pub costs: Option<PathBuf>,
    /// Draw costs uniformly from [0, 1) with this seed.
    #[arg(long)]
    pub uniform_costs: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SelectArgs {
    #[command(flatten)]
    pub input: GraphInput,
    #[command(flatten)]
    pub cost: CostInput,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Stop once the residual falls to this level.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Iteration cap (defaults to K).
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Also write the column norms of P^ell as CSV.
    #[arg(long)]
    pub norms_csv: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Random,
    Kmeans,
    Spectral,
    Betweenness,
}

#[derive(Debug, Args, Serialize)]
pub struct BaselineArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub weighted: bool,
    /// Point cloud CSV (kmeans, or random).
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub cost: CostInput,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    ClusterIndicator,
    SbmIndicator,
    ShortestPath,
    EgoCentrality,
    EllSweep,
}

impl ExperimentName {
    pub fn key(self) -> &'static str {
        match self {
            ExperimentName::ClusterIndicator => "cluster-indicator",
            ExperimentName::SbmIndicator => "sbm-indicator",
            ExperimentName::ShortestPath => "shortest-path",
            ExperimentName::EgoCentrality => "ego-centrality",
            ExperimentName::EllSweep => "ell-sweep",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub name: ExperimentName,
    /// TOML file with one table per experiment name.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(short, long = "output-dir")]
    pub output_dir: PathBuf,
    /// Record wall-clock runtimes (outputs are then no longer reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub overrides: config::Overrides,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub coreset: PathBuf,
    #[command(flatten)]
    pub input: GraphInput,
    /// `indicator:LABEL`, `avg-distance`, `values:PATH` or `plambda:LAMBDA:SEED`.
    #[arg(long)]
    pub function: String,
    /// Point cloud CSV supplying labels for `indicator:`.
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("GRAPHCORESET_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("GRAPHCORESET_THREADS must be a positive integer, got `{raw}`")))?;
    // fails only if a pool already exists, e.g. on replay
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

pub fn dispatch(args: Vec<String>) -> Result<(), CliError> {
    let cli = Cli::try_parse_from(std::iter::once("graphcoreset".to_string()).chain(args.iter().cloned()))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    match cli.command {
        Command::Generate(a) => commands::generate(&a, args),
        Command::Select(a) => commands::select(&a, args),
        Command::Baseline(a) => commands::baseline(&a, args),
        Command::Experiment(a) => commands::experiment(&a, args),
        Command::Eval(a) => commands::eval(&a, args),
        Command::Replay(a) => commands::replay(&a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Err(e) = Cli::try_parse_from(std::iter::once("graphcoreset".to_string()).chain(args.iter().cloned())) {
        let _ = e.print();
        return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
    }
    let result = configure_threads().and_then(|()| dispatch(args));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
