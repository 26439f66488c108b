use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use scmap_core::chain::ExportFormat;
use scmap_core::Language;

/// Reconstructs software supply chain maps from clone-and-own reuse between
/// Git repositories.
///
/// Stages communicate through files in the output directory: `index` writes
/// corpus.json, `detect` reads it and writes report.json and audit.json,
/// `map`, `metrics` and `export` read report.json.
#[derive(Debug, Parser)]
#[command(name = "scmap", version)]
pub struct Cli {
    /// More log output (-v info, -vv debug: every dropped candidate, file
    /// and link with its criterion).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Worker threads for ingestion and detection (default: all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read every repository in the manifest and write the corpus cache.
    Index(IndexArgs),
    /// Detect clone-and-own links (Steps 1 to 5) and print the stepwise table.
    Detect(DetectArgs),
    /// Group links into supply chain maps and print the map-size histogram.
    Map(ReportArgs),
    /// Compute network metrics and write one CSV per histogram.
    Metrics(MetricsArgs),
    /// Write the maps as JSON, Graphviz DOT or an edge CSV.
    Export(ExportArgs),
    /// Generate a synthetic ecosystem of Git repositories with known reuse.
    Simulate(SimulateArgs),
    /// Generate a synthetic ecosystem, run the full pipeline and score it.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Manifest listing `id`, `name` and `repo_path` per repository (TSV,
    /// JSON array or JSON lines).
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Languages to analyze.
    #[arg(long, value_delimiter = ',', default_value = "c,cpp,java")]
    pub languages: Vec<Language>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectionFlags {
    /// Links with fewer files are dropped at the end.
    #[arg(long, default_value_t = 20)]
    pub min_files: usize,
    /// Smallest trigram similarity for two files to count as similar, in (0, 1].
    #[arg(long, default_value_t = 0.8)]
    pub similarity_threshold: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Corpus cache (default: OUT/corpus.json).
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[command(flatten)]
    pub detection: DetectionFlags,
    /// Also report links and member projects at each of these minimum file
    /// counts, e.g. `--sweep 5,10,20,30,50`.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Detection report (default: OUT/report.json).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: ReportArgs,
    /// Projects with more distinct consumers than this are hubs.
    #[arg(long, default_value_t = 5)]
    pub hub_threshold: usize,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: ReportArgs,
    #[arg(long, default_value = "json")]
    pub format: ExportFormat,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Ecosystem plan as JSON. Without it a random plan is drawn from --seed.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// Seed for the random plan.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub plan: PlanArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub detection: DetectionFlags,
}
