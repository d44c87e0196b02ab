use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use gallerist::engine::QueryMode;
use gallerist::synth::Profile;

use crate::commands;

#[derive(Debug, Parser)]
#[command(name = "gallerist", version, about = "Query-by-example retrieval over painting collections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe every museum image and store the index.
    Index(IndexArgs),
    /// Rank museum paintings for every query image.
    Query(QueryArgs),
    /// Score query results against ground truth (mAP@K).
    Eval(EvalArgs),
    /// Score emitted painting masks (pixel precision, recall, F1).
    MaskEval(ArtifactEvalArgs),
    /// Score emitted text boxes (mean IoU).
    TextboxEval(ArtifactEvalArgs),
    /// Score emitted rotation estimates (mean angular error).
    AngleEval(ArtifactEvalArgs),
    /// Two-stage k-means clustering of the museum.
    Cluster(ClusterArgs),
    /// Generate a synthetic museum and query set with ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    /// Directory of museum images, labelled by trailing digits.
    #[arg(long)]
    pub museum: Option<PathBuf>,
    /// Tab-separated `label, author, title` rows.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Warn about and skip images that cannot be decoded.
    #[arg(long)]
    pub skip_unreadable: bool,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Directory of query images; `<stem>.ocr.txt` sidecars supply text.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// color, texture, text, combined or feature.
    #[arg(long, default_value = "combined")]
    pub mode: QueryMode,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write per-image mask, text box and angle files here.
    #[arg(long)]
    pub emit_artifacts: Option<PathBuf>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Accept an index built under a different configuration.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Also write the report as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Exit with status 1 when mAP@K falls below this value.
    #[arg(long)]
    pub assert: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ArtifactEvalArgs {
    /// Directory written by `query --emit-artifacts`.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Exit with status 1 when the headline figure misses this value: F1 and
    /// mIoU below it, mean angular error above it.
    #[arg(long)]
    pub assert: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub index: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// ds1, ds2, ds3 or ds4.
    #[arg(long)]
    pub profile: Profile,
    #[arg(long, default_value_t = 50)]
    pub museum_size: usize,
    /// Number of query scenes.
    #[arg(long, default_value_t = 30)]
    pub count: usize,
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// An `--assert` bound was missed.
    BelowThreshold,
}

pub fn run(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Index(a) => commands::index(a).map(|_| Status::Success),
        Command::Query(a) => commands::query(a).map(|_| Status::Success),
        Command::Eval(a) => commands::eval(a),
        Command::MaskEval(a) => commands::mask_eval(a),
        Command::TextboxEval(a) => commands::textbox_eval(a),
        Command::AngleEval(a) => commands::angle_eval(a),
        Command::Cluster(a) => commands::cluster(a).map(|_| Status::Success),
        Command::Synth(a) => commands::synth(a).map(|_| Status::Success),
    }
}
