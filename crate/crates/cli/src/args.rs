//! Command-line interface definition.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "restack",
    version,
    about = "Redundancy-aware regularized stacking over CSV prediction pools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline and write reports to an output directory
    Run(RunArgs),
    /// Generate a synthetic clustered prediction pool as CSV
    Synth(SynthArgs),
    /// Cumulative component ablation
    Ablate(AblateArgs),
    /// De-duplication only: removal log and conditioning diagnostics
    Dedup(DedupArgs),
}

/// Flags shared by every pipeline-driving subcommand. Precedence is
/// defaults < config file < flags.
#[derive(Debug, Args, Default, Clone)]
pub struct PipelineFlags {
    /// TOML config file mirroring the pipeline configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of outer CV folds
    #[arg(long)]
    pub folds: Option<usize>,
    /// Master random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Correlation threshold for de-duplication
    #[arg(long = "tau-corr")]
    pub tau_corr: Option<f64>,
    /// Pairwise-MSE threshold for de-duplication (default 0.05*Var(target))
    #[arg(long = "tau-mse")]
    pub tau_mse: Option<f64>,
    /// Variance-pruning threshold
    #[arg(long = "tau-var")]
    pub tau_var: Option<f64>,
    /// Meta-learners, comma separated (ridge,lasso,elasticnet)
    #[arg(long, value_delimiter = ',')]
    pub meta: Option<Vec<String>>,
    /// Baselines, comma separated
    /// (best_single,uniform,weighted,ols_stack,ridge_stack,hill_climb)
    #[arg(long, value_delimiter = ',')]
    pub baselines: Option<Vec<String>>,
    /// Inner CV folds for hyperparameter selection
    #[arg(long = "inner-folds")]
    pub inner_folds: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Training predictions CSV (id, target, one column per model)
    #[arg(long)]
    pub predictions: PathBuf,
    /// Optional test predictions CSV (id, one column per model)
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Output directory for reports
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub flags: PipelineFlags,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "n-samples", default_value_t = 5000)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 4)]
    pub clusters: usize,
    #[arg(long = "models-per-cluster", default_value_t = 5)]
    pub models_per_cluster: usize,
    /// Base noise std as a fraction of the target std
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    /// Within-cluster noise correlation in [0, 1]
    #[arg(long = "rho-within", default_value_t = 0.99)]
    pub rho_within: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub flags: PipelineFlags,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub flags: PipelineFlags,
}
