use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Bayesian model-averaged meta-analysis of standardized mean differences.
#[derive(Debug, Parser)]
#[command(name = "bma-meta", version, about)]
pub struct Cli {
    /// Worker threads for parallel evaluation (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one comparison read from a CSV file.
    Analyze(AnalyzeArgs),
    /// Fit candidate priors to a training corpus.
    FitPriors(FitPriorsArgs),
    /// Evaluate candidate priors on a test corpus.
    Rank(RankArgs),
    /// Inspect the embedded subfield prior catalog.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV with columns `effect,se[,label]` or `n1,m1,sd1,n2,m2,sd2[,label]`.
    pub input: PathBuf,

    /// Prior on δ, e.g. `t(0.0,0.51,5.0)`; repeat for several candidates.
    #[arg(long = "delta-prior", value_name = "SPEC")]
    pub delta_priors: Vec<String>,

    /// Prior on τ, e.g. `invgamma(1.79,0.28)`; repeat for several candidates.
    #[arg(long = "tau-prior", value_name = "SPEC")]
    pub tau_priors: Vec<String>,

    /// Take δ and τ priors from the subfield catalog.
    #[arg(long, value_name = "NAME", conflicts_with_all = ["delta_priors", "tau_priors"])]
    pub subfield: Option<String>,

    /// How prior probability is spread over the models.
    #[arg(long, value_enum, default_value_t = SchemeArg::FourType)]
    pub scheme: SchemeArg,

    /// Prior probabilities of fixed_H0, fixed_H1, random_H0, random_H1.
    #[arg(long = "model-priors", value_name = "P0F,P1F,P0R,P1R", conflicts_with = "scheme")]
    pub model_priors: Option<String>,

    /// Also report the evidence after each study in input order.
    #[arg(long)]
    pub sequential: bool,

    /// Write a forest plot to this SVG file.
    #[arg(long, value_name = "PATH")]
    pub forest: Option<PathBuf>,

    /// Relative tolerance of the marginal-likelihood quadrature.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Rename input columns, e.g. `effect=d,se=se_d`.
    #[arg(long, value_name = "KEY=COLUMN,...")]
    pub map: Option<String>,

    /// Include posterior density grids in the report.
    #[arg(long)]
    pub grid: bool,

    /// Also report the δ average that keeps the point mass at zero.
    #[arg(long = "spike-slab")]
    pub spike_slab: bool,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    FourType,
    Flat,
}

#[derive(Debug, Args)]
pub struct FitPriorsArgs {
    /// Corpus CSV with one row per study and a `comparison_id` column.
    pub corpus: PathBuf,

    /// Drop comparisons with fewer studies.
    #[arg(long, default_value_t = 10)]
    pub min_studies: usize,

    /// Leave τ estimates below this value out of the τ fits.
    #[arg(long, default_value_t = 0.01)]
    pub tau_floor: f64,

    /// Estimate the location of normal and t fits instead of fixing it at 0.
    #[arg(long)]
    pub free_location: bool,

    #[arg(long, value_name = "KEY=COLUMN,...")]
    pub map: Option<String>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Corpus CSV with one row per study and a `comparison_id` column.
    pub corpus: PathBuf,

    /// Candidate prior set JSON as written by `fit-priors` (default: the
    /// reference set).
    #[arg(long, value_name = "PATH")]
    pub candidates: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub mode: RankMode,

    /// Skip comparisons with fewer studies.
    #[arg(long, default_value_t = 3)]
    pub min_studies: usize,

    /// Abort when a larger fraction of comparisons fails.
    #[arg(long, default_value_t = 0.01)]
    pub max_failure_rate: f64,

    #[arg(long)]
    pub tol: Option<f64>,

    #[arg(long, value_name = "KEY=COLUMN,...")]
    pub map: Option<String>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankMode {
    /// Rank the random_H1 prior configurations.
    Configs,
    /// Rank the four model types.
    ModelTypes,
    /// Rank δ priors and τ priors within random_H1.
    ParameterPriors,
    /// Summarize inclusion Bayes factors.
    Inclusion,
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// Print every catalog entry.
    List,
    /// Print the entry for one topic (falls back to the pooled estimate).
    Show { topic: String },
}
