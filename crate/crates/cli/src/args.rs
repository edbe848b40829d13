use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use itemgauge::{Criterion, Direction, KConvention};

#[derive(Debug, Parser)]
#[command(
    name = "itemgauge",
    version,
    about = "Item-difficulty estimation from structured item codings"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write results to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KArg {
    AllParams,
    SlopesOnly,
}

impl From<KArg> for KConvention {
    fn from(k: KArg) -> Self {
        match k {
            KArg::AllParams => KConvention::AllParams,
            KArg::SlopesOnly => KConvention::SlopesOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Aic,
    Bic,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Aic => Criterion::Aic,
            CriterionArg::Bic => Criterion::Bic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Forward,
    Both,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Both => Direction::Both,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptive statistics of a coded item file.
    Describe { data: PathBuf },
    /// Correlation matrix of all predictors and the difficulty label.
    Correlate { data: PathBuf },
    /// Fit a proportional-odds model on the given variables.
    Fit(FitArgs),
    /// Stepwise variable selection, or scoring of listed subsets.
    Select(SelectArgs),
    /// Class probabilities and predicted level per item.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        items: PathBuf,
    },
    /// Confusion matrix and accuracy on labeled items.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        items: PathBuf,
        /// One block per course tag.
        #[arg(long)]
        by_course: bool,
    },
    /// Multicollinearity, drop-in-deviance tests and pseudo R².
    Diagnose {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Generate a seeded synthetic item file.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Draw labels from this model.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Per-variable marginals as JSON; built-in reference marginals otherwise.
        #[arg(long)]
        marginals: Option<PathBuf>,
    },
    /// Serve the prediction API.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 8630)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Static files served at `/`.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub data: PathBuf,
    /// Comma-separated predictor names.
    #[arg(long)]
    pub vars: String,
    /// Parameters counted by AIC and BIC.
    #[arg(long, value_enum, default_value_t = KArg::AllParams)]
    pub k: KArg,
    /// Hold out this fraction of each course, stratified by level.
    #[arg(long)]
    pub holdout: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    pub data: PathBuf,
    /// Comma-separated candidates; all fifteen predictors by default.
    #[arg(long)]
    pub candidates: Option<String>,
    #[arg(long, value_enum, default_value_t = CriterionArg::Aic)]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    pub direction: DirectionArg,
    /// File with one comma-separated subset per line; scores these instead.
    #[arg(long)]
    pub subsets: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, value_enum, default_value_t = KArg::AllParams)]
    pub k: KArg,
}
