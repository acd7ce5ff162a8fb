//! Experimental protocol: stratified split, hidden-size sweeps with
//! repetitions, best-network reruns, summary statistics and reports.

mod config;
mod experiment;
mod report;
mod split;
mod stats;
mod sweep;
pub mod synthetic;

pub use config::{Arm, ExperimentConfig, Selection};
pub use experiment::{run_experiment, ArmData, ExperimentOutcome};
pub use report::{render_report, write_results_csv, ReportFormat};
pub use split::{split_dataset, split_indices, SplitSpec};
pub use stats::{mean, median, sample_std};
pub use sweep::{
    rerun_best, run_sweep, summarize, ClassifierConfig, ClassifierKind, Dataset, DefaultRunner,
    SavedModel, SweepOutcome, SweepSummary, TrainedModel, TrialOutcome, TrialResult, TrialRunner,
    TrialSpec,
};

use thiserror::Error;

use crate::features::{MatrixError, PcaError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("test fraction {0} must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("class {0:?} has no rows")]
    EmptyClass(String),
    #[error("label {0:?} is not one of the known classes")]
    UnknownLabel(String),
    #[error("hidden size range is empty")]
    EmptyRange,
    #[error("need at least {needed} repetitions, got {got}")]
    TooFewReps { needed: usize, got: usize },
    #[error("every trial failed; first error: {0}")]
    AllTrialsFailed(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
}
