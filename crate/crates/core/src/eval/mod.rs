//! Subject-grouped cross-validation, metrics and reports.

mod experiment;
mod folds;
mod metrics;
pub mod report;

pub use experiment::{
    binary_task, cross_validate, derive_seed, fold_standardization, run_experiment, BinaryTask, ClassifierResult,
    EvalSettings, EvaluationReport, Experiment, FoldSummary, Timing, PROTOCOL,
};
pub use folds::{check_no_leakage, grouped_kfold, FoldAssignment};
pub use metrics::{accuracy, cohens_kappa, confusion, ConfusionMatrix};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("{subjects} distinct subjects cannot fill {folds} folds")]
    TooFewSubjects { subjects: usize, folds: usize },
    #[error("need at least 2 folds (got {0})")]
    InvalidFolds(usize),
    #[error("{truth} true labels but {predicted} predictions")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("subject {0} appears in both training and test rows")]
    Leakage(String),
    #[error("dataset needs both classes; found only {0}")]
    SingleClass(String),
    #[error("no classifier enabled")]
    NoClassifiers,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
