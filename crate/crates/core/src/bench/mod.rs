//! Task sequences, dataset generation, scenario suites and forgetting
//! metrics.

mod dataset;
mod metrics;
mod report;
mod suite;
mod synthetic;
mod task;

use std::path::PathBuf;

pub use dataset::{
    csv_header, generate_dataset, read_samples_csv, split_samples, task_paths, write_samples_csv, PreparedTask, Sample,
    TaskData, TARGET_COLUMN,
};
pub use metrics::{
    forgetting_ratio, forgetting_ratio_by_k, increase_rate, plasticity, stability, EvalMatrix, MetricError,
    MetricsSummary,
};
pub use report::{mean_std, summarize, MeanStd, RunRecord, StrategySummary};
pub use suite::{
    indirect_learning, run_scenario_suite, task_error, Suite, SuiteConfig, SuiteProgress, SuiteRun, TaskReport,
};
pub use synthetic::synthetic_tasks;
pub use task::{TaskSequence, TaskSpec};

use crate::arq::EnsembleError;
use crate::nn::NnError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("task `{task_id}` is invalid: {reason}")]
    InvalidTask { task_id: String, reason: String },
    #[error("invalid task sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("every grid point of task `{0}` was invalid")]
    EmptyDataset(String),
    #[error("dataset file {0} is missing")]
    MissingDataset(PathBuf),
    #[error("malformed dataset {path}: {reason}")]
    BadCsv { path: PathBuf, reason: String },
    #[error("no task left to train after {0} completed")]
    SequenceExhausted(usize),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
