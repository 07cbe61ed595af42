//! Feedforward regression network trained by mini-batch gradient descent.

mod checkpoint;
mod features;
mod gradcheck;
mod model;
mod objective;
mod train;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use features::{FeatureBounds, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use gradcheck::{gradient_check, GradCheck};
pub use model::{Dims, Forward, Model, Normalizer, Range};
pub use objective::{backward, mse_loss, FitTerm, Gradients, Objective, Penalty};
pub use train::{
    sgd_epochs, sgd_update, train_task, Batch, Dataset, EpochRecord, PlainMse, StepContext, TrainConfig, TrainOutcome,
    TrainingStrategy,
};

#[derive(Debug, thiserror::Error)]
pub enum NnError {
    #[error("prediction and truth lengths differ or are empty ({pred} vs {truth})")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("parameters became non-finite in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("checkpoint schema version {found:?} is not supported (expected {expected})")]
    SchemaVersion { found: Option<u64>, expected: u32 },
    #[error("checkpoint shape mismatch in `{0}`")]
    ShapeMismatch(String),
    #[error("checkpoint is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
