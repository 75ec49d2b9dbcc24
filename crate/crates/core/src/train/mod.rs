//! Training: cross-entropy loss, Adam, and the epoch loop with dev-set
//! model selection.

pub mod adam;
pub mod loss;
pub mod trainer;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use loss::cross_entropy;
pub use trainer::{
    score_all, train_from, train_model, write_training_log_csv, EncodedSentence, EpochLog,
    SelectionMetric, TrainConfig, TrainOutcome,
};
