//! Sentence classifiers: embedding input layer, four interchangeable
//! sentence encoders producing a fixed-width sentence vector, and the
//! dropout + softmax output head.

pub mod checkpoint;
pub mod cnn;
pub mod config;
pub mod head;
pub mod lstm;
pub mod network;
pub mod params;
pub mod tcn;

pub use checkpoint::{load_checkpoint, save_checkpoint, TrainedModel};
pub use config::{EncoderKind, ModelConfig};
pub use network::{ForwardCache, ModelLossOp, Network};
pub use params::{Layout, ParameterSet};
