//! Sentence-level detection of hypoglycemia mentions in clinical notes.
//!
//! Everything is built from first principles on `f64`: a small dense
//! numeric kernel with hand-derived backward passes, four sentence
//! encoders (LSTM, BiLSTM, CNN, TCN) over pretrained word vectors, an
//! RBF-kernel SVM baseline over bag-of-words counts, a 10-fold
//! cross-validation harness with rank-based AUCs, a deterministic
//! synthetic corpus generator, and a numeric glucose normalizer.
//!
//! The guide in `book/` walks through each piece; its code snippets are
//! compiled and run by `cargo test --doc` via the hidden `book` module.

pub mod error;
pub mod eval;
pub mod glucose;
pub mod model;
pub mod num;
pub mod runner;
pub mod svm;
pub mod synth;
pub mod text;
pub mod train;

#[doc(hidden)]
pub mod book;

pub use error::{Error, Result};
