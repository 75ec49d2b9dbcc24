//! Doc-test shims for the book.
//!
//! mdBook cannot run its own code listings as tests, so each chapter is
//! included here as the documentation of an empty module and `cargo test
//! --doc` compiles and runs every Rust fence. Chapter files live in
//! `book/src/`; keep them self-contained.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod ch_introduction {}

#[doc = include_str!("../../../book/src/numeric-kernel.md")]
pub mod ch_numeric_kernel {}

#[doc = include_str!("../../../book/src/encoders.md")]
pub mod ch_encoders {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod ch_training {}

#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod ch_evaluation {}

#[doc = include_str!("../../../book/src/svm-baseline.md")]
pub mod ch_svm_baseline {}

#[doc = include_str!("../../../book/src/synthetic-corpus.md")]
pub mod ch_synthetic_corpus {}

#[doc = include_str!("../../../book/src/glucose-normalizer.md")]
pub mod ch_glucose_normalizer {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod ch_cli {}
