//! Minimal dense numeric kernel: matrices, the handful of forward ops the
//! encoders need, their hand-derived backward passes, and finite-difference
//! gradient checking.

pub mod gradcheck;
pub mod matrix;
pub mod ops;

pub use gradcheck::{grad_check, DifferentiableOp, GradCheckReport};
pub use matrix::Matrix;
pub use ops::{conv1d_over_time, max_over_time, softmax, FilterBank};
