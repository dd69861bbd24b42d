//! Config-driven experiments over `toeplitz-core` and the acceptance suite.

// `!(x > 0.0)` is how parameter checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;
pub mod sampling;
pub mod suite;
