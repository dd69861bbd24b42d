//! Toeplitz operators on spaces of analytic and harmonic functions.

// `!(x > 0.0)` is how parameter checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod bases;
pub mod error;
pub mod func;
pub mod io;
pub mod numeric;
pub mod physics;
pub mod rank_lab;
pub mod sparse;
pub mod weights;

pub use error::{Error, Result};
pub use numeric::{CMatrix, MultiIndex, C64};
