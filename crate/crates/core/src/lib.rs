//! Variable-density node generation for mesh-free PDE discretizations.

// `!(x > 0.0)` rejects NaN along with non-positive values, and index loops
// over coordinate axes read better than zipped iterators.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod cli;
pub mod error;
pub mod field;
pub mod front;
pub mod geometry;
pub mod quality;
pub mod rbf;
pub mod spherical;

pub use error::{Error, Result};
