//! Trapping probabilities, trapping-time transforms and social-protection costs
//! for households whose capital grows exponentially and suffers random losses,
//! with and without microinsurance.

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod barrier;
pub mod cli;
pub mod error;
pub mod model;
pub mod optimize;
pub mod specfun;
pub mod welfare;

pub use error::{Error, Result};
