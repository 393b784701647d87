//! Planning and validation toolkit for probabilistic multi-level
//! checkpointing, for single processes and stream-processing DAGs.
//!
//! - [`model`]: system/policy types and closed-form utilization.
//! - [`numerics`]: Lambert W and bracketed maximization.
//! - [`optimizer`]: utilization-maximizing interval and level probabilities.
//! - [`simulator`]: discrete-event replay used as an independent oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod numerics;
pub mod optimizer;
pub mod simulator;
pub mod units;

pub use error::{Error, Result};
