//! Special functions and scalar search used by the model and the optimizer.

mod lambert;
mod search;

pub use lambert::{lambert_w0, lambert_w0_with, BranchPointPolicy, BRANCH_POINT};
pub use search::{maximize_1d, PRESCAN_POINTS};
