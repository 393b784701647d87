//! Domain types and closed-form utilization models.

mod approx;
mod evaluate;
mod failure;
mod types;

pub use approx::{approx_fixed_point, approx_optimal_interval, approx_optimal_p1, ApproxFixedPoint, IntervalRate};
pub use evaluate::{
    evaluate, evaluate_1level, evaluate_2level, evaluate_2level_stream, evaluate_llevel, evaluate_llevel_stream,
    recovery_cost, recovery_costs, utilization_no_failure,
};
pub use failure::{conditional_mttf, expected_restart_time, survival_probability};
pub use types::{Evaluation, LevelSpec, OrderingCheck, Policy, SystemSpec, TopologySpec, PROBABILITY_SUM_TOLERANCE};
