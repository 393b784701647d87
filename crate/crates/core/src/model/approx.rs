//! Lambert-W approximations of the two-level optimum, valid when level-1
//! failures dominate (`λ₁ ≫ λ₂`) and restart costs are small. The regime is
//! the caller's responsibility; nothing here checks it.

use serde::{Deserialize, Serialize};

use super::types::{Policy, SystemSpec};
use crate::error::{Error, Result};
use crate::numerics::lambert_w0;

/// Which rate drives the interval approximation.
///
/// Setting `∂U/∂T = 0` on the simplified two-level utilization gives
/// `(W(−e^{−ρC̄−1}) + 1)/ρ` with `ρ = Λ`; the commonly quoted form writes
/// `ρ = λ₁`, which agrees to first order in `λ₂/λ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalRate {
    /// `ρ = Λ = λ₁ + λ₂`.
    #[default]
    Aggregate,
    /// `ρ = λ₁`.
    LowestLevel,
}

/// `T* ≈ C̄ + (W(−e^{−ρC̄ − 1}) + 1)/ρ` with `C̄ = c₁p₁ + c₂(1 − p₁)`.
/// Identical for a single process and a stream.
pub fn approx_optimal_interval(spec: &SystemSpec, p1: f64, rate: IntervalRate) -> Result<f64> {
    let [lo, hi] = two_levels(spec)?;
    let rho = match rate {
        IntervalRate::Aggregate => lo.failure_rate + hi.failure_rate,
        IntervalRate::LowestLevel => lo.failure_rate,
    };
    if !(rho > 0.0) {
        return Err(Error::Domain("interval approximation needs a positive failure rate".into()));
    }
    let mean_cost = lo.checkpoint_cost * p1 + hi.checkpoint_cost * (1.0 - p1);
    let w = lambert_w0(-(-rho * mean_cost - 1.0).exp())?;
    Ok(mean_cost + (w + 1.0) / rho)
}

/// `p₁* ≈ 1 − sqrt(λ₂(T − c₁)(e^{TΛ} − 1) / ((c₂ − c₁)(λ₁ + λ₂e^{TΛ})))`, or with a
/// topology `1 − e^{δnΛ/2}·sqrt(λ₂(T − c₁)(e^{TΛ} − 1) / ((c₂ − c₁)(Λe^{δΛ} − λ₂e^{δnΛ} + λ₂e^{Λ(T+δn)})))`.
///
/// Returned unclamped: outside the `λ₁ ≫ λ₂` regime it can drop below 0.
pub fn approx_optimal_p1(spec: &SystemSpec, interval: f64) -> Result<f64> {
    let [lo, hi] = two_levels(spec)?;
    let (l1, l2) = (lo.failure_rate, hi.failure_rate);
    let total = l1 + l2;
    let (c1, c2) = (lo.checkpoint_cost, hi.checkpoint_cost);
    let growth = (interval * total).exp_m1();
    let numerator = l2 * (interval - c1) * growth;
    let (prefactor, denominator) = match spec.topology() {
        None => (1.0, (c2 - c1) * (l1 + l2 * (interval * total).exp())),
        Some(topo) => {
            let n = f64::from(topo.critical_path_operators);
            let d = topo.hop_delay;
            // Λe^{δΛ} − λ₂e^{δnΛ} + λ₂e^{Λ(T+δn)} = Λe^{δΛ} + λ₂e^{δnΛ}·expm1(ΛT)
            let den = total * (d * total).exp() + l2 * (d * n * total).exp() * growth;
            ((d * n * total / 2.0).exp(), (c2 - c1) * den)
        }
    };
    let ratio = numerator / denominator;
    if !(ratio >= 0.0) || !ratio.is_finite() {
        return Err(Error::Domain(format!(
            "p1 approximation undefined at T = {interval} s (square-root argument {ratio})"
        )));
    }
    Ok(1.0 - prefactor * ratio.sqrt())
}

/// Fixed point of the interval and probability approximations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxFixedPoint {
    pub interval: f64,
    /// Clamped to `[0, 1]`.
    pub p1: f64,
    pub iterations: usize,
}

impl ApproxFixedPoint {
    pub fn policy(&self) -> Result<Policy> {
        Policy::new(self.interval, vec![self.p1, 1.0 - self.p1])
    }
}

const FIXED_POINT_MAX_ITERATIONS: usize = 1000;

/// Alternates `T ← T*(p₁)`, `p₁ ← clamp(p₁*(T))` from `p₁ = 1/2` until both settle.
pub fn approx_fixed_point(spec: &SystemSpec, rate: IntervalRate) -> Result<ApproxFixedPoint> {
    let mut p1 = 0.5;
    let mut interval = approx_optimal_interval(spec, p1, rate)?;
    for iterations in 1..=FIXED_POINT_MAX_ITERATIONS {
        let next_p1 = approx_optimal_p1(spec, interval)?.clamp(0.0, 1.0);
        let next_interval = approx_optimal_interval(spec, next_p1, rate)?;
        let settled = (next_p1 - p1).abs() <= 1e-13 && (next_interval - interval).abs() <= 1e-10 * interval;
        p1 = next_p1;
        interval = next_interval;
        if settled {
            return Ok(ApproxFixedPoint { interval, p1, iterations });
        }
    }
    Err(Error::NonConvergence("approximation fixed point", FIXED_POINT_MAX_ITERATIONS))
}

fn two_levels(spec: &SystemSpec) -> Result<[crate::model::LevelSpec; 2]> {
    match spec.levels() {
        [lo, hi] => Ok([*lo, *hi]),
        levels => Err(Error::InvalidSpec(format!("approximations need L = 2, got L = {}", levels.len()))),
    }
}
