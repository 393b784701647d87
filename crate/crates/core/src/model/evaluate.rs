//! Closed-form utilization of a policy.
//!
//! Two independent routes are kept on purpose: [`evaluate_llevel`] and
//! [`evaluate_llevel_stream`] solve the self-referential effective-period
//! equation term by term, while [`evaluate_2level`], [`evaluate_2level_stream`]
//! and [`evaluate_1level`] use the collapsed closed forms. The tests pin the
//! two routes to each other.
//!
//! Rewritings used everywhere (exact identities):
//! - `(1 − q_{t,Λ})/q_{t,Λ} = expm1(Λt)`
//! - `expm1(Λt)·F_Λ(t) = (e^{Λt} − 1 − Λt)/Λ`
//! - `r + expm1(Λ_i r)·F_{Λ_i}(r) = expm1(Λ_i r)/Λ_i`
//! - `e^{Λ(T+d)} − e^{Λd} = e^{Λd}·expm1(ΛT)`

use super::failure::{expected_failures, expected_lost_time, expected_restart_time};
use super::types::{Evaluation, LevelSpec, Policy, SystemSpec};
use crate::error::{Error, Result};

/// Utilization with no failures at all: `(T − Σ p_l c_l)/(T + (n − 1)δ)`.
///
/// This is the no-overlap steady state; the failure-aware stream evaluators
/// instead tend to `(T − Σ p_l c_l)/T` as every rate goes to zero, because the
/// next interval's work proceeds while the previous checkpoint is still
/// travelling down the DAG.
pub fn utilization_no_failure(spec: &SystemSpec, policy: &Policy) -> Result<Evaluation> {
    check_feasible(spec, policy)?;
    let cost = policy.mean_checkpoint_cost(spec);
    let period = policy.interval + spec.completion_lag();
    Ok(Evaluation {
        utilization: (policy.interval - cost) / period,
        effective_period: period,
        mean_ckpt_cost: cost,
        per_level_recovery_cost: recovery_costs(spec, policy),
    })
}

/// `R_l`: expected time to recover from a failure of `level` (0-based),
/// including restarts that are themselves interrupted.
///
/// The recovery checkpoint is of level `i ≥ l` with probability
/// `p_i / Σ_{j≥l} p_j`; a restart from level `i` is interrupted by failures
/// at rate `Λ_i = Σ_{j≤i} λ_j`.
pub fn recovery_cost(spec: &SystemSpec, policy: &Policy, level: usize) -> Result<f64> {
    if level >= spec.num_levels() || policy.probabilities.len() != spec.num_levels() {
        return Err(Error::InvalidPolicy(format!("no level {} in a {}-level system", level + 1, spec.num_levels())));
    }
    let tail = policy.tail_mass(level);
    if tail <= 0.0 {
        return Err(Error::Unrecoverable { level: level + 1 });
    }
    let cumulative = spec.cumulative_rates();
    Ok((level..spec.num_levels())
        .map(|i| {
            let r = spec.levels()[i].restart_cost;
            policy.probabilities[i] / tail * expected_restart_time(r, cumulative[i])
        })
        .sum())
}

/// `R_l` for every level; levels with nothing to recover from report 0.
pub fn recovery_costs(spec: &SystemSpec, policy: &Policy) -> Vec<f64> {
    (0..spec.num_levels())
        .map(|l| recovery_cost(spec, policy, l).unwrap_or(0.0))
        .collect()
}

/// Single-process `L`-level evaluation by the linear solve of the
/// effective-period recursion. Any topology on `spec` is ignored.
pub fn evaluate_llevel(spec: &SystemSpec, policy: &Policy) -> Result<Evaluation> {
    linear_solve(spec, policy, 0.0)
}

/// Stream `L`-level evaluation: each attempt must survive `T′ = T + (n − 1)δ`,
/// minus the overlapping `(n − 1)δ` already accounted to the previous interval.
pub fn evaluate_llevel_stream(spec: &SystemSpec, policy: &Policy) -> Result<Evaluation> {
    let lag = require_topology(spec)?;
    linear_solve(spec, policy, lag)
}

fn linear_solve(spec: &SystemSpec, policy: &Policy, lag: f64) -> Result<Evaluation> {
    check_feasible(spec, policy)?;
    let t = policy.interval;
    let cost = policy.mean_checkpoint_cost(spec);
    let recovery = recovery_costs(spec, policy);
    let total = spec.total_rate();

    if total == 0.0 {
        return Ok(Evaluation {
            utilization: (t - cost) / t,
            effective_period: t,
            mean_ckpt_cost: cost,
            per_level_recovery_cost: recovery,
        });
    }

    // Σ (λ_l/Λ) R_l and Σ (λ_l/Λ)·(Σ_{i<l} p_i / Σ_{i≥l} p_i)
    let mut weighted_recovery = 0.0;
    let mut lost_checkpoints = 0.0;
    let mut below = 0.0;
    for (l, level) in spec.levels().iter().enumerate() {
        if level.failure_rate > 0.0 {
            let share = level.failure_rate / total;
            weighted_recovery += share * recovery[l];
            lost_checkpoints += share * below / policy.tail_mass(l);
        }
        below += policy.probabilities[l];
    }

    let whole = t + lag;
    let failures_whole = expected_failures(whole, total);
    let mut numerator = t + expected_lost_time(whole, total) + failures_whole * weighted_recovery;
    let failures_net = if lag > 0.0 {
        numerator -= expected_lost_time(lag, total) + expected_failures(lag, total) * weighted_recovery;
        // e^{ΛT′} − e^{Λ(n−1)δ} without cancellation
        (total * lag).exp() * expected_failures(t, total)
    } else {
        failures_whole
    };
    let denominator = 1.0 - failures_net * lost_checkpoints;
    if !(denominator > 0.0) {
        return Err(Error::Diverges { denominator });
    }
    let effective_period = numerator / denominator;
    Ok(Evaluation {
        utilization: (t - cost) / effective_period,
        effective_period,
        mean_ckpt_cost: cost,
        per_level_recovery_cost: recovery,
    })
}

/// Two-level single-process utilization via the collapsed closed form
///
/// `U = Λ(λ₂(p₁e^{TΛ} − 1) − λ₁p₂)(T − p₁c₁ − p₂c₂) /
///      ((1 − e^{TΛ}) p₂ (e^{r₂Λ}(λ₂ + λ₁p₂) − λ₂p₁ + Λp₁e^{λ₁r₁}))`
///
/// evaluated as `(p₂ − (λ₂/Λ)p₁E)(T − C) / ((E/Λ)·p₂·K)` with `E = expm1(TΛ)`
/// and `K = 1 + ((λ₂ + λ₁p₂)/Λ)·expm1(r₂Λ) + p₁·expm1(λ₁r₁)`.
pub fn evaluate_2level(spec: &SystemSpec, policy: &Policy) -> Result<Evaluation> {
    two_level_closed_form(spec, policy, 0.0)
}

/// Two-level stream utilization via its closed form; the single-process form
/// with an extra `e^{−Λ(n−1)δ}` and `e^{Λ(n−1)δ}` on the lost-checkpoint term.
pub fn evaluate_2level_stream(spec: &SystemSpec, policy: &Policy) -> Result<Evaluation> {
    let lag = require_topology(spec)?;
    two_level_closed_form(spec, policy, lag)
}

fn two_level_closed_form(spec: &SystemSpec, policy: &Policy, lag: f64) -> Result<Evaluation> {
    if spec.num_levels() != 2 {
        return Err(Error::InvalidSpec(format!("two-level form needs L = 2, got L = {}", spec.num_levels())));
    }
    check_feasible(spec, policy)?;
    let (p1, p2) = (policy.probabilities[0], policy.probabilities[1]);
    if p2 <= 0.0 {
        return Err(if spec.levels()[1].failure_rate > 0.0 {
            Error::Unrecoverable { level: 2 }
        } else {
            Error::InvalidPolicy("two-level closed form needs p_2 > 0".into())
        });
    }
    let [lo, hi] = [spec.levels()[0], spec.levels()[1]];
    let (l1, l2) = (lo.failure_rate, hi.failure_rate);
    let total = l1 + l2;
    let t = policy.interval;
    let cost = policy.mean_checkpoint_cost(spec);
    let recovery = recovery_costs(spec, policy);

    if total == 0.0 {
        return Ok(Evaluation {
            utilization: (t - cost) / t,
            effective_period: t,
            mean_ckpt_cost: cost,
            per_level_recovery_cost: recovery,
        });
    }

    let e = t * total;
    let e = e.exp_m1();
    let overlap = (total * lag).exp();
    let progress = p2 - l2 / total * p1 * overlap * e;
    if !(progress > 0.0) {
        return Err(Error::Diverges { denominator: progress / p2 });
    }
    let k = 1.0 + (l2 + l1 * p2) / total * (hi.restart_cost * total).exp_m1() + p1 * (l1 * lo.restart_cost).exp_m1();
    let utilization = progress * (t - cost) / (overlap * e / total * p2 * k);
    Ok(Evaluation {
        utilization,
        effective_period: (t - cost) / utilization,
        mean_ckpt_cost: cost,
        per_level_recovery_cost: recovery,
    })
}

/// One-level utilization: `U = (T − c)·e^{−Λr} / (expm1(ΛT)/Λ)`.
pub fn evaluate_1level(level: &LevelSpec, interval: f64) -> Result<Evaluation> {
    let (rate, c, r) = (level.failure_rate, level.checkpoint_cost, level.restart_cost);
    if !(interval > c) {
        return Err(Error::InvalidPolicy(format!(
            "infeasible: interval {interval} s does not exceed checkpoint cost {c} s"
        )));
    }
    let (effective_period, recovery) = if rate == 0.0 {
        (interval, r)
    } else {
        let per = expected_failures(interval, rate) / rate;
        (per * (rate * r).exp(), expected_restart_time(r, rate))
    };
    Ok(Evaluation {
        utilization: (interval - c) / effective_period,
        effective_period,
        mean_ckpt_cost: c,
        per_level_recovery_cost: vec![recovery],
    })
}

/// Picks the formula variant from `L` and whether a topology is present.
pub fn evaluate(spec: &SystemSpec, policy: &Policy) -> Result<Evaluation> {
    match (spec.num_levels(), spec.topology().is_some()) {
        (1, false) => {
            check_feasible(spec, policy)?;
            evaluate_1level(&spec.levels()[0], policy.interval)
        }
        (2, false) if policy.probabilities.get(1).is_some_and(|p| *p > 0.0) => evaluate_2level(spec, policy),
        (2, true) if policy.probabilities.get(1).is_some_and(|p| *p > 0.0) => evaluate_2level_stream(spec, policy),
        (_, false) => evaluate_llevel(spec, policy),
        (_, true) => evaluate_llevel_stream(spec, policy),
    }
}

fn check_feasible(spec: &SystemSpec, policy: &Policy) -> Result<()> {
    policy.validate_for(spec)
}

fn require_topology(spec: &SystemSpec) -> Result<f64> {
    spec.topology()
        .map(|t| t.completion_lag())
        .ok_or_else(|| Error::InvalidSpec("stream evaluation needs a topology".into()))
}
