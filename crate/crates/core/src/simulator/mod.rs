//! Discrete-event replay of probabilistic multi-level checkpointing.
//!
//! Each replica runs periods of length `T`. The level of each checkpoint is
//! drawn from the policy and the checkpoint fills the last `c_l` seconds of
//! the period. On a DAG it becomes usable `(n − 1)δ` later, while the next
//! period already runs. Failures of each level arrive as independent Poisson
//! processes. A level-`l` failure rolls back to the newest *completed*
//! checkpoint of level `≥ l` and restarts from it.
//!
//! Replica `k` draws from ChaCha8 stream `k` of the configured seed, so the
//! streams are disjoint and results do not depend on scheduling.

mod audit;
mod engine;
mod events;

pub use audit::{audit_events, AuditSummary, AuditViolation};
pub use events::{read_event_log, write_event_log, Event, EventKind};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Policy, SystemSpec, TopologySpec};

/// Which failures may interrupt a restart from a level-`i` checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartScope {
    /// Only levels `≤ i`, as the analytic restart term assumes.
    #[default]
    PaperAssumption,
    /// Every level; a higher-level failure escalates the recovery.
    AllLevels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub spec: SystemSpec,
    pub policy: Policy,
    /// Wall-clock seconds per replica.
    pub duration: f64,
    pub replicas: usize,
    pub seed: u64,
    pub restart_scope: RestartScope,
    /// Cycled 1-based checkpoint levels used instead of sampling from the policy.
    pub level_sequence: Option<Vec<usize>>,
    pub record_events: bool,
}

pub const DEFAULT_REPLICAS: usize = 100;

impl SimulationConfig {
    /// Defaults: [`default_duration`](Self::default_duration), 100 replicas,
    /// seed 0, restarts interrupted as the analytic model assumes.
    pub fn new(spec: SystemSpec, policy: Policy) -> Self {
        let duration = Self::default_duration(&spec, &policy);
        SimulationConfig {
            spec,
            policy,
            duration,
            replicas: DEFAULT_REPLICAS,
            seed: 0,
            restart_scope: RestartScope::PaperAssumption,
            level_sequence: None,
            record_events: false,
        }
    }

    /// `1000/λ_L` seconds. If the top level never fails, the highest level
    /// that does is used instead, and `1000·T` if none fails.
    pub fn default_duration(spec: &SystemSpec, policy: &Policy) -> f64 {
        spec.levels()
            .iter()
            .rev()
            .find(|l| l.failure_rate > 0.0)
            .map_or(1000.0 * policy.interval, |l| 1000.0 / l.failure_rate)
    }

    pub fn validate(&self) -> Result<()> {
        self.policy.validate_for(&self.spec)?;
        if self.replicas == 0 {
            return Err(Error::InvalidConfig("replicas must be >= 1".into()));
        }
        if !(self.duration > 10.0 * self.policy.interval) || !self.duration.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "duration {} s must exceed 10 intervals ({} s)",
                self.duration,
                10.0 * self.policy.interval
            )));
        }
        if let Some(seq) = &self.level_sequence {
            let levels = self.spec.num_levels();
            if seq.is_empty() || seq.iter().any(|l| !(1..=levels).contains(l)) {
                return Err(Error::InvalidConfig(format!("level_sequence entries must be in 1..={levels}")));
            }
            let top = self.spec.levels().iter().rposition(|l| l.failure_rate > 0.0);
            if let Some(top) = top {
                if !seq.iter().any(|&l| l > top) {
                    return Err(Error::Unrecoverable { level: top + 1 });
                }
            }
        }
        Ok(())
    }
}

/// Per-level tallies summed over replicas; index 0 is level 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub failures: Vec<u64>,
    pub checkpoints_completed: Vec<u64>,
    pub checkpoints_discarded: Vec<u64>,
    /// Restart attempts, by level of the checkpoint restarted from.
    pub restart_attempts: Vec<u64>,
}

impl EventCounts {
    fn zeros(levels: usize) -> Self {
        EventCounts {
            failures: vec![0; levels],
            checkpoints_completed: vec![0; levels],
            checkpoints_discarded: vec![0; levels],
            restart_attempts: vec![0; levels],
        }
    }

    fn add(&mut self, other: &EventCounts) {
        let pairs = [
            (&mut self.failures, &other.failures),
            (&mut self.checkpoints_completed, &other.checkpoints_completed),
            (&mut self.checkpoints_discarded, &other.checkpoints_discarded),
            (&mut self.restart_attempts, &other.restart_attempts),
        ];
        for (mine, theirs) in pairs {
            mine.iter_mut().zip(theirs).for_each(|(a, b)| *a += b);
        }
    }
}

/// Where one replica's wall-clock time went, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaAccounting {
    /// Useful work that was never rolled back.
    pub committed: f64,
    /// Time spent writing checkpoints that were never rolled back.
    pub checkpoint: f64,
    /// Work and checkpoint writes undone by rollbacks.
    pub lost: f64,
    /// Time spent restarting, including interrupted attempts.
    pub restart: f64,
    pub duration: f64,
}

impl ReplicaAccounting {
    pub fn utilization(&self) -> f64 {
        self.committed / self.duration
    }

    /// `|committed + checkpoint + lost + restart − duration|`.
    pub fn conservation_gap(&self) -> f64 {
        (self.committed + self.checkpoint + self.lost + self.restart - self.duration).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub per_replica_utilization: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (`n − 1` denominator; 0 for one replica).
    pub std_dev: f64,
    pub event_counts: EventCounts,
    pub accounting: Vec<ReplicaAccounting>,
    /// Present when events were recorded; ordered by replica, then time.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub events: Option<Vec<Event>>,
}

impl SimulationReport {
    pub fn std_error(&self) -> f64 {
        self.std_dev / (self.per_replica_utilization.len() as f64).sqrt()
    }
}

/// Runs every replica of `config`.
pub fn simulate(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let outcomes: Vec<engine::ReplicaOutcome> =
        (0..config.replicas).into_par_iter().map(|id| engine::run_replica(config, id)).collect();

    let mut event_counts = EventCounts::zeros(config.spec.num_levels());
    let mut events = config.record_events.then(Vec::new);
    let mut accounting = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        event_counts.add(&outcome.counts);
        accounting.push(outcome.accounting);
        if let Some(all) = events.as_mut() {
            all.extend(outcome.events);
        }
    }
    let per_replica_utilization: Vec<f64> = accounting.iter().map(ReplicaAccounting::utilization).collect();
    let n = per_replica_utilization.len() as f64;
    let mean = per_replica_utilization.iter().sum::<f64>() / n;
    let std_dev = if per_replica_utilization.len() > 1 {
        (per_replica_utilization.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(SimulationReport { per_replica_utilization, mean, std_dev, event_counts, accounting, events })
}

/// Parameter varied by [`simulate_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// `T` in seconds.
    Interval,
    /// `p_l` for a 1-based level; the other probabilities are rescaled to keep the sum at 1.
    Probability(usize),
    /// `n`, the critical-path operator count. Needs a topology.
    CriticalPath,
    /// `λ_l` per second for a 1-based level.
    FailureRate(usize),
}

impl SweepAxis {
    fn tag(self) -> u64 {
        match self {
            SweepAxis::Interval => 1,
            SweepAxis::Probability(l) => 0x100 + l as u64,
            SweepAxis::CriticalPath => 2,
            SweepAxis::FailureRate(l) => 0x200 + l as u64,
        }
    }

    /// `spec` and `policy` with this axis set to `value`.
    pub fn apply_to_model(self, spec: &SystemSpec, policy: &Policy, value: f64) -> Result<(SystemSpec, Policy)> {
        let level_index = |l: usize| {
            if (1..=spec.num_levels()).contains(&l) {
                Ok(l - 1)
            } else {
                Err(Error::InvalidConfig(format!("sweep level {l} is not in 1..={}", spec.num_levels())))
            }
        };
        match self {
            SweepAxis::Interval => Ok((spec.clone(), Policy::new(value, policy.probabilities.clone())?)),
            SweepAxis::Probability(l) => {
                let idx = level_index(l)?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::InvalidPolicy(format!("probability {value} is outside [0, 1]")));
                }
                let rest: f64 = policy.probabilities.iter().enumerate().filter(|(i, _)| *i != idx).map(|(_, p)| p).sum();
                let others = spec.num_levels() - 1;
                let probabilities = policy
                    .probabilities
                    .iter()
                    .enumerate()
                    .map(|(i, p)| match (i == idx, rest > 0.0) {
                        (true, _) => value,
                        (false, true) => p / rest * (1.0 - value),
                        (false, false) => (1.0 - value) / others as f64,
                    })
                    .collect();
                Ok((spec.clone(), Policy::new(policy.interval, probabilities)?))
            }
            SweepAxis::CriticalPath => {
                let topo = spec.topology().ok_or_else(|| Error::InvalidConfig("sweeping n needs a topology".into()))?;
                if value.fract() != 0.0 || !(value >= 1.0 && value <= f64::from(u32::MAX)) {
                    return Err(Error::InvalidConfig(format!("n must be a positive integer, got {value}")));
                }
                let topology = TopologySpec::new(value as u32, topo.hop_delay)?;
                Ok((spec.with_topology(Some(topology))?, policy.clone()))
            }
            SweepAxis::FailureRate(l) => Ok((spec.with_failure_rate(level_index(l)?, value)?, policy.clone())),
        }
    }

    /// `base` with this axis set to `value` and a seed derived from both.
    pub fn apply(self, base: &SimulationConfig, value: f64) -> Result<SimulationConfig> {
        let (spec, policy) = self.apply_to_model(&base.spec, &base.policy, value)?;
        Ok(SimulationConfig {
            spec,
            policy,
            seed: base.seed ^ splitmix64(splitmix64(self.tag()) ^ value.to_bits()),
            ..base.clone()
        })
    }
}

/// SplitMix64 finalizer.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One report per value; each point gets its own seed derived from the axis and value.
pub fn simulate_sweep(base: &SimulationConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SimulationReport>> {
    values.iter().map(|&v| simulate(&axis.apply(base, v)?)).collect()
}
