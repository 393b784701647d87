use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::per_day;

/// Tolerance on `Σ p_l = 1`.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// One checkpoint level: how often it fails and what its checkpoints cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSpec {
    /// Failures per second.
    pub failure_rate: f64,
    /// Seconds to write a checkpoint of this level.
    pub checkpoint_cost: f64,
    /// Seconds to restart from a checkpoint of this level.
    pub restart_cost: f64,
}

impl LevelSpec {
    pub fn new(failure_rate: f64, checkpoint_cost: f64, restart_cost: f64) -> Result<Self> {
        let level = LevelSpec { failure_rate, checkpoint_cost, restart_cost };
        level.validate()?;
        Ok(level)
    }

    /// Same as [`LevelSpec::new`] with the rate given in failures per day.
    pub fn per_day(failures_per_day: f64, checkpoint_cost: f64, restart_cost: f64) -> Result<Self> {
        Self::new(per_day(failures_per_day), checkpoint_cost, restart_cost)
    }

    fn validate(&self) -> Result<()> {
        if !(self.failure_rate.is_finite() && self.failure_rate >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "failure_rate must be finite and >= 0, got {}",
                self.failure_rate
            )));
        }
        if !(self.checkpoint_cost.is_finite() && self.checkpoint_cost > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "checkpoint_cost must be finite and > 0, got {}",
                self.checkpoint_cost
            )));
        }
        if !(self.restart_cost.is_finite() && self.restart_cost >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "restart_cost must be finite and >= 0, got {}",
                self.restart_cost
            )));
        }
        Ok(())
    }
}

/// Critical path of the operator DAG. Only its length and the per-hop token
/// delay enter the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub critical_path_operators: u32,
    /// Seconds between one operator forwarding the checkpoint token and the next receiving it.
    pub hop_delay: f64,
}

impl TopologySpec {
    pub fn new(critical_path_operators: u32, hop_delay: f64) -> Result<Self> {
        if critical_path_operators < 1 {
            return Err(Error::InvalidSpec("critical_path_operators must be >= 1".into()));
        }
        if !(hop_delay.is_finite() && hop_delay >= 0.0) {
            return Err(Error::InvalidSpec(format!("hop_delay must be finite and >= 0, got {hop_delay}")));
        }
        Ok(TopologySpec { critical_path_operators, hop_delay })
    }

    /// `(n − 1)δ`: time from the first operator finishing a checkpoint until the whole DAG has.
    pub fn completion_lag(&self) -> f64 {
        f64::from(self.critical_path_operators - 1) * self.hop_delay
    }
}

/// How strictly the level orderings are enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingCheck {
    /// `λ` strictly decreasing, `c` strictly increasing, `r` non-decreasing.
    #[default]
    Strict,
    /// Only per-level validity; for probing the boundaries of the model.
    Relaxed,
}

/// The checkpointed system: levels ordered from 1 (cheapest, most frequent
/// failures) to `L`, plus an optional stream topology.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemSpec {
    levels: Vec<LevelSpec>,
    topology: Option<TopologySpec>,
    ordering: OrderingCheck,
}

impl SystemSpec {
    pub fn new(levels: Vec<LevelSpec>, topology: Option<TopologySpec>) -> Result<Self> {
        Self::with_ordering(levels, topology, OrderingCheck::Strict)
    }

    pub fn with_ordering(
        levels: Vec<LevelSpec>,
        topology: Option<TopologySpec>,
        ordering: OrderingCheck,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSpec("at least one level is required".into()));
        }
        for level in &levels {
            level.validate()?;
        }
        if let Some(topology) = &topology {
            TopologySpec::new(topology.critical_path_operators, topology.hop_delay)?;
        }
        if ordering == OrderingCheck::Strict {
            for (i, pair) in levels.windows(2).enumerate() {
                let (lo, hi) = (pair[0], pair[1]);
                if !(lo.failure_rate > hi.failure_rate) {
                    return Err(Error::InvalidSpec(format!(
                        "failure rates must strictly decrease with level (level {} = {:e}/s, level {} = {:e}/s)",
                        i + 1,
                        lo.failure_rate,
                        i + 2,
                        hi.failure_rate
                    )));
                }
                if !(lo.checkpoint_cost < hi.checkpoint_cost) {
                    return Err(Error::InvalidSpec(format!(
                        "checkpoint costs must strictly increase with level (level {} = {} s, level {} = {} s)",
                        i + 1,
                        lo.checkpoint_cost,
                        i + 2,
                        hi.checkpoint_cost
                    )));
                }
                if !(lo.restart_cost <= hi.restart_cost) {
                    return Err(Error::InvalidSpec(format!(
                        "restart costs must not decrease with level (level {} = {} s, level {} = {} s)",
                        i + 1,
                        lo.restart_cost,
                        i + 2,
                        hi.restart_cost
                    )));
                }
            }
        }
        Ok(SystemSpec { levels, topology, ordering })
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn topology(&self) -> Option<&TopologySpec> {
        self.topology.as_ref()
    }

    pub fn ordering(&self) -> OrderingCheck {
        self.ordering
    }

    /// `(n − 1)δ`, zero without a topology.
    pub fn completion_lag(&self) -> f64 {
        self.topology.map_or(0.0, |t| t.completion_lag())
    }

    /// `Λ = Σ λ_l`.
    pub fn total_rate(&self) -> f64 {
        self.levels.iter().map(|l| l.failure_rate).sum()
    }

    /// `Λ_i = Σ_{j ≤ i} λ_j` for every level (0-based `i`).
    pub fn cumulative_rates(&self) -> Vec<f64> {
        self.levels
            .iter()
            .scan(0.0, |acc, l| {
                *acc += l.failure_rate;
                Some(*acc)
            })
            .collect()
    }

    pub fn max_checkpoint_cost(&self) -> f64 {
        self.levels.iter().map(|l| l.checkpoint_cost).fold(0.0, f64::max)
    }

    pub fn with_topology(&self, topology: Option<TopologySpec>) -> Result<Self> {
        Self::with_ordering(self.levels.clone(), topology, self.ordering)
    }

    /// Copy with level `level` (0-based) failing at `rate` per second.
    pub fn with_failure_rate(&self, level: usize, rate: f64) -> Result<Self> {
        let mut levels = self.levels.clone();
        let target = levels
            .get_mut(level)
            .ok_or_else(|| Error::InvalidSpec(format!("no level {}", level + 1)))?;
        target.failure_rate = rate;
        Self::with_ordering(levels, self.topology, self.ordering)
    }

    /// Keeps only the `retained` levels (0-based, must include the top level).
    /// Each dropped level's failure rate moves to the nearest retained level
    /// above it, since those failures need a checkpoint of at least that level.
    pub fn folded(&self, retained: &[usize]) -> Result<Self> {
        let top = self.levels.len() - 1;
        let mut keep = retained.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.last() != Some(&top) {
            return Err(Error::InvalidSpec("folding must retain the top level".into()));
        }
        let mut levels: Vec<LevelSpec> = keep.iter().map(|&i| self.levels[i]).collect();
        for (i, level) in self.levels.iter().enumerate() {
            if keep.binary_search(&i).is_err() {
                let into = keep.iter().position(|&k| k > i).expect("top level is retained");
                levels[into].failure_rate += level.failure_rate;
            }
        }
        Self::with_ordering(levels, self.topology, OrderingCheck::Relaxed)
    }
}

/// A checkpointing policy: one global interval and the probability of
/// choosing each level at every checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    /// Seconds between checkpoints (`T`).
    pub interval: f64,
    pub probabilities: Vec<f64>,
}

impl Policy {
    pub fn new(interval: f64, probabilities: Vec<f64>) -> Result<Self> {
        if !(interval.is_finite() && interval > 0.0) {
            return Err(Error::InvalidPolicy(format!("interval must be finite and > 0, got {interval}")));
        }
        if probabilities.is_empty() {
            return Err(Error::InvalidPolicy("at least one probability is required".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidPolicy(format!("probabilities must be finite and >= 0, got {p}")));
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidPolicy(format!("probabilities must sum to 1, got {sum}")));
        }
        Ok(Policy { interval, probabilities })
    }

    /// `Σ p_l c_l`.
    pub fn mean_checkpoint_cost(&self, spec: &SystemSpec) -> f64 {
        self.probabilities
            .iter()
            .zip(spec.levels())
            .map(|(p, l)| p * l.checkpoint_cost)
            .sum()
    }

    /// Probability mass at level `level` (0-based) and above.
    pub fn tail_mass(&self, level: usize) -> f64 {
        self.probabilities[level..].iter().sum()
    }

    /// Checks length, feasibility (`T > Σ p_l c_l`) and recoverability.
    pub fn validate_for(&self, spec: &SystemSpec) -> Result<()> {
        if self.probabilities.len() != spec.num_levels() {
            return Err(Error::InvalidPolicy(format!(
                "policy has {} probabilities, system has {} levels",
                self.probabilities.len(),
                spec.num_levels()
            )));
        }
        let cost = self.mean_checkpoint_cost(spec);
        if !(self.interval - cost > 0.0) {
            return Err(Error::InvalidPolicy(format!(
                "infeasible: interval {} s does not exceed mean checkpoint cost {} s",
                self.interval, cost
            )));
        }
        for (l, level) in spec.levels().iter().enumerate() {
            if level.failure_rate > 0.0 && self.tail_mass(l) <= 0.0 {
                return Err(Error::Unrecoverable { level: l + 1 });
            }
        }
        Ok(())
    }
}

/// Result of evaluating a policy against a system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub utilization: f64,
    /// Expected wall-clock seconds per committed interval.
    pub effective_period: f64,
    /// `Σ p_l c_l`.
    pub mean_ckpt_cost: f64,
    /// `R_l` for every level, seconds. A zero-rate level with no checkpoint
    /// mass at or above it never needs recovery and reports 0.
    pub per_level_recovery_cost: Vec<f64>,
}
