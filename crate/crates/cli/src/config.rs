//! The JSON run configuration. Every rate and duration carries its unit.

use std::path::PathBuf;

use mlckpt::model::{LevelSpec, OrderingCheck, Policy, SystemSpec, TopologySpec};
use mlckpt::optimizer::OptimizerConfig;
use mlckpt::simulator::{RestartScope, SimulationConfig};
use mlckpt::units::{RateUnit, TimeUnit};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rate {
    pub value: f64,
    pub unit: RateUnit,
}

impl Rate {
    pub fn per_second(&self) -> f64 {
        self.unit.to_per_second(self.value)
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Time {
    pub value: f64,
    pub unit: TimeUnit,
}

impl Time {
    pub fn seconds(&self) -> f64 {
        self.unit.to_seconds(self.value)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSection {
    pub failure_rate: Rate,
    pub checkpoint_cost: Time,
    pub restart_cost: Time,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySection {
    pub critical_path_operators: u32,
    pub hop_delay: Time,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub levels: Vec<LevelSection>,
    pub topology: Option<TopologySection>,
    #[serde(default)]
    pub ordering: OrderingCheck,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySection {
    pub interval: Time,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub t_bounds: Option<[Time; 2]>,
    pub multistarts: Option<usize>,
    pub simplex_tolerance: Option<f64>,
    pub t_tolerance: Option<Time>,
    pub seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub duration: Option<Time>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub restart_failure_scope: RestartScope,
    pub level_sequence: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range<T> {
    pub from: T,
    pub to: T,
    pub steps: usize,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSection {
    /// Two-level `T × p₁` grid.
    Grid { interval: Range<Time>, p1: Range<f64> },
    Interval { from: Time, to: Time, steps: usize },
    Probability { level: usize, from: f64, to: f64, steps: usize },
    CriticalPath { from: u32, to: u32, steps: usize },
    FailureRate { level: usize, from: Rate, to: Rate, steps: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub policy: Option<PolicySection>,
    pub optimizer: Option<OptimizerSection>,
    pub simulation: Option<SimulationSection>,
    pub sweep: Option<SweepSection>,
    pub output: Option<OutputSection>,
}

/// Which optional sections a subcommand reads.
#[derive(Debug, Clone, Copy)]
pub struct Needs {
    pub policy: bool,
    pub optimizer: bool,
    pub simulation: bool,
    pub sweep: bool,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("config: {e}")))
    }

    /// Rejects sections the subcommand does not use and reports missing required ones.
    pub fn check_sections(&self, command: &str, needs: Needs, requires: Needs) -> Result<(), CliError> {
        let present = [
            ("policy", self.policy.is_some(), needs.policy, requires.policy),
            ("optimizer", self.optimizer.is_some(), needs.optimizer, requires.optimizer),
            ("simulation", self.simulation.is_some(), needs.simulation, requires.simulation),
            ("sweep", self.sweep.is_some(), needs.sweep, requires.sweep),
        ];
        for (name, has, used, required) in present {
            if has && !used {
                return Err(CliError::Invalid(format!("config section `{name}` is not used by `{command}`")));
            }
            if required && !has {
                return Err(CliError::Invalid(format!("`{command}` needs a `{name}` section")));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<SystemSpec, CliError> {
        let levels = self
            .system
            .levels
            .iter()
            .map(|l| LevelSpec::new(l.failure_rate.per_second(), l.checkpoint_cost.seconds(), l.restart_cost.seconds()))
            .collect::<Result<Vec<_>, _>>()?;
        let topology = match &self.system.topology {
            Some(t) => Some(TopologySpec::new(t.critical_path_operators, t.hop_delay.seconds())?),
            None => None,
        };
        Ok(SystemSpec::with_ordering(levels, topology, self.system.ordering)?)
    }

    pub fn policy(&self) -> Result<Policy, CliError> {
        let p = self.policy.as_ref().ok_or_else(|| CliError::Invalid("a `policy` section is required".into()))?;
        Ok(Policy::new(p.interval.seconds(), p.probabilities.clone())?)
    }

    pub fn optimizer(&self, seed: Option<u64>) -> OptimizerConfig {
        let mut config = OptimizerConfig::default();
        if let Some(o) = &self.optimizer {
            config.t_bounds = o.t_bounds.map(|[lo, hi]| (lo.seconds(), hi.seconds()));
            config.multistarts = o.multistarts.unwrap_or(config.multistarts);
            config.simplex_tolerance = o.simplex_tolerance.unwrap_or(config.simplex_tolerance);
            config.t_tolerance = o.t_tolerance.map_or(config.t_tolerance, |t| t.seconds());
            config.seed = o.seed.unwrap_or(config.seed);
        }
        if let Some(seed) = seed {
            config.seed = seed;
        }
        config
    }

    pub fn simulation(&self, spec: SystemSpec, policy: Policy, seed: Option<u64>) -> SimulationConfig {
        let mut config = SimulationConfig::new(spec, policy);
        if let Some(s) = &self.simulation {
            config.duration = s.duration.map_or(config.duration, |d| d.seconds());
            config.replicas = s.replicas.unwrap_or(config.replicas);
            config.seed = s.seed.unwrap_or(config.seed);
            config.restart_scope = s.restart_failure_scope;
            config.level_sequence = s.level_sequence.clone();
        }
        if let Some(seed) = seed {
            config.seed = seed;
        }
        config
    }
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    match steps {
        0 => Err(CliError::Invalid("sweep ranges need steps >= 1".into())),
        1 => Ok(vec![from]),
        _ => Ok((0..steps).map(|k| from + (to - from) * k as f64 / (steps - 1) as f64).collect()),
    }
}
