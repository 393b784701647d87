//! Unit conversion for failure rates and durations.
//!
//! Everything inside the crate is in seconds and failures per second. Rates
//! quoted per day are the usual way of stating these systems, so they are
//! converted once on ingestion.

use serde::{Deserialize, Serialize};

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateUnit {
    PerSecond,
    PerDay,
}

impl RateUnit {
    pub fn to_per_second(self, value: f64) -> f64 {
        match self {
            RateUnit::PerSecond => value,
            RateUnit::PerDay => value / SECONDS_PER_DAY,
        }
    }

    pub fn from_per_second(self, value: f64) -> f64 {
        match self {
            RateUnit::PerSecond => value,
            RateUnit::PerDay => value * SECONDS_PER_DAY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    Seconds,
    Minutes,
    Hours,
    Days,
}

impl TimeUnit {
    pub fn to_seconds(self, value: f64) -> f64 {
        match self {
            TimeUnit::Seconds => value,
            TimeUnit::Minutes => value * 60.0,
            TimeUnit::Hours => value * 3_600.0,
            TimeUnit::Days => value * SECONDS_PER_DAY,
        }
    }
}

/// Converts a rate given per day into failures per second.
pub fn per_day(value: f64) -> f64 {
    RateUnit::PerDay.to_per_second(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn day_rates_convert() {
        assert_eq!(per_day(86_400.0), 1.0);
        assert_eq!(RateUnit::PerDay.from_per_second(per_day(50.0)), 50.0);
        assert_eq!(TimeUnit::Minutes.to_seconds(30.0), 1800.0);
    }
}
