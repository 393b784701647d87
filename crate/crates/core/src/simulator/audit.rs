//! Replays an event log and checks every recovery decision.

use std::fmt;

use super::events::{Event, EventKind};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditViolation {
    pub replica: usize,
    pub time: f64,
    pub message: String,
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "replica {} at t = {}: {}", self.replica, self.time, self.message)
    }
}

impl std::error::Error for AuditViolation {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditSummary {
    pub replicas: usize,
    pub failures_checked: usize,
}

/// Checks that events are time-ordered within each replica and that every
/// failure of level `l` recovers from the newest completed, not yet
/// discarded checkpoint of level `≥ l`.
pub fn audit_events(events: &[Event]) -> Result<AuditSummary, AuditViolation> {
    let mut summary = AuditSummary { replicas: 0, failures_checked: 0 };
    let mut start = 0;
    while start < events.len() {
        let replica = events[start].replica;
        let end = events[start..].iter().position(|e| e.replica != replica).map_or(events.len(), |k| start + k);
        summary.failures_checked += audit_replica(&events[start..end])?;
        summary.replicas += 1;
        start = end;
    }
    Ok(summary)
}

fn audit_replica(events: &[Event]) -> Result<usize, AuditViolation> {
    // (level, period) of usable checkpoints, oldest first
    let mut alive: Vec<(usize, u64)> = Vec::new();
    let mut open_failure: Option<usize> = None;
    let mut checked = 0;
    let mut last_time = f64::NEG_INFINITY;
    for e in events {
        let violation = |message: String| AuditViolation { replica: e.replica, time: e.time, message };
        if e.time < last_time {
            return Err(violation(format!("time went backwards from {last_time}")));
        }
        last_time = e.time;
        match e.kind {
            EventKind::CheckpointCompleted => alive.push((e.level, e.period)),
            EventKind::CheckpointDiscarded => alive.retain(|&(_, p)| p != e.period),
            EventKind::Failure => {
                if let Some(level) = open_failure {
                    return Err(violation(format!("level-{level} failure was never recovered")));
                }
                open_failure = Some(e.level);
            }
            EventKind::Recovery => {
                let failed = open_failure.take().ok_or_else(|| violation("recovery without a failure".into()))?;
                if e.level < failed {
                    return Err(violation(format!("level-{failed} failure recovered from level {}", e.level)));
                }
                match alive.iter().rev().find(|(l, _)| *l >= failed) {
                    Some(&(level, period)) if (level, period) == (e.level, e.period) => {}
                    Some(&(level, period)) => {
                        return Err(violation(format!(
                            "recovered from period {} but level-{level} checkpoint of period {period} is newer",
                            e.period
                        )))
                    }
                    None => return Err(violation(format!("no completed checkpoint of level >= {failed}"))),
                }
                checked += 1;
            }
            EventKind::PeriodStart | EventKind::CheckpointWritten | EventKind::RestartBegin | EventKind::RestartEnd => {
                if let Some(level) = open_failure {
                    return Err(violation(format!("level-{level} failure was never recovered")));
                }
            }
        }
    }
    Ok(checked)
}
