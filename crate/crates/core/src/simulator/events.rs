//! Event records and their line-delimited JSON form.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// `level` is the checkpoint level drawn for this period.
    PeriodStart,
    /// The first operator finished writing the period's checkpoint.
    CheckpointWritten,
    /// The checkpoint became usable for recovery.
    CheckpointCompleted,
    /// Rolled back, whether or not it had completed.
    CheckpointDiscarded,
    /// `level` is the failure level.
    Failure,
    /// Recovery chose the checkpoint identified by `level` and `period`.
    Recovery,
    RestartBegin,
    RestartEnd,
}

/// One simulation event. `level` is 1-based; `period` identifies the
/// checkpoint (period 0 is the initial top-level checkpoint).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub replica: usize,
    pub time: f64,
    pub kind: EventKind,
    pub level: usize,
    pub period: u64,
}

/// Writes one JSON object per line.
pub fn write_event_log<W: Write>(events: &[Event], mut out: W) -> io::Result<()> {
    for event in events {
        serde_json::to_writer(&mut out, event)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses the output of [`write_event_log`].
pub fn read_event_log(text: &str) -> serde_json::Result<Vec<Event>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(serde_json::from_str).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let events = vec![
            Event { replica: 0, time: 0.0, kind: EventKind::CheckpointCompleted, level: 2, period: 0 },
            Event { replica: 3, time: 12.5, kind: EventKind::RestartBegin, level: 1, period: 7 },
        ];
        let mut buf = Vec::new();
        write_event_log(&events, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"replica":0,"time":0.0,"kind":"checkpoint_completed","level":2,"period":0}"#));
        assert_eq!(read_event_log(&text).unwrap(), events);
    }
}
