//! Single-replica event loop.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp;

use super::events::{Event, EventKind};
use super::{EventCounts, ReplicaAccounting, RestartScope, SimulationConfig};

/// A pending failure: `(time, level)`, ordered by time then level.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Clock(f64, usize);

impl Eq for Clock {}

impl PartialOrd for Clock {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Clock {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// A checkpoint that has been written and not rolled back.
#[derive(Debug, Clone, Copy)]
struct Entry {
    level: usize,
    useful: f64,
    checkpoint: f64,
    completion: f64,
    period: u64,
}

pub(super) struct ReplicaOutcome {
    pub accounting: ReplicaAccounting,
    pub counts: EventCounts,
    pub events: Vec<Event>,
}

struct Replica<'a> {
    config: &'a SimulationConfig,
    id: usize,
    rng: ChaCha8Rng,
    // `None` for levels that never fail
    inter_arrival: Vec<Option<Exp<f64>>>,
    clocks: BinaryHeap<Reverse<Clock>>,
    stack: Vec<Entry>,
    pending: VecDeque<usize>,
    lost: f64,
    restart: f64,
    counts: EventCounts,
    events: Vec<Event>,
}

enum Recovered {
    ResumeAt(f64),
    RunEnded,
}

impl<'a> Replica<'a> {
    fn new(config: &'a SimulationConfig, id: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(id as u64);
        let levels = config.spec.levels();
        let inter_arrival: Vec<Option<Exp<f64>>> = levels
            .iter()
            .map(|l| (l.failure_rate > 0.0).then(|| Exp::new(l.failure_rate).expect("rate validated positive")))
            .collect();
        let top = levels.len() - 1;
        let mut replica = Replica {
            config,
            id,
            rng,
            inter_arrival,
            clocks: BinaryHeap::new(),
            stack: vec![Entry { level: top, useful: 0.0, checkpoint: 0.0, completion: 0.0, period: 0 }],
            pending: VecDeque::new(),
            lost: 0.0,
            restart: 0.0,
            counts: EventCounts::zeros(levels.len()),
            events: Vec::new(),
        };
        for level in 0..levels.len() {
            replica.schedule(level, 0.0);
        }
        replica.emit(0.0, EventKind::CheckpointCompleted, top, 0);
        replica
    }

    fn schedule(&mut self, level: usize, from: f64) {
        if let Some(exp) = &self.inter_arrival[level] {
            let t = from + exp.sample(&mut self.rng);
            self.clocks.push(Reverse(Clock(t, level)));
        }
    }

    fn next_failure(&self) -> Clock {
        self.clocks.peek().map_or(Clock(f64::INFINITY, usize::MAX), |c| c.0)
    }

    /// Consumes the next failure and draws that level's following one.
    fn pop_failure(&mut self) -> Clock {
        let Reverse(clock) = self.clocks.pop().expect("caller checked a finite failure exists");
        self.schedule(clock.1, clock.0);
        self.counts.failures[clock.1] += 1;
        clock
    }

    fn emit(&mut self, time: f64, kind: EventKind, level: usize, period: u64) {
        if self.config.record_events {
            self.events.push(Event { replica: self.id, time, kind, level: level + 1, period });
        }
    }

    /// Marks every written checkpoint whose completion is at or before `t` complete.
    fn complete_until(&mut self, t: f64) {
        while let Some(&idx) = self.pending.front() {
            let entry = self.stack[idx];
            if entry.completion > t {
                break;
            }
            self.pending.pop_front();
            self.counts.checkpoints_completed[entry.level] += 1;
            self.emit(entry.completion, EventKind::CheckpointCompleted, entry.level, entry.period);
        }
    }

    fn draw_level(&mut self, chooser: &Option<WeightedIndex<f64>>, period: u64) -> usize {
        match &self.config.level_sequence {
            Some(seq) => seq[(period as usize - 1) % seq.len()] - 1,
            None => chooser.as_ref().expect("chooser built without an override").sample(&mut self.rng),
        }
    }

    fn run(mut self) -> ReplicaOutcome {
        let cfg = self.config;
        let levels = cfg.spec.levels();
        let interval = cfg.policy.interval;
        let lag = cfg.spec.completion_lag();
        let duration = cfg.duration;
        let chooser = match cfg.level_sequence {
            Some(_) => None,
            None => Some(WeightedIndex::new(&cfg.policy.probabilities).expect("probabilities validated")),
        };

        let mut start = 0.0;
        let mut period: u64 = 0;
        let mut partial = (0.0, 0.0);
        loop {
            period += 1;
            let level = self.draw_level(&chooser, period);
            let cost = levels[level].checkpoint_cost;
            let end = start + interval;
            self.complete_until(start);
            self.emit(start, EventKind::PeriodStart, level, period);
            let failure = self.next_failure();

            if end <= failure.0 && end <= duration {
                self.complete_until(end);
                self.emit(end, EventKind::CheckpointWritten, level, period);
                self.stack.push(Entry {
                    level,
                    useful: interval - cost,
                    checkpoint: cost,
                    completion: end + lag,
                    period,
                });
                self.pending.push_back(self.stack.len() - 1);
                self.complete_until(end);
                start = end;
                continue;
            }
            if duration <= failure.0 {
                // the run stops mid-period; its useful part counts as done
                let elapsed = duration - start;
                let useful = elapsed.min(interval - cost);
                partial = (useful, elapsed - useful);
                self.complete_until(duration);
                break;
            }

            let failure = self.pop_failure();
            self.complete_until(failure.0);
            self.lost += failure.0 - start;
            self.emit(failure.0, EventKind::Failure, failure.1, period);
            match self.recover(failure, period) {
                Recovered::ResumeAt(t) => start = t,
                Recovered::RunEnded => break,
            }
        }

        let committed = self.stack.iter().map(|e| e.useful).sum::<f64>() + partial.0;
        let checkpoint = self.stack.iter().map(|e| e.checkpoint).sum::<f64>() + partial.1;
        let accounting = ReplicaAccounting { committed, checkpoint, lost: self.lost, restart: self.restart, duration };
        ReplicaOutcome { accounting, counts: self.counts, events: self.events }
    }

    /// Rolls back to the newest completed checkpoint of level `≥ failure.1`,
    /// then restarts from it, retrying on failures the scope allows.
    fn recover(&mut self, mut failure: Clock, period: u64) -> Recovered {
        let cfg = self.config;
        let duration = cfg.duration;
        'rollback: loop {
            let (time, level) = (failure.0, failure.1);
            let keep = self
                .stack
                .iter()
                .rposition(|e| e.level >= level && e.completion <= time)
                .expect("a completed top-level checkpoint always exists");
            // everything still pending lies past `time`, so above `keep`
            self.pending.clear();
            for idx in keep + 1..self.stack.len() {
                let e = self.stack[idx];
                self.lost += e.useful + e.checkpoint;
                self.counts.checkpoints_discarded[e.level] += 1;
                self.emit(time, EventKind::CheckpointDiscarded, e.level, e.period);
            }
            self.stack.truncate(keep + 1);

            let target = self.stack[keep];
            let r = cfg.spec.levels()[target.level].restart_cost;
            let mut begin = time;
            self.emit(time, EventKind::Recovery, target.level, target.period);
            loop {
                let end = begin + r;
                self.counts.restart_attempts[target.level] += 1;
                self.emit(begin, EventKind::RestartBegin, target.level, target.period);
                if cfg.restart_scope == RestartScope::PaperAssumption {
                    // higher levels are held off during the restart; memorylessness
                    // lets their next arrival be redrawn from its end
                    while let Some(&Reverse(Clock(t, l))) = self.clocks.peek() {
                        if l <= target.level || t >= end {
                            break;
                        }
                        self.clocks.pop();
                        self.schedule(l, end);
                    }
                }
                let next = self.next_failure();
                if next.0 >= end || next.0 >= duration {
                    if end >= duration {
                        self.restart += duration - begin;
                        return Recovered::RunEnded;
                    }
                    self.restart += end - begin;
                    self.emit(end, EventKind::RestartEnd, target.level, target.period);
                    return Recovered::ResumeAt(end);
                }
                let hit = self.pop_failure();
                self.restart += hit.0 - begin;
                self.emit(hit.0, EventKind::Failure, hit.1, period);
                if hit.1 > target.level {
                    failure = hit;
                    continue 'rollback;
                }
                self.emit(hit.0, EventKind::Recovery, target.level, target.period);
                begin = hit.0;
            }
        }
    }
}

pub(super) fn run_replica(config: &SimulationConfig, id: usize) -> ReplicaOutcome {
    Replica::new(config, id).run()
}
