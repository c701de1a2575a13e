//! Hooks into the simulation loop for traces, logs, and invariant checks.

use super::{FaultEvent, FaultOutcome};
use crate::region::Cell;
use crate::rules::{MobileAction, SettledAction};
use serde::Serialize;
use std::io::Write;

/// Per-step occupancy counters, sampled at the end of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StepCounts {
    pub mobile: u32,
    pub settled: u32,
    pub closed: u32,
}

/// What one agent did at its wake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WakeAction {
    Mobile(MobileAction),
    Settled(SettledAction),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WakeRecord {
    pub agent: u32,
    pub cell: Cell,
    pub action: WakeAction,
}

/// Receives every event of a run in simulation order. All hooks default to
/// no-ops, so observers implement only what they need.
pub trait Observer {
    fn on_step_begin(&mut self, _t: u64) {}
    fn on_entry(&mut self, _t: u64, _agent: u32, _cell: Cell) {}
    fn on_fault(&mut self, _t: u64, _event: &FaultEvent, _outcome: FaultOutcome) {}
    fn on_wake(&mut self, _t: u64, _record: WakeRecord) {}
    fn on_step_end(&mut self, _completed_steps: u64, _counts: StepCounts) {}
}

/// Observer that ignores everything; the fast path for sweeps.
pub struct NullObserver;

impl Observer for NullObserver {}

/// Everything that happened in one time step.
#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub t: u64,
    pub entries: Vec<(u32, Cell)>,
    pub faults: Vec<(FaultEvent, FaultOutcome)>,
    pub wakes: Vec<WakeRecord>,
    pub counts: StepCounts,
}

impl StepReport {
    pub(super) fn empty(t: u64) -> StepReport {
        StepReport {
            t,
            entries: Vec::new(),
            faults: Vec::new(),
            wakes: Vec::new(),
            counts: StepCounts { mobile: 0, settled: 0, closed: 0 },
        }
    }
}

impl Observer for StepReport {
    fn on_entry(&mut self, _t: u64, agent: u32, cell: Cell) {
        self.entries.push((agent, cell));
    }

    fn on_fault(&mut self, _t: u64, event: &FaultEvent, outcome: FaultOutcome) {
        self.faults.push((*event, outcome));
    }

    fn on_wake(&mut self, _t: u64, record: WakeRecord) {
        self.wakes.push(record);
    }

    fn on_step_end(&mut self, _completed: u64, counts: StepCounts) {
        self.counts = counts;
    }
}

/// Writes one JSON object per step: time, entries, wakes in order, actions.
pub struct TraceObserver<W: Write> {
    out: W,
    current: StepReport,
}

impl<W: Write> TraceObserver<W> {
    pub fn new(out: W) -> TraceObserver<W> {
        TraceObserver { out, current: StepReport::empty(0) }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> Observer for TraceObserver<W> {
    fn on_step_begin(&mut self, t: u64) {
        self.current = StepReport::empty(t);
    }

    fn on_entry(&mut self, t: u64, agent: u32, cell: Cell) {
        self.current.on_entry(t, agent, cell);
    }

    fn on_fault(&mut self, t: u64, event: &FaultEvent, outcome: FaultOutcome) {
        self.current.on_fault(t, event, outcome);
    }

    fn on_wake(&mut self, t: u64, record: WakeRecord) {
        self.current.on_wake(t, record);
    }

    fn on_step_end(&mut self, completed: u64, counts: StepCounts) {
        self.current.on_step_end(completed, counts);
        // Trace IO failures surface as a panic rather than corrupting the run.
        serde_json::to_writer(&mut self.out, &self.current).expect("trace write failed");
        self.out.write_all(b"\n").expect("trace write failed");
    }
}
