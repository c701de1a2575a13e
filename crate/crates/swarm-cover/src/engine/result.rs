//! Run outcomes: metrics, the per-step series, and the settled structure.

use crate::region::Cell;
use crate::rules::{Algorithm, Payload};
use serde::Serialize;

/// One end-of-step sample of the occupancy counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesSample {
    /// Completed steps at the time of the sample (1-based).
    pub t: u64,
    pub mobile: u32,
    pub settled: u32,
    pub closed: u32,
}

/// A settled agent at the end of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SettledRecord {
    pub cell: Cell,
    pub payload: Payload,
    pub closed: bool,
    /// Cell the settler moved from; the root settled in place and has none.
    pub parent: Option<Cell>,
    /// Step index (0-based) in which the agent settled.
    pub settle_step: u64,
}

/// Snapshot of the settled layer, sorted by cell in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureSnapshot {
    pub algorithm: Algorithm,
    pub entry_points: Vec<Cell>,
    /// Number of free cells of the region the run used.
    pub region_free_cells: usize,
    pub settled: Vec<SettledRecord>,
}

/// Everything a run produces. Contains no floats, so equal runs serialize to
/// byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub terminated: bool,
    /// Completed time steps at termination (1-based count), or `max_steps`
    /// on timeout.
    pub t_c: u64,
    /// Number of agents that entered the region.
    pub n_agents: u32,
    /// Total energy: sum over agents of steps spent airborne (a settling
    /// step counts as airborne).
    pub e_total: u64,
    /// Largest single-agent energy.
    pub e_max: u64,
    /// 1-based step in which the last settlement happened, if any.
    pub last_settle_step: Option<u64>,
    pub series: Vec<SeriesSample>,
    pub structure: StructureSnapshot,
}

impl RunResult {
    /// Time from full coverage to the closure signal reaching the entry,
    /// in steps. Meaningful for terminated single-layer runs.
    pub fn closure_lag(&self) -> Option<u64> {
        self.last_settle_step.map(|s| self.t_c.saturating_sub(s))
    }
}
