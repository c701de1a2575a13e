//! World state and the asynchronous simulation loop.
//!
//! A run advances in discrete time steps. Within a step, entries happen at
//! sub-time 0 (every `delta_t` steps, one attempt per entry point in list
//! order), scheduled faults fire right after, and then every agent present
//! wakes exactly once at a random sub-time and executes an atomic
//! look-compute-act cycle. Because each agent wakes once per step, any agent
//! wakes 0, 1, or 2 times between two consecutive wakes of another (a fair
//! 2-bounded asynchronous scheduler).
//!
//! Runs are deterministic: the same region, config, and seed produce a
//! byte-identical [`RunResult`].

mod observer;
mod result;
mod world;

pub use observer::{
    NullObserver, Observer, StepCounts, StepReport, TraceObserver, WakeAction, WakeRecord,
};
pub use result::{RunResult, SeriesSample, SettledRecord, StructureSnapshot};
pub use world::{AgentRecord, SenseKind, World};

use crate::region::{Cell, Direction, Region};
use crate::rules::Algorithm;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Wake-ordering policy within a time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheduler {
    /// Every agent draws an i.i.d. uniform sub-time; ties break by entry
    /// index.
    UniformRandom,
    /// Agents wake in ascending BFS distance of their current cell from the
    /// first entry point, ties by entry index. Worst case for linear regions.
    Adversarial,
}

impl Scheduler {
    pub fn parse(s: &str) -> Option<Scheduler> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "uniformrandom" | "random" => Some(Scheduler::UniformRandom),
            "adversarial" | "adv" => Some(Scheduler::Adversarial),
            _ => None,
        }
    }
}

impl std::fmt::Display for Scheduler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheduler::UniformRandom => f.write_str("uniform"),
            Scheduler::Adversarial => f.write_str("adversarial"),
        }
    }
}

/// A scheduled failure injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub at_step: u64,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultKind {
    /// Remove the mobile agent above this cell.
    KillMobile(Cell),
    /// Blow the mobile agent above this cell one step in the given direction.
    DisplaceMobile(Cell, Direction),
    /// Remove the settled agent in this cell.
    KillSettled(Cell),
}

impl FaultKind {
    pub fn cell(&self) -> Cell {
        match *self {
            FaultKind::KillMobile(c) | FaultKind::DisplaceMobile(c, _) | FaultKind::KillSettled(c) => c,
        }
    }
}

/// What a fault application actually did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FaultOutcome {
    RemovedMobile,
    Displaced,
    /// Displaced onto empty ground; the agent settled there projecting the
    /// entry-like payload.
    DisplacedSettled,
    /// Displaced into an occupied air slot; both mobiles removed.
    MutualFailure,
    /// Displaced into a wall; the agent is lost.
    CrashedIntoWall,
    RemovedSettled,
    /// The targeted slot was not occupied by the right kind of agent; the
    /// world is unchanged.
    TargetMissing,
}

/// Parameters of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Steps between successive entry attempts.
    pub delta_t: u32,
    pub scheduler: Scheduler,
    pub seed: u64,
    pub max_steps: u64,
    /// Sub-time resolution M; wake sub-times are uniform over 1..M.
    pub sub_steps: u32,
    pub faults: Vec<FaultEvent>,
}

impl RunConfig {
    pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;
    pub const DEFAULT_SUB_STEPS: u32 = 1 << 20;

    pub fn new(algorithm: Algorithm, seed: u64) -> RunConfig {
        RunConfig {
            algorithm,
            delta_t: 1,
            scheduler: Scheduler::UniformRandom,
            seed,
            max_steps: Self::DEFAULT_MAX_STEPS,
            sub_steps: Self::DEFAULT_SUB_STEPS,
            faults: Vec::new(),
        }
    }

    pub fn with_delta_t(mut self, delta_t: u32) -> RunConfig {
        self.delta_t = delta_t;
        self
    }

    pub fn with_scheduler(mut self, scheduler: Scheduler) -> RunConfig {
        self.scheduler = scheduler;
        self
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> RunConfig {
        self.max_steps = max_steps;
        self
    }

    pub fn with_faults(mut self, faults: Vec<FaultEvent>) -> RunConfig {
        self.faults = faults;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.delta_t == 0 {
            return Err(EngineError::InvalidConfig("delta_t must be >= 1".into()));
        }
        if self.max_steps == 0 {
            return Err(EngineError::InvalidConfig("max_steps must be >= 1".into()));
        }
        if self.sub_steps < 2 {
            return Err(EngineError::InvalidConfig("sub_steps must be >= 2".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.faults {
            if !seen.insert((f.at_step, f.kind.cell())) {
                return Err(EngineError::InvalidConfig(format!(
                    "duplicate fault at step {} cell {}",
                    f.at_step,
                    f.kind.cell()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("step called on a terminated world")]
    AlreadyTerminated,
    #[error("world invariant violated: {0}")]
    InvariantViolation(String),
    #[error("invalid run config: {0}")]
    InvalidConfig(String),
}

/// Runs a configuration to termination or `max_steps`.
///
/// A timeout is not an error: the result carries `terminated == false` and
/// the metrics accumulated so far.
pub fn run(region: &Region, config: &RunConfig) -> Result<RunResult, EngineError> {
    run_with_observer(region, config, &mut NullObserver)
}

/// [`run`] with an observer receiving entries, faults, wakes, and step ends.
pub fn run_with_observer<O: Observer>(
    region: &Region,
    config: &RunConfig,
    observer: &mut O,
) -> Result<RunResult, EngineError> {
    config.validate()?;
    let mut world = World::new(region.clone(), config.clone());
    let mut series = Vec::new();
    while !world.terminated() && world.time() < config.max_steps {
        world.step_with(observer)?;
        series.push(SeriesSample {
            t: world.time(),
            mobile: world.mobile_count(),
            settled: world.settled_count(),
            closed: world.closed_count(),
        });
    }
    Ok(world.into_result(series))
}
