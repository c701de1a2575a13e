//! The mutable simulation state and the step function.

use super::observer::{Observer, StepCounts, StepReport, WakeAction, WakeRecord};
use super::result::{RunResult, SeriesSample, SettledRecord, StructureSnapshot};
use super::{EngineError, FaultEvent, FaultKind, FaultOutcome, RunConfig, Scheduler};
use crate::region::{Cell, Region, DIRECTIONS};
use crate::rules::{self, MobileAction, Neighborhood, Payload, Phys, SettledAction, Slot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Bookkeeping record for one agent. The index is an entry ordinal used for
/// tie-breaking and logs only; rule logic never sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AgentRecord {
    pub index: u32,
    pub phys: Phys,
    pub payload: Payload,
    pub position: Cell,
    pub entry_step: u64,
    pub settle_step: Option<u64>,
    /// Step in which a fault removed this agent, if any.
    pub removed_step: Option<u64>,
    /// Cell the agent settled from (none for in-place settles).
    pub parent: Option<Cell>,
}

impl AgentRecord {
    pub fn is_live(&self) -> bool {
        self.removed_step.is_none()
    }

    /// Steps this agent spent airborne, counting its settling step.
    pub fn mobile_steps(&self, last_completed_step: u64) -> u64 {
        let end = self.settle_step.or(self.removed_step).unwrap_or(last_completed_step);
        end - self.entry_step + 1
    }
}

/// Whether a sense comes from a mobile or a settled agent; settled agents
/// only sense the ground layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SenseKind {
    Mobile,
    Settled,
}

/// Full simulation state for one run.
pub struct World {
    region: Region,
    config: RunConfig,
    rng: ChaCha8Rng,
    /// Ground and air occupants per cell, by agent index.
    ground: Vec<Option<u32>>,
    air: Vec<Option<u32>>,
    agents: Vec<AgentRecord>,
    t: u64,
    entered: u32,
    mobile_count: u32,
    settled_count: u32,
    closed_count: u32,
    free_cells: usize,
    /// BFS distances from the first entry point (adversarial wake order).
    bfs: Vec<Option<u32>>,
    /// Faults sorted by step; `next_fault` indexes the first unapplied one.
    faults: Vec<FaultEvent>,
    next_fault: usize,
    /// Cells vacated by a settled-agent failure and not yet refilled.
    vacated: Vec<bool>,
    fault_mode: bool,
    terminated: bool,
    wake_buf: Vec<(u32, u32)>,
}

impl World {
    pub fn new(region: Region, config: RunConfig) -> World {
        let cells = region.width() * region.height();
        let bfs = region.bfs_distances(region.entry_points()[0]);
        let mut faults = config.faults.clone();
        faults.sort_by_key(|f| f.at_step);
        let fault_mode = !faults.is_empty();
        World {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            ground: vec![None; cells],
            air: vec![None; cells],
            agents: Vec::new(),
            t: 0,
            entered: 0,
            mobile_count: 0,
            settled_count: 0,
            closed_count: 0,
            free_cells: region.free_count(),
            bfs,
            faults,
            next_fault: 0,
            vacated: vec![false; cells],
            fault_mode,
            terminated: false,
            wake_buf: Vec::new(),
            region,
            config,
        }
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Completed time steps so far.
    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn terminated(&self) -> bool {
        self.terminated
    }

    pub fn entered(&self) -> u32 {
        self.entered
    }

    pub fn mobile_count(&self) -> u32 {
        self.mobile_count
    }

    pub fn settled_count(&self) -> u32 {
        self.settled_count
    }

    pub fn closed_count(&self) -> u32 {
        self.closed_count
    }

    pub fn agents(&self) -> &[AgentRecord] {
        &self.agents
    }

    pub fn ground_agent(&self, cell: Cell) -> Option<&AgentRecord> {
        self.ground[self.region.index(cell)].map(|i| &self.agents[i as usize])
    }

    pub fn air_agent(&self, cell: Cell) -> Option<&AgentRecord> {
        self.air[self.region.index(cell)].map(|i| &self.agents[i as usize])
    }

    /// Builds the 10-slot sensing tuple for an agent at `cell`.
    ///
    /// Settled callers receive ground slots only; their air slots are masked
    /// to `Empty`. Walls encode themselves, and a wall ground slot implies a
    /// wall air slot.
    pub fn sense(&self, cell: Cell, kind: SenseKind) -> Neighborhood {
        debug_assert!(self.region.is_free(cell));
        let mut slots = [Slot::Empty; 10];
        slots[0] = self.slot_view(self.ground[self.region.index(cell)]);
        slots[5] = match kind {
            SenseKind::Mobile => self.slot_view(self.air[self.region.index(cell)]),
            SenseKind::Settled => Slot::Empty,
        };
        for d in DIRECTIONS {
            let v = cell.step(d);
            if !self.region.is_free(v) {
                slots[d.index()] = Slot::Wall;
                slots[d.index() + 5] = Slot::Wall;
            } else {
                let vi = self.region.index(v);
                slots[d.index()] = self.slot_view(self.ground[vi]);
                slots[d.index() + 5] = match kind {
                    SenseKind::Mobile => self.slot_view(self.air[vi]),
                    SenseKind::Settled => Slot::Empty,
                };
            }
        }
        Neighborhood { slots }
    }

    fn slot_view(&self, occupant: Option<u32>) -> Slot {
        match occupant {
            None => Slot::Empty,
            Some(i) => {
                let a = &self.agents[i as usize];
                Slot::View { phys: a.phys, payload: a.payload }
            }
        }
    }

    /// Executes one time step and returns a report of everything that
    /// happened in it.
    pub fn step(&mut self) -> Result<StepReport, EngineError> {
        let mut report = StepReport::empty(self.t);
        self.step_with(&mut report)?;
        Ok(report)
    }

    /// Executes one time step, feeding events to `obs`.
    pub fn step_with<O: Observer>(&mut self, obs: &mut O) -> Result<(), EngineError> {
        if self.terminated {
            return Err(EngineError::AlreadyTerminated);
        }
        let t = self.t;
        obs.on_step_begin(t);

        // Sub-time 0: entries, then faults.
        if t % self.config.delta_t as u64 == 0 {
            for i in 0..self.region.entry_points().len() {
                let ep = self.region.entry_points()[i];
                if let Some(agent) = self.try_enter(ep, t) {
                    obs.on_entry(t, agent, ep);
                }
            }
        }
        while self.next_fault < self.faults.len() && self.faults[self.next_fault].at_step == t {
            let event = self.faults[self.next_fault];
            self.next_fault += 1;
            let outcome = self.apply_fault(&event);
            obs.on_fault(t, &event, outcome);
        }

        // Draw the wake order. Every live agent wakes exactly once.
        let mut wakes = std::mem::take(&mut self.wake_buf);
        wakes.clear();
        match self.config.scheduler {
            Scheduler::UniformRandom => {
                let m = self.config.sub_steps;
                for i in 0..self.agents.len() {
                    if self.agents[i].is_live() {
                        let sub = self.rng.gen_range(1..m);
                        wakes.push((sub, i as u32));
                    }
                }
            }
            Scheduler::Adversarial => {
                for a in &self.agents {
                    if a.is_live() {
                        let key = self.bfs[self.region.index(a.position)]
                            .expect("agent on a cell unreachable from the entry");
                        wakes.push((key, a.index));
                    }
                }
            }
        }
        wakes.sort_unstable();

        let algo = self.config.algorithm;
        for &(_, id) in &wakes {
            let agent = self.agents[id as usize];
            let action = match agent.phys {
                Phys::Mobile => {
                    let xi = self.sense(agent.position, SenseKind::Mobile);
                    let action = rules::mobile_action(algo, &xi, agent.payload, &mut self.rng);
                    self.apply_mobile(id, action)?;
                    WakeAction::Mobile(action)
                }
                Phys::Beacon | Phys::ClosedBeacon => {
                    match self.config.algorithm.bpc_variant() {
                        Some(variant) => {
                            let xi = self.sense(agent.position, SenseKind::Settled);
                            let action = rules::bpc_settled(&xi, variant, self.fault_mode);
                            self.apply_settled(id, action)?;
                            WakeAction::Settled(action)
                        }
                        // Dual-layer beacons only project; their wake is a no-op.
                        None => WakeAction::Settled(SettledAction::RemainBeacon),
                    }
                }
            };
            obs.on_wake(t, WakeRecord { agent: id, cell: agent.position, action });
        }
        self.wake_buf = wakes;

        self.t += 1;
        self.evaluate_termination()?;
        obs.on_step_end(
            self.t,
            StepCounts {
                mobile: self.mobile_count,
                settled: self.settled_count,
                closed: self.closed_count,
            },
        );
        Ok(())
    }

    fn try_enter(&mut self, ep: Cell, t: u64) -> Option<u32> {
        let idx = self.region.index(ep);
        if self.air[idx].is_some() {
            return None;
        }
        if self.config.algorithm.is_single_layer() {
            if let Some(g) = self.ground[idx] {
                if self.agents[g as usize].phys == Phys::ClosedBeacon {
                    return None;
                }
            }
        }
        let id = self.entered;
        self.agents.push(AgentRecord {
            index: id,
            phys: Phys::Mobile,
            payload: self.config.algorithm.initial_payload(),
            position: ep,
            entry_step: t,
            settle_step: None,
            removed_step: None,
            parent: None,
        });
        self.air[idx] = Some(id);
        self.entered += 1;
        self.mobile_count += 1;
        Some(id)
    }

    fn apply_mobile(&mut self, id: u32, action: MobileAction) -> Result<(), EngineError> {
        let pos = self.agents[id as usize].position;
        match action {
            MobileAction::SettleHere { payload } => self.settle(id, pos, pos, payload, false),
            MobileAction::SettleAt { dir, payload } => {
                let target = pos.step(dir);
                if !self.region.is_free(target) {
                    return Err(EngineError::InvariantViolation(format!(
                        "settle into non-free cell {target}"
                    )));
                }
                self.settle(id, pos, target, payload, true)
            }
            MobileAction::Move { dir, payload } => {
                let target = pos.step(dir);
                if !self.region.is_free(target) {
                    return Err(EngineError::InvariantViolation(format!(
                        "move into non-free cell {target}"
                    )));
                }
                let (from, to) = (self.region.index(pos), self.region.index(target));
                if self.air[to].is_some() {
                    return Err(EngineError::InvariantViolation(format!(
                        "move into occupied air slot at {target}"
                    )));
                }
                self.air[from] = None;
                self.air[to] = Some(id);
                let agent = &mut self.agents[id as usize];
                agent.position = target;
                agent.payload = payload;
                Ok(())
            }
            MobileAction::Stay => Ok(()),
        }
    }

    fn settle(
        &mut self,
        id: u32,
        from: Cell,
        target: Cell,
        payload: Payload,
        moved: bool,
    ) -> Result<(), EngineError> {
        let to = self.region.index(target);
        if self.ground[to].is_some() {
            return Err(EngineError::InvariantViolation(format!(
                "settle into occupied ground at {target}"
            )));
        }
        let payload = self.adjust_refill_payload(target, payload);
        self.air[self.region.index(from)] = None;
        self.ground[to] = Some(id);
        let t = self.t;
        let agent = &mut self.agents[id as usize];
        agent.position = target;
        agent.phys = Phys::Beacon;
        agent.payload = payload;
        agent.settle_step = Some(t);
        agent.parent = moved.then_some(from);
        self.check_step_count_adjacency(target, payload)?;
        self.mobile_count -= 1;
        self.settled_count += 1;
        Ok(())
    }

    /// A settler refilling a cell vacated by a settled-agent failure projects
    /// one more than the lowest neighboring step count, so the gradient stays
    /// connected to the entry.
    fn adjust_refill_payload(&mut self, target: Cell, payload: Payload) -> Payload {
        let idx = self.region.index(target);
        if !self.vacated[idx] {
            return payload;
        }
        self.vacated[idx] = false;
        match payload {
            Payload::StepCount(_) => {
                let min_neighbor = DIRECTIONS
                    .iter()
                    .filter_map(|&d| self.region.neighbor(target, d))
                    .filter_map(|v| self.ground[self.region.index(v)])
                    .map(|g| self.agents[g as usize].payload.step_count())
                    .min();
                match min_neighbor {
                    Some(sc) => Payload::StepCount(sc + 1),
                    None => payload,
                }
            }
            Payload::Arrow(_) => payload,
        }
    }

    /// Every settled step count above 1 must sit next to a step count one
    /// lower at settle time. Refills next to a fault hole are exempt: their
    /// projection is anchored to the lowest surviving neighbor instead.
    fn check_step_count_adjacency(&self, cell: Cell, payload: Payload) -> Result<(), EngineError> {
        let Payload::StepCount(sc) = payload else { return Ok(()) };
        if sc <= 1 || self.fault_mode {
            return Ok(());
        }
        let ok = DIRECTIONS.iter().any(|&d| {
            self.region
                .neighbor(cell, d)
                .and_then(|v| self.ground[self.region.index(v)])
                .is_some_and(|g| self.agents[g as usize].payload.step_count() == sc - 1)
        });
        if ok {
            Ok(())
        } else {
            Err(EngineError::InvariantViolation(format!(
                "settled step count {sc} at {cell} without a {} neighbor",
                sc - 1
            )))
        }
    }

    fn apply_settled(&mut self, id: u32, action: SettledAction) -> Result<(), EngineError> {
        match action {
            SettledAction::RemainBeacon => Ok(()),
            SettledAction::BecomeClosed => {
                let cell = self.agents[id as usize].position;
                let open_neighbor = DIRECTIONS.iter().any(|&d| {
                    self.region
                        .neighbor(cell, d)
                        .is_some_and(|v| self.ground[self.region.index(v)].is_none())
                });
                if open_neighbor {
                    return Err(EngineError::InvariantViolation(format!(
                        "beacon at {cell} closed next to an empty cell"
                    )));
                }
                self.agents[id as usize].phys = Phys::ClosedBeacon;
                self.closed_count += 1;
                Ok(())
            }
            SettledAction::RevertToBeacon => {
                self.agents[id as usize].phys = Phys::Beacon;
                self.closed_count -= 1;
                Ok(())
            }
        }
    }

    /// Applies a single fault event; missing targets leave the world
    /// unchanged.
    pub fn apply_fault(&mut self, event: &FaultEvent) -> FaultOutcome {
        let t = self.t;
        match event.kind {
            FaultKind::KillMobile(cell) => {
                let idx = self.region.index(cell);
                match self.air[idx] {
                    None => FaultOutcome::TargetMissing,
                    Some(a) => {
                        self.air[idx] = None;
                        self.agents[a as usize].removed_step = Some(t);
                        self.mobile_count -= 1;
                        FaultOutcome::RemovedMobile
                    }
                }
            }
            FaultKind::DisplaceMobile(cell, dir) => {
                let idx = self.region.index(cell);
                let Some(a) = self.air[idx] else { return FaultOutcome::TargetMissing };
                let target = cell.step(dir);
                if !self.region.is_free(target) {
                    self.air[idx] = None;
                    self.agents[a as usize].removed_step = Some(t);
                    self.mobile_count -= 1;
                    return FaultOutcome::CrashedIntoWall;
                }
                let to = self.region.index(target);
                if self.ground[to].is_none() {
                    // Lands like a first entrant: step count 1 (or a rootless
                    // arrow), unless the cell is a marked fault hole.
                    let payload = match self.config.algorithm.initial_payload() {
                        Payload::StepCount(_) => Payload::StepCount(1),
                        Payload::Arrow(_) => Payload::Arrow(None),
                    };
                    let payload = self.adjust_refill_payload(target, payload);
                    self.air[idx] = None;
                    self.ground[to] = Some(a);
                    let agent = &mut self.agents[a as usize];
                    agent.position = target;
                    agent.phys = Phys::Beacon;
                    agent.payload = payload;
                    agent.settle_step = Some(t);
                    agent.parent = None;
                    self.mobile_count -= 1;
                    self.settled_count += 1;
                    FaultOutcome::DisplacedSettled
                } else if let Some(b) = self.air[to] {
                    self.air[idx] = None;
                    self.air[to] = None;
                    self.agents[a as usize].removed_step = Some(t);
                    self.agents[b as usize].removed_step = Some(t);
                    self.mobile_count -= 2;
                    FaultOutcome::MutualFailure
                } else {
                    self.air[idx] = None;
                    self.air[to] = Some(a);
                    self.agents[a as usize].position = target;
                    FaultOutcome::Displaced
                }
            }
            FaultKind::KillSettled(cell) => {
                let idx = self.region.index(cell);
                match self.ground[idx] {
                    None => FaultOutcome::TargetMissing,
                    Some(g) => {
                        self.ground[idx] = None;
                        let agent = &mut self.agents[g as usize];
                        if agent.phys == Phys::ClosedBeacon {
                            self.closed_count -= 1;
                        }
                        agent.removed_step = Some(t);
                        self.settled_count -= 1;
                        self.vacated[idx] = true;
                        FaultOutcome::RemovedSettled
                    }
                }
            }
        }
    }

    fn evaluate_termination(&mut self) -> Result<(), EngineError> {
        let condition = if self.config.algorithm.is_single_layer() {
            self.region.entry_points().iter().all(|&ep| {
                self.ground[self.region.index(ep)]
                    .is_some_and(|g| self.agents[g as usize].phys == Phys::ClosedBeacon)
            })
        } else {
            self.settled_count as usize == self.free_cells
                && self.mobile_count as usize == self.free_cells
        };
        if !condition {
            return Ok(());
        }
        // Closure at the entry is a promise of full coverage; verify it.
        if self.config.algorithm.is_single_layer() && self.settled_count as usize != self.free_cells
        {
            return Err(EngineError::InvariantViolation(format!(
                "entry closed with {}/{} cells settled",
                self.settled_count, self.free_cells
            )));
        }
        // With faults still scheduled the run keeps going; the final
        // termination is the one after every fault has been applied.
        if self.next_fault >= self.faults.len() {
            self.terminated = true;
        }
        Ok(())
    }

    /// Consumes the world into the final metrics.
    pub fn into_result(self, series: Vec<SeriesSample>) -> RunResult {
        let last_completed = self.t.saturating_sub(1);
        let mut e_total = 0u64;
        let mut e_max = 0u64;
        for a in &self.agents {
            let e = a.mobile_steps(last_completed);
            e_total += e;
            e_max = e_max.max(e);
        }
        let last_settle_step = self
            .agents
            .iter()
            .filter(|a| a.is_live())
            .filter_map(|a| a.settle_step)
            .max()
            .map(|s| s + 1);
        let mut settled: Vec<SettledRecord> = self
            .agents
            .iter()
            .filter(|a| a.is_live() && a.phys.is_settled())
            .map(|a| SettledRecord {
                cell: a.position,
                payload: a.payload,
                closed: a.phys == Phys::ClosedBeacon,
                parent: a.parent,
                settle_step: a.settle_step.expect("settled agent without settle step"),
            })
            .collect();
        settled.sort_by_key(|r| (r.cell.y, r.cell.x));
        RunResult {
            terminated: self.terminated,
            t_c: self.t,
            n_agents: self.entered,
            e_total,
            e_max,
            last_settle_step,
            series,
            structure: StructureSnapshot {
                algorithm: self.config.algorithm,
                entry_points: self.region.entry_points().to_vec(),
                region_free_cells: self.free_cells,
                settled,
            },
        }
    }
}
