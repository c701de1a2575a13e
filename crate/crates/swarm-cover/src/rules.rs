//! Pure decision rules for mobile and settled agents.
//!
//! Every rule is a function of the sensing [`Neighborhood`] (plus, for the
//! tree-traversal variant, the agent's own arrow) and returns exactly one
//! action. Wherever a rule selects arbitrarily among candidates, the choice
//! is uniform and drawn from the RNG passed in by the caller, so a whole run
//! stays reproducible from its seed.

use crate::region::{Direction, DIRECTIONS};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Physical state of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phys {
    Mobile,
    Beacon,
    ClosedBeacon,
}

impl Phys {
    pub fn is_settled(self) -> bool {
        matches!(self, Phys::Beacon | Phys::ClosedBeacon)
    }
}

/// Information a settled agent projects to its surroundings.
///
/// Gradient algorithms project a step count; the tree-traversal algorithm
/// projects the direction of the settler's last move (`None` marks the root,
/// which settled without moving).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Payload {
    StepCount(u32),
    Arrow(Option<Direction>),
}

impl Payload {
    pub fn step_count(self) -> u32 {
        match self {
            Payload::StepCount(sc) => sc,
            Payload::Arrow(_) => 0,
        }
    }

    pub fn arrow(self) -> Option<Direction> {
        match self {
            Payload::Arrow(a) => a,
            Payload::StepCount(_) => None,
        }
    }
}

/// Contents of one sensing slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Wall,
    Empty,
    View { phys: Phys, payload: Payload },
}

impl Slot {
    pub fn is_empty(self) -> bool {
        self == Slot::Empty
    }

    fn view(self) -> Option<(Phys, Payload)> {
        match self {
            Slot::View { phys, payload } => Some((phys, payload)),
            _ => None,
        }
    }
}

/// The 10-slot sensing tuple handed to every rule.
///
/// Slot 0 is the ground of the agent's own cell, slots 1-4 the ground of the
/// East/North/West/South neighbors, slot 5 the air of the own cell and slots
/// 6-9 the air of the same neighbors (air slot = ground slot + 5). A wall in
/// a ground slot implies a wall in the matching air slot. Settled agents
/// sense ground slots only; their air slots are masked to `Empty`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood {
    pub slots: [Slot; 10],
}

impl Neighborhood {
    /// Ground slot for a direction (slots 1-4).
    pub fn ground(&self, d: Direction) -> Slot {
        self.slots[d.index()]
    }

    /// Ground slot of the own cell (slot 0).
    pub fn own_ground(&self) -> Slot {
        self.slots[0]
    }

    /// Air slot for a direction (slots 6-9).
    pub fn air(&self, d: Direction) -> Slot {
        self.slots[d.index() + 5]
    }

    /// Step count of the beacon below, or 0 over empty ground.
    pub fn own_step_count(&self) -> u32 {
        match self.own_ground() {
            Slot::View { payload, .. } => payload.step_count(),
            _ => 0,
        }
    }
}

/// Action returned by a mobile rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MobileAction {
    /// Land in the own cell, projecting `payload`.
    SettleHere { payload: Payload },
    /// Move one cell in `dir` and land there, projecting `payload`.
    SettleAt { dir: Direction, payload: Payload },
    /// Fly one cell in `dir`; `payload` is the agent's updated bookkeeping.
    Move { dir: Direction, payload: Payload },
    Stay,
}

/// Action returned by the settled (closure) rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SettledAction {
    RemainBeacon,
    BecomeClosed,
    /// Only possible in fault mode, when a closed beacon's closure condition
    /// no longer holds.
    RevertToBeacon,
}

/// Which neighbors a settled agent waits on before closing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BpcVariant {
    /// Neighbors with a strictly higher step count.
    AnyHigher,
    /// Neighbors with step count exactly own + 1.
    PlusOne,
    /// Neighbors whose arrow points away from this cell.
    Children,
}

/// The seven coverage algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Dlrw,
    Dllg,
    Dlug,
    Sllg,
    Slug,
    Sldf,
    Sltt,
}

/// All algorithms, dual-layer family first.
pub const ALGORITHMS: [Algorithm; 7] = [
    Algorithm::Dlrw,
    Algorithm::Dllg,
    Algorithm::Dlug,
    Algorithm::Sllg,
    Algorithm::Slug,
    Algorithm::Sldf,
    Algorithm::Sltt,
];

impl Algorithm {
    /// Single-layer algorithms terminate through backward propagating
    /// closure; dual-layer ones fill both layers.
    pub fn is_single_layer(self) -> bool {
        matches!(self, Algorithm::Sllg | Algorithm::Slug | Algorithm::Sldf | Algorithm::Sltt)
    }

    pub fn bpc_variant(self) -> Option<BpcVariant> {
        match self {
            Algorithm::Slug => Some(BpcVariant::AnyHigher),
            Algorithm::Sllg | Algorithm::Sldf => Some(BpcVariant::PlusOne),
            Algorithm::Sltt => Some(BpcVariant::Children),
            _ => None,
        }
    }

    /// Payload a fresh mobile agent carries on entry.
    pub fn initial_payload(self) -> Payload {
        match self {
            Algorithm::Sltt => Payload::Arrow(None),
            _ => Payload::StepCount(0),
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        match s.to_ascii_lowercase().as_str() {
            "dlrw" => Some(Algorithm::Dlrw),
            "dllg" => Some(Algorithm::Dllg),
            "dlug" => Some(Algorithm::Dlug),
            "sllg" => Some(Algorithm::Sllg),
            "slug" => Some(Algorithm::Slug),
            "sldf" => Some(Algorithm::Sldf),
            "sltt" => Some(Algorithm::Sltt),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Algorithm::Dlrw => "dlrw",
            Algorithm::Dllg => "dllg",
            Algorithm::Dlug => "dlug",
            Algorithm::Sllg => "sllg",
            Algorithm::Slug => "slug",
            Algorithm::Sldf => "sldf",
            Algorithm::Sltt => "sltt",
        };
        f.write_str(s)
    }
}

/// Fixed-capacity direction buffer; candidate sets never exceed 4.
#[derive(Debug, Clone, Copy, Default)]
struct DirSet {
    dirs: [Direction; 4],
    len: usize,
}

impl DirSet {
    fn new() -> DirSet {
        DirSet { dirs: [Direction::East; 4], len: 0 }
    }

    fn push(&mut self, d: Direction) {
        self.dirs[self.len] = d;
        self.len += 1;
    }

    fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn collect(pred: impl Fn(Direction) -> bool) -> DirSet {
        let mut set = DirSet::new();
        for d in DIRECTIONS {
            if pred(d) {
                set.push(d);
            }
        }
        set
    }

    /// Uniform pick; consumes randomness only when there is a real choice.
    fn pick(&self, rng: &mut impl Rng) -> Direction {
        debug_assert!(self.len > 0);
        if self.len == 1 {
            self.dirs[0]
        } else {
            self.dirs[rng.gen_range(0..self.len)]
        }
    }

    fn iter(&self) -> impl Iterator<Item = Direction> + '_ {
        self.dirs[..self.len].iter().copied()
    }
}

fn ground_view(xi: &Neighborhood, d: Direction) -> Option<(Phys, Payload)> {
    xi.ground(d).view()
}

fn air_free(xi: &Neighborhood, d: Direction) -> bool {
    xi.air(d).is_empty()
}

fn empty_grounds(xi: &Neighborhood) -> DirSet {
    DirSet::collect(|d| xi.ground(d).is_empty())
}

/// Random-walk rule: settle under or next to any empty ground, otherwise
/// move to any neighbor without a mobile agent. Payloads are projected for
/// bookkeeping but never read back.
pub fn dlrw_mobile(xi: &Neighborhood, rng: &mut impl Rng) -> MobileAction {
    settle_or(xi, rng, |xi, rng| {
        let moves = DirSet::collect(|d| {
            ground_view(xi, d).is_some_and(|(p, _)| p.is_settled()) && air_free(xi, d)
        });
        if moves.is_empty() {
            MobileAction::Stay
        } else {
            MobileAction::Move {
                dir: moves.pick(rng),
                payload: Payload::StepCount(xi.own_step_count()),
            }
        }
    })
}

/// Every possible outcome of [`dlrw_mobile`] for one neighborhood, each
/// equally likely. Used by the exact chain builder to enumerate transitions
/// instead of sampling them.
pub fn dlrw_candidates(xi: &Neighborhood) -> Vec<MobileAction> {
    let sc = xi.own_step_count();
    if xi.own_ground().is_empty() {
        return vec![MobileAction::SettleHere { payload: Payload::StepCount(1) }];
    }
    let empties = empty_grounds(xi);
    if !empties.is_empty() {
        return empties
            .iter()
            .map(|d| MobileAction::SettleAt { dir: d, payload: Payload::StepCount(sc + 1) })
            .collect();
    }
    let moves =
        DirSet::collect(|d| ground_view(xi, d).is_some_and(|(p, _)| p.is_settled()) && air_free(xi, d));
    if moves.is_empty() {
        vec![MobileAction::Stay]
    } else {
        moves
            .iter()
            .map(|d| MobileAction::Move { dir: d, payload: Payload::StepCount(sc) })
            .collect()
    }
}

/// Shared settle-first preamble: settle underneath, else at a uniformly
/// chosen empty neighbor, else fall through to `other`.
fn settle_or<R: Rng>(
    xi: &Neighborhood,
    rng: &mut R,
    other: impl FnOnce(&Neighborhood, &mut R) -> MobileAction,
) -> MobileAction {
    if xi.own_ground().is_empty() {
        return MobileAction::SettleHere { payload: Payload::StepCount(1) };
    }
    let empties = empty_grounds(xi);
    if !empties.is_empty() {
        let sc = xi.own_step_count();
        return MobileAction::SettleAt {
            dir: empties.pick(rng),
            payload: Payload::StepCount(sc + 1),
        };
    }
    other(xi, rng)
}

/// Limited-gradient rule: climb the step-count gradient in single-step
/// increments.
pub fn dllg_mobile(xi: &Neighborhood, rng: &mut impl Rng) -> MobileAction {
    settle_or(xi, rng, |xi, rng| {
        let sc = xi.own_step_count();
        let moves = DirSet::collect(|d| {
            ground_view(xi, d).is_some_and(|(p, pl)| p.is_settled() && pl.step_count() == sc + 1)
                && air_free(xi, d)
        });
        if moves.is_empty() {
            MobileAction::Stay
        } else {
            MobileAction::Move { dir: moves.pick(rng), payload: Payload::StepCount(sc + 1) }
        }
    })
}

/// Unlimited-gradient rule: among unoccupied settled neighbors with a higher
/// step count, move to the lowest one.
pub fn dlug_mobile(xi: &Neighborhood, rng: &mut impl Rng) -> MobileAction {
    settle_or(xi, rng, |xi, rng| {
        let sc = xi.own_step_count();
        match min_above(xi, sc, false) {
            Some((dest, moves)) => {
                MobileAction::Move { dir: moves.pick(rng), payload: Payload::StepCount(dest) }
            }
            None => MobileAction::Stay,
        }
    })
}

/// Lowest step count strictly above `sc` among settled, air-free neighbors;
/// `beacons_only` restricts the candidate set to open beacons.
fn min_above(xi: &Neighborhood, sc: u32, beacons_only: bool) -> Option<(u32, DirSet)> {
    let mut best: Option<u32> = None;
    for d in DIRECTIONS {
        if let Some((p, pl)) = ground_view(xi, d) {
            let eligible = if beacons_only { p == Phys::Beacon } else { p.is_settled() };
            if eligible && air_free(xi, d) && pl.step_count() > sc {
                best = Some(best.map_or(pl.step_count(), |b: u32| b.min(pl.step_count())));
            }
        }
    }
    let dest = best?;
    let set = DirSet::collect(|d| {
        ground_view(xi, d).is_some_and(|(p, pl)| {
            let eligible = if beacons_only { p == Phys::Beacon } else { p.is_settled() };
            eligible && pl.step_count() == dest
        }) && air_free(xi, d)
    });
    Some((dest, set))
}

/// Highest step count strictly below `sc` among air-free neighbors of the
/// given physical kind (`None` accepts any settled neighbor).
fn max_below(xi: &Neighborhood, sc: u32, kind: Option<Phys>) -> Option<(u32, DirSet)> {
    let mut best: Option<u32> = None;
    let matches_kind = |p: Phys| kind.map_or(p.is_settled(), |k| p == k);
    for d in DIRECTIONS {
        if let Some((p, pl)) = ground_view(xi, d) {
            if matches_kind(p) && air_free(xi, d) && pl.step_count() < sc {
                best = Some(best.map_or(pl.step_count(), |b: u32| b.max(pl.step_count())));
            }
        }
    }
    let dest = best?;
    let set = DirSet::collect(|d| {
        ground_view(xi, d).is_some_and(|(p, pl)| matches_kind(p) && pl.step_count() == dest)
            && air_free(xi, d)
    });
    Some((dest, set))
}

/// Single-layer limited-gradient rule. Advances only over open beacons with
/// step count own+1; when such beacons exist but all carry a mobile agent it
/// waits in place rather than retracing. Retraces over closed beacons only,
/// toward the highest step count below its own.
pub fn sllg_mobile(xi: &Neighborhood, rng: &mut impl Rng) -> MobileAction {
    settle_or(xi, rng, |xi, rng| {
        let sc = xi.own_step_count();
        let advance_exists = DIRECTIONS.iter().any(|&d| {
            ground_view(xi, d).is_some_and(|(p, pl)| p == Phys::Beacon && pl.step_count() == sc + 1)
        });
        if advance_exists {
            let free = DirSet::collect(|d| {
                ground_view(xi, d)
                    .is_some_and(|(p, pl)| p == Phys::Beacon && pl.step_count() == sc + 1)
                    && air_free(xi, d)
            });
            return if free.is_empty() {
                MobileAction::Stay
            } else {
                MobileAction::Move { dir: free.pick(rng), payload: Payload::StepCount(sc + 1) }
            };
        }
        match max_below(xi, sc, Some(Phys::ClosedBeacon)) {
            Some((dest, set)) => {
                MobileAction::Move { dir: set.pick(rng), payload: Payload::StepCount(dest) }
            }
            None => MobileAction::Stay,
        }
    })
}

/// Single-layer unlimited-gradient rule. Moves up toward the lowest higher
/// step count over any unoccupied settled neighbor, otherwise down toward
/// the highest lower one (beacons and closed beacons alike).
pub fn slug_mobile(xi: &Neighborhood, rng: &mut impl Rng) -> MobileAction {
    settle_or(xi, rng, |xi, rng| {
        let sc = xi.own_step_count();
        if let Some((dest, set)) = min_above(xi, sc, false) {
            return MobileAction::Move { dir: set.pick(rng), payload: Payload::StepCount(dest) };
        }
        match max_below(xi, sc, None) {
            Some((dest, set)) => {
                MobileAction::Move { dir: set.pick(rng), payload: Payload::StepCount(dest) }
            }
            None => MobileAction::Stay,
        }
    })
}

/// Depth-first rule: advancing up the gradient outranks settling, so agents
/// run to the frontier before expanding it. The agent stays mobile when it
/// retraces.
pub fn sldf_mobile(xi: &Neighborhood, rng: &mut impl Rng) -> MobileAction {
    let sc = xi.own_step_count();
    let advance_exists = DIRECTIONS.iter().any(|&d| {
        ground_view(xi, d).is_some_and(|(p, pl)| p == Phys::Beacon && pl.step_count() == sc + 1)
    });
    if advance_exists {
        let free = DirSet::collect(|d| {
            ground_view(xi, d).is_some_and(|(p, pl)| p == Phys::Beacon && pl.step_count() == sc + 1)
                && air_free(xi, d)
        });
        return if free.is_empty() {
            MobileAction::Stay
        } else {
            MobileAction::Move { dir: free.pick(rng), payload: Payload::StepCount(sc + 1) }
        };
    }
    if xi.own_ground().is_empty() {
        return MobileAction::SettleHere { payload: Payload::StepCount(1) };
    }
    let empties = empty_grounds(xi);
    if !empties.is_empty() {
        return MobileAction::SettleAt {
            dir: empties.pick(rng),
            payload: Payload::StepCount(sc + 1),
        };
    }
    match max_below(xi, sc, Some(Phys::ClosedBeacon)) {
        Some((dest, set)) => {
            MobileAction::Move { dir: set.pick(rng), payload: Payload::StepCount(dest) }
        }
        None => MobileAction::Stay,
    }
}

/// Tree-traversal rule: follow arrows instead of step counts. An advance
/// target is a beacon whose arrow matches its slot (a child of the current
/// cell); a retrace target is a closed beacon whose arrow points back at the
/// current cell (`|arrow - slot| == 2`).
pub fn sltt_mobile(xi: &Neighborhood, own_arrow: Option<Direction>, rng: &mut impl Rng) -> MobileAction {
    let _ = own_arrow; // carried for projection bookkeeping; decisions read only the neighborhood
    if xi.own_ground().is_empty() {
        return MobileAction::SettleHere { payload: Payload::Arrow(None) };
    }
    let empties = empty_grounds(xi);
    if !empties.is_empty() {
        let dir = empties.pick(rng);
        return MobileAction::SettleAt { dir, payload: Payload::Arrow(Some(dir)) };
    }
    let advance = DirSet::collect(|d| {
        ground_view(xi, d).is_some_and(|(p, pl)| p == Phys::Beacon && pl.arrow() == Some(d))
            && air_free(xi, d)
    });
    if !advance.is_empty() {
        let dir = advance.pick(rng);
        return MobileAction::Move { dir, payload: Payload::Arrow(Some(dir)) };
    }
    let retrace = DirSet::collect(|d| {
        ground_view(xi, d).is_some_and(|(p, pl)| {
            p == Phys::ClosedBeacon
                && pl.arrow().is_some_and(|a| (a.index() as i32 - d.index() as i32).abs() == 2)
        }) && air_free(xi, d)
    });
    if !retrace.is_empty() {
        let dir = retrace.pick(rng);
        return MobileAction::Move { dir, payload: Payload::Arrow(Some(dir)) };
    }
    MobileAction::Stay
}

/// Closure rule shared by all single-layer algorithms.
///
/// A beacon closes once no neighboring ground cell is empty (walls count as
/// non-empty) and every member of the variant's wait-set is already closed;
/// an empty wait-set closes immediately, so leaves close first. In fault
/// mode a closed beacon whose condition no longer holds reverts.
pub fn bpc_settled(xi: &Neighborhood, variant: BpcVariant, fault_mode: bool) -> SettledAction {
    let (own_phys, own_payload) = xi
        .own_ground()
        .view()
        .expect("settled rule invoked without a settled agent in slot 0");
    debug_assert!(own_phys.is_settled());

    let condition = closure_condition(xi, own_payload, variant);
    match own_phys {
        Phys::Beacon if condition => SettledAction::BecomeClosed,
        Phys::ClosedBeacon if fault_mode && !condition => SettledAction::RevertToBeacon,
        _ => SettledAction::RemainBeacon,
    }
}

fn closure_condition(xi: &Neighborhood, own: Payload, variant: BpcVariant) -> bool {
    if DIRECTIONS.iter().any(|&d| xi.ground(d).is_empty()) {
        return false;
    }
    DIRECTIONS.iter().all(|&d| match ground_view(xi, d) {
        None => true, // wall
        Some((phys, payload)) => {
            let in_wait_set = match variant {
                BpcVariant::AnyHigher => payload.step_count() > own.step_count(),
                BpcVariant::PlusOne => payload.step_count() == own.step_count() + 1,
                BpcVariant::Children => payload.arrow() == Some(d),
            };
            !in_wait_set || phys == Phys::ClosedBeacon
        }
    })
}

/// Dispatches to the algorithm's mobile rule.
pub fn mobile_action(
    algo: Algorithm,
    xi: &Neighborhood,
    own_payload: Payload,
    rng: &mut impl Rng,
) -> MobileAction {
    match algo {
        Algorithm::Dlrw => dlrw_mobile(xi, rng),
        Algorithm::Dllg => dllg_mobile(xi, rng),
        Algorithm::Dlug => dlug_mobile(xi, rng),
        Algorithm::Sllg => sllg_mobile(xi, rng),
        Algorithm::Slug => slug_mobile(xi, rng),
        Algorithm::Sldf => sldf_mobile(xi, rng),
        Algorithm::Sltt => sltt_mobile(xi, own_payload.arrow(), rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn beacon(sc: u32) -> Slot {
        Slot::View { phys: Phys::Beacon, payload: Payload::StepCount(sc) }
    }

    fn closed(sc: u32) -> Slot {
        Slot::View { phys: Phys::ClosedBeacon, payload: Payload::StepCount(sc) }
    }

    fn mobile() -> Slot {
        Slot::View { phys: Phys::Mobile, payload: Payload::StepCount(0) }
    }

    /// slots[0]=own ground, [1..=4]=E/N/W/S grounds, [5]=own air, [6..=9] airs.
    fn xi(slots: [Slot; 10]) -> Neighborhood {
        Neighborhood { slots }
    }

    const E: Slot = Slot::Empty;
    const W: Slot = Slot::Wall;

    #[test]
    fn dlrw_settles_underneath_first() {
        let xi = xi([E, beacon(1), E, W, W, mobile(), E, E, W, W]);
        assert_eq!(
            dlrw_mobile(&xi, &mut rng()),
            MobileAction::SettleHere { payload: Payload::StepCount(1) }
        );
    }

    #[test]
    fn dlrw_settles_at_empty_neighbor_uniformly() {
        let n = xi([beacon(1), E, W, E, W, mobile(), E, W, E, W]);
        let mut seen = std::collections::BTreeSet::new();
        let mut r = rng();
        for _ in 0..64 {
            match dlrw_mobile(&n, &mut r) {
                MobileAction::SettleAt { dir, .. } => {
                    assert!(matches!(dir, Direction::East | Direction::West));
                    seen.insert(dir);
                }
                other => panic!("expected settle, got {other:?}"),
            }
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn dlrw_moves_to_unique_free_air() {
        // all grounds occupied; only North air is free (East/West occupied, South wall)
        let n = xi([beacon(1), beacon(2), beacon(2), beacon(2), W, mobile(), mobile(), E, mobile(), W]);
        assert_eq!(
            dlrw_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::North, payload: Payload::StepCount(1) }
        );
    }

    #[test]
    fn dllg_moves_only_up_single_step() {
        // own sc=3; North has sc 4 air-free, East has sc 4 but air occupied
        let n = xi([beacon(3), beacon(4), beacon(4), beacon(3), W, mobile(), mobile(), E, E, W]);
        assert_eq!(
            dllg_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::North, payload: Payload::StepCount(4) }
        );
    }

    #[test]
    fn dllg_prefers_settling() {
        let n = xi([beacon(3), E, beacon(4), W, W, mobile(), E, E, W, W]);
        assert_eq!(
            dllg_mobile(&n, &mut rng()),
            MobileAction::SettleAt { dir: Direction::East, payload: Payload::StepCount(4) }
        );
    }

    #[test]
    fn dllg_stays_without_next_step() {
        let n = xi([beacon(3), beacon(3), beacon(3), beacon(3), beacon(3), mobile(), E, E, E, E]);
        assert_eq!(dllg_mobile(&n, &mut rng()), MobileAction::Stay);
    }

    #[test]
    fn dlug_takes_minimum_above_own() {
        // neighbors 7 (air free) and 5 (air occupied): occupied one is invisible
        let n = xi([beacon(3), beacon(7), beacon(5), W, W, mobile(), E, mobile(), W, W]);
        assert_eq!(
            dlug_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::East, payload: Payload::StepCount(7) }
        );

        // both air free: minimum-greater wins
        let n = xi([beacon(3), beacon(7), beacon(5), W, W, mobile(), E, E, W, W]);
        assert_eq!(
            dlug_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::North, payload: Payload::StepCount(5) }
        );

        // all greater neighbors occupied
        let n = xi([beacon(3), beacon(7), beacon(5), W, W, mobile(), mobile(), mobile(), W, W]);
        assert_eq!(dlug_mobile(&n, &mut rng()), MobileAction::Stay);
    }

    #[test]
    fn sllg_waits_when_advance_is_blocked() {
        // sc=10, East beacon(11) air-occupied, West closed(9) free: stay wins
        let n = xi([beacon(10), beacon(11), W, closed(9), W, mobile(), mobile(), W, E, W]);
        assert_eq!(sllg_mobile(&n, &mut rng()), MobileAction::Stay);
    }

    #[test]
    fn sllg_retraces_to_highest_closed_below() {
        let n = xi([beacon(10), closed(9), closed(7), W, W, mobile(), E, E, W, W]);
        assert_eq!(
            sllg_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::East, payload: Payload::StepCount(9) }
        );
    }

    #[test]
    fn sllg_ignores_closed_above() {
        let n = xi([beacon(10), closed(11), W, W, W, mobile(), E, W, W, W]);
        assert_eq!(sllg_mobile(&n, &mut rng()), MobileAction::Stay);
    }

    #[test]
    fn slug_advances_over_closed_beacons() {
        // sc=4: East beacon(6), North closed(5): minimum-greater is the closed 5
        let n = xi([beacon(4), beacon(6), closed(5), W, W, mobile(), E, E, W, W]);
        assert_eq!(
            slug_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::North, payload: Payload::StepCount(5) }
        );
    }

    #[test]
    fn slug_retraces_over_open_beacons() {
        let n = xi([beacon(4), beacon(3), W, W, W, mobile(), E, W, W, W]);
        assert_eq!(
            slug_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::East, payload: Payload::StepCount(3) }
        );
    }

    #[test]
    fn slug_stays_when_everything_is_occupied() {
        let n = xi([beacon(4), beacon(3), beacon(5), W, W, mobile(), mobile(), mobile(), W, W]);
        assert_eq!(slug_mobile(&n, &mut rng()), MobileAction::Stay);
    }

    #[test]
    fn sldf_advance_beats_settling() {
        // own beacon(2); East empty; West beacon(3) air-free
        let n = xi([beacon(2), E, W, beacon(3), W, mobile(), E, W, E, W]);
        assert_eq!(
            sldf_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::West, payload: Payload::StepCount(3) }
        );
    }

    #[test]
    fn sldf_settles_when_gradient_ends() {
        let n = xi([beacon(2), E, W, beacon(1), W, mobile(), E, W, E, W]);
        assert_eq!(
            sldf_mobile(&n, &mut rng()),
            MobileAction::SettleAt { dir: Direction::East, payload: Payload::StepCount(3) }
        );
    }

    #[test]
    fn sldf_stays_mobile_on_retrace() {
        let n = xi([beacon(5), closed(4), W, W, W, mobile(), E, W, W, W]);
        assert_eq!(
            sldf_mobile(&n, &mut rng()),
            MobileAction::Move { dir: Direction::East, payload: Payload::StepCount(4) }
        );
    }

    fn arrow_beacon(a: Option<Direction>) -> Slot {
        Slot::View { phys: Phys::Beacon, payload: Payload::Arrow(a) }
    }

    fn arrow_closed(a: Option<Direction>) -> Slot {
        Slot::View { phys: Phys::ClosedBeacon, payload: Payload::Arrow(a) }
    }

    #[test]
    fn sltt_advances_on_matching_arrow() {
        // East neighbor's arrow points East (a child); North's points South
        let n = xi([
            arrow_beacon(None),
            arrow_beacon(Some(Direction::East)),
            arrow_beacon(Some(Direction::South)),
            W,
            W,
            mobile(),
            E,
            E,
            W,
            W,
        ]);
        assert_eq!(
            sltt_mobile(&n, None, &mut rng()),
            MobileAction::Move { dir: Direction::East, payload: Payload::Arrow(Some(Direction::East)) }
        );
    }

    #[test]
    fn sltt_retraces_on_opposite_arrow() {
        // West neighbor (slot 3) closed with arrow East (1): |1-3| = 2
        let n = xi([
            arrow_beacon(Some(Direction::East)),
            W,
            W,
            arrow_closed(Some(Direction::East)),
            W,
            mobile(),
            W,
            W,
            E,
            W,
        ]);
        assert_eq!(
            sltt_mobile(&n, Some(Direction::East), &mut rng()),
            MobileAction::Move { dir: Direction::West, payload: Payload::Arrow(Some(Direction::West)) }
        );
    }

    #[test]
    fn sltt_root_settles_with_no_arrow() {
        let n = xi([E, E, W, W, W, mobile(), E, W, W, W]);
        assert_eq!(
            sltt_mobile(&n, None, &mut rng()),
            MobileAction::SettleHere { payload: Payload::Arrow(None) }
        );
    }

    #[test]
    fn bpc_leaf_closes_immediately() {
        // walls on three sides, one lower neighbor, no empties
        let n = xi([beacon(5), beacon(4), W, W, W, E, E, E, E, E]);
        assert_eq!(bpc_settled(&n, BpcVariant::AnyHigher, false), SettledAction::BecomeClosed);
        assert_eq!(bpc_settled(&n, BpcVariant::PlusOne, false), SettledAction::BecomeClosed);
    }

    #[test]
    fn bpc_waits_for_upstream() {
        let n = xi([beacon(5), beacon(6), W, W, W, E, E, E, E, E]);
        assert_eq!(bpc_settled(&n, BpcVariant::AnyHigher, false), SettledAction::RemainBeacon);
        let n = xi([beacon(5), closed(6), W, W, W, E, E, E, E, E]);
        assert_eq!(bpc_settled(&n, BpcVariant::AnyHigher, false), SettledAction::BecomeClosed);
    }

    #[test]
    fn bpc_blocks_on_empty_neighbor() {
        let n = xi([beacon(5), E, W, W, W, E, E, E, E, E]);
        assert_eq!(bpc_settled(&n, BpcVariant::AnyHigher, false), SettledAction::RemainBeacon);
    }

    #[test]
    fn bpc_reverts_only_in_fault_mode() {
        let n = xi([closed(5), E, W, W, W, E, E, E, E, E]);
        assert_eq!(bpc_settled(&n, BpcVariant::AnyHigher, true), SettledAction::RevertToBeacon);
        assert_eq!(bpc_settled(&n, BpcVariant::AnyHigher, false), SettledAction::RemainBeacon);
    }

    #[test]
    fn bpc_children_variant_tracks_arrows() {
        // East neighbor is a child (arrow East) still open: wait
        let n = xi([
            arrow_beacon(None),
            arrow_beacon(Some(Direction::East)),
            W,
            W,
            W,
            E,
            E,
            E,
            E,
            E,
        ]);
        assert_eq!(bpc_settled(&n, BpcVariant::Children, false), SettledAction::RemainBeacon);
        // non-child neighbors are ignored even when open
        let n = xi([
            arrow_beacon(None),
            arrow_beacon(Some(Direction::North)),
            W,
            W,
            W,
            E,
            E,
            E,
            E,
            E,
        ]);
        assert_eq!(bpc_settled(&n, BpcVariant::Children, false), SettledAction::BecomeClosed);
    }

    #[test]
    fn settle_priority_family_always_settles_next_to_empty() {
        // whichever slot is empty, these rules never move or stay
        let base = [beacon(2), beacon(3), beacon(1), beacon(2), beacon(3)];
        for empty_slot in 1..=4 {
            let mut slots = [E; 10];
            slots[..5].copy_from_slice(&base);
            slots[empty_slot] = E;
            slots[5] = mobile();
            let n = xi(slots);
            let mut r = rng();
            for action in [
                dlrw_mobile(&n, &mut r),
                dllg_mobile(&n, &mut r),
                dlug_mobile(&n, &mut r),
                sllg_mobile(&n, &mut r),
                slug_mobile(&n, &mut r),
                sltt_mobile(&n, None, &mut r),
            ] {
                assert!(
                    matches!(action, MobileAction::SettleAt { .. } | MobileAction::SettleHere { .. }),
                    "expected settle with empty slot {empty_slot}, got {action:?}"
                );
            }
        }
    }
}
