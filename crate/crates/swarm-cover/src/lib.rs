//! Deterministic simulation and exact analysis of grid coverage by swarms of
//! settling agents.
//!
//! Anonymous airborne agents enter an unknown grid region one at a time,
//! explore it with purely local rules, and settle to become beacons that
//! guide the agents still flying. Seven rule sets are implemented, in two
//! families:
//!
//! * **Dual-layer** ([`Algorithm::Dlrw`], [`Algorithm::Dllg`],
//!   [`Algorithm::Dlug`]) — coverage ends when every cell holds one settled
//!   and one hovering agent.
//! * **Single-layer** ([`Algorithm::Sllg`], [`Algorithm::Slug`],
//!   [`Algorithm::Sldf`], [`Algorithm::Sltt`]) — one settled agent per cell,
//!   plus a backward-propagating closure wave that gives an observer at the
//!   entry a deterministic termination signal.
//!
//! The crate is organized around:
//!
//! * [`region`] — grid regions, an ASCII file format, stock generators;
//! * [`rules`] — the pure per-agent decision rules;
//! * [`engine`] — world state, the asynchronous scheduler, fault injection,
//!   seed-reproducible runs;
//! * [`oracle`] — exact absorbing-chain absorption statistics, an exact
//!   chain builder for random-walk coverage on tiny regions, and a
//!   hitting-time solver for random walks on the region graph;
//! * [`analysis`] — structure extraction (spanning trees / gradient DAGs)
//!   and bound checking over sweep results.
//!
//! ```
//! use swarm_cover::engine::{run, RunConfig};
//! use swarm_cover::region::{generate_region, GeneratedShape};
//! use swarm_cover::rules::Algorithm;
//!
//! let region = generate_region(GeneratedShape::Linear, 8).unwrap();
//! let result = run(&region, &RunConfig::new(Algorithm::Slug, 42)).unwrap();
//! assert!(result.terminated);
//! assert_eq!(result.structure.settled.len(), 8);
//! ```

pub mod analysis;
pub mod engine;
pub mod oracle;
pub mod region;
pub mod rules;

pub use engine::{run, RunConfig, RunResult};
pub use region::{generate_region, GeneratedShape, Region};
pub use rules::Algorithm;
