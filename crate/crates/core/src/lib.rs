// SPDX-License-Identifier: Apache-2.0

//! Envy-free group trip planning on road networks.
//!
//! A group of travelers, each with a source and a destination, visits one
//! point of interest from every category in order. A route is envy-free when
//! no two members' trip lengths differ by more than a threshold `D`. The exact
//! solver finds the envy-free route of minimum total length, or reports how
//! much `D` would have to grow; the heuristic builds a route greedily from
//! (group) nearest-neighbor queries, optionally backed by an R-tree.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod heuristic;
pub mod network;
pub mod oracle;
pub mod query;
pub mod rtree;
pub mod synthetic;

/// Dense internal vertex index, `0..n`.
pub type VertexId = usize;
/// Path length or edge weight.
pub type Length = f64;

pub use error::{Error, Result};
pub use exact::{
    evaluate_route, max_pair_gap, solve_exact, solve_exact_with, EvaluatedRoute, SolveOptions,
    SolveOutcome,
};
pub use heuristic::{solve_heuristic, solve_heuristic_indexed, CategoryIndex, HeuristicResult};
pub use network::{CategoryAssignment, GroupSpec, RoadNetwork};
pub use oracle::{DistanceOracle, OracleMode};
pub use query::{EfGtpQuery, PoiCombination, QueryFile};
pub use rtree::RTree;
