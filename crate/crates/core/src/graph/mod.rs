//! Interaction graphs: trajectory conflicts, TTC/TOSC, clustering,
//! breadth-first level assignment, branches and sub-game decomposition.

mod branch;
mod cluster;
mod conflict;
mod dot;
#[cfg(test)]
pub(crate) mod fixtures;
mod levels;
mod snapshot;
mod timing;

pub use branch::{decompose, extract_branches, Branch};
pub use cluster::{cluster_agents, parallel_same_direction, select_representative, Cluster, DEFAULT_HEADING_TOL};
pub use conflict::{all_crossings, trajectories_conflict, ConflictPoint, ConflictTable, Crossing};
pub use dot::to_dot;
pub use levels::{build_interaction_graph, select_k, GraphNode, GraphOptions, InteractionGraph};
pub use snapshot::Snapshot;
pub use timing::{tosc, ttc, T_MAX};
