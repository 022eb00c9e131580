//! Hierarchical game-based go/yield decision making for agents crossing an
//! all-way stop intersection, together with a closed-loop simulator.

pub mod cli;
pub mod error;
pub mod decision;
pub mod game;
pub mod graph;
pub mod scenario;
pub mod sim;
pub mod world;

pub use error::{AgentId, Error, Result};
