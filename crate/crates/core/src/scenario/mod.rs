//! Runnable scenarios: region, agents with their routes and behaviours,
//! and the configuration they were authored with.

mod file;
pub mod library;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use file::{load_scenario, parse_scenario, AgentEntry, Pose, ScenarioFile};

use crate::decision::{PolicyConfig, PolicyKind};
use crate::error::{AgentId, Error, Result};
use crate::graph::ConflictTable;
use crate::sim::SimConfig;
use crate::world::{Action, AgentState, IntersectionRegion, Trajectory, VehicleParams};

/// How an agent picks its actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum Behavior {
    /// Decides by game. Without an explicit kind the ego follows the run's
    /// policy and everyone else plays hierarchical.
    Policy {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kind: Option<PolicyKind>,
    },
    /// Follows `(time, action)` switches, ignoring the stop-sign rule. The
    /// first action also applies before its start time.
    Scripted { actions: Vec<(f64, Action)> },
}

impl Default for Behavior {
    fn default() -> Self {
        Behavior::Policy { kind: None }
    }
}

impl Behavior {
    pub fn scripted_action(&self, t: f64) -> Option<Action> {
        match self {
            Behavior::Policy { .. } => None,
            Behavior::Scripted { actions } => {
                let mut current = actions.first()?.1;
                for &(start, a) in actions {
                    if start <= t + 1e-9 {
                        current = a;
                    }
                }
                Some(current)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Behavior::Scripted { actions } = self {
            if actions.is_empty() {
                return Err(Error::Config("scripted behavior needs at least one action".into()));
            }
            if actions.iter().any(|(t, _)| !t.is_finite()) {
                return Err(Error::NonFinite("scripted action time"));
            }
            if actions.windows(2).any(|w| w[1].0 < w[0].0) {
                return Err(Error::Config("scripted action times must be non-decreasing".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AgentSetup {
    pub state: AgentState,
    pub params: VehicleParams,
    pub behavior: Behavior,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub region: IntersectionRegion,
    pub agents: Vec<AgentSetup>,
    pub ego_id: AgentId,
    pub policy: PolicyConfig,
    pub sim: SimConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for a in &self.agents {
            if a.state.id == 0 {
                return Err(Error::Config("agent ids must be positive".into()));
            }
            if !ids.insert(a.state.id) {
                return Err(Error::Config(format!("duplicate agent id {}", a.state.id)));
            }
            a.params.validate()?;
            a.behavior.validate()?;
        }
        if !ids.contains(&self.ego_id) {
            return Err(Error::Config(format!("ego_id {} is not among the agents", self.ego_id)));
        }
        self.policy.validate()?;
        self.sim.validate()
    }

    pub fn ego_index(&self) -> Result<usize> {
        self.agents
            .iter()
            .position(|a| a.state.id == self.ego_id)
            .ok_or(Error::UnknownAgent(self.ego_id))
    }

    pub fn states(&self) -> Vec<AgentState> {
        self.agents.iter().map(|a| a.state.clone()).collect()
    }

    pub fn params(&self) -> Vec<VehicleParams> {
        self.agents.iter().map(|a| a.params).collect()
    }

    pub fn conflict_table(&self) -> ConflictTable {
        let paths: Vec<&Trajectory> = self.agents.iter().map(|a| &a.state.route.path).collect();
        ConflictTable::build(&paths, &self.region)
    }
}
