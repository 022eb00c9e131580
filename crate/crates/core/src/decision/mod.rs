//! Go/yield policies built on the interaction graph and the game solver.

mod policy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{AgentId, Error, Result};
use crate::game::{ActionProfile, GameParams, NashResult, NormalFormGame};
use crate::graph::{InteractionGraph, DEFAULT_HEADING_TOL};
use crate::world::Action;

pub use policy::{
    action_filter, build_game, decide, full_game_decide, hierarchical_decide, improved_hierarchical_decide,
    pairwise_decide, plan, safety_check, select_players, DecisionInput,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Hierarchical,
    Improved,
    Pairwise,
    Full,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [PolicyKind::Hierarchical, PolicyKind::Improved, PolicyKind::Pairwise, PolicyKind::Full];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Hierarchical => "hierarchical",
            PolicyKind::Improved => "improved",
            PolicyKind::Pairwise => "pairwise",
            PolicyKind::Full => "full",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub n_max: usize,
    /// Decision period in seconds.
    pub dt: f64,
    pub game: GameParams,
    pub cluster: bool,
    pub heading_tol: f64,
    pub policy: PolicyKind,
    pub safety_check: bool,
    /// Safety-check margin in seconds.
    pub t_margin: f64,
    /// Fill leftover player slots from the first level that did not fit.
    pub partial_levels: bool,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            n_max: 6,
            dt: 0.1,
            game: GameParams::default(),
            cluster: true,
            heading_tol: DEFAULT_HEADING_TOL,
            policy: PolicyKind::Hierarchical,
            safety_check: true,
            t_margin: 0.5,
            partial_levels: false,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_max < 2 {
            return Err(Error::InvalidParameter { name: "n_max", reason: format!("{} < 2", self.n_max) });
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter { name: "dt", reason: format!("{} must be positive", self.dt) });
        }
        if !(self.t_margin.is_finite() && self.t_margin >= 0.0) {
            return Err(Error::InvalidParameter { name: "t_margin", reason: format!("{} must be non-negative", self.t_margin) });
        }
        if !(self.heading_tol.is_finite() && self.heading_tol >= 0.0) {
            return Err(Error::InvalidParameter { name: "heading_tol", reason: format!("{}", self.heading_tol) });
        }
        self.game.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decision {
    pub ego: AgentId,
    pub action: Action,
    pub policy: PolicyKind,
    /// Player ids of every game played, ego first.
    pub players_used: Vec<Vec<AgentId>>,
    /// Selected equilibrium per game; `None` when it had no pure equilibrium.
    pub equilibrium: Vec<Option<ActionProfile>>,
    pub safety_overridden: bool,
    /// Number of graph levels included.
    pub k: usize,
    /// Graph level of every agent the ego's graph reached (ego at 0),
    /// cluster members sharing their representative's level.
    pub levels: Vec<(AgentId, usize)>,
    /// Wall-clock compute time in seconds.
    pub latency: f64,
}

impl Decision {
    pub fn max_game_size(&self) -> usize {
        self.players_used.iter().map(Vec::len).max().unwrap_or(1)
    }

    pub fn game_count(&self) -> usize {
        self.players_used.len()
    }
}

/// Everything computed on the way to a decision, before the filter and the
/// safety check.
#[derive(Debug, Clone)]
pub struct Plan {
    pub graph: InteractionGraph,
    pub k: usize,
    pub games: Vec<NormalFormGame>,
    pub results: Vec<NashResult>,
}

impl Plan {
    /// Conservative merge: Go only if every game selected an ego Go.
    pub fn ego_action(&self) -> Action {
        let all_go = self
            .results
            .iter()
            .all(|r| r.selected.as_ref().is_some_and(|p| p.action(0) == Action::Go));
        if all_go {
            Action::Go
        } else {
            Action::Yield
        }
    }

    pub fn dump_tables(&self) -> String {
        let mut out = String::new();
        for (g, r) in self.games.iter().zip(&self.results) {
            out.push_str(&g.dump());
            let eqs: Vec<String> = r.equilibria.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("equilibria: [{}]\n", eqs.join(", ")));
            match &r.selected {
                Some(p) => out.push_str(&format!("selected: {p}\n\n")),
                None => out.push_str("selected: none\n\n"),
            }
        }
        out
    }
}
