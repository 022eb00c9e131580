use std::fmt;

use serde::Serialize;

use super::Action;
use crate::error::AgentId;

/// One action per player. Profiles are ordered lexicographically with
/// `Go < Yield` and player 0 most significant; `index` is the position in
/// that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ActionProfile(pub Vec<Action>);

impl ActionProfile {
    pub fn from_index(index: usize, players: usize) -> Self {
        ActionProfile(
            (0..players)
                .map(|p| if index >> (players - 1 - p) & 1 == 0 { Action::Go } else { Action::Yield })
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, a| (acc << 1) | usize::from(*a == Action::Yield))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn action(&self, player: usize) -> Action {
        self.0[player]
    }

    /// Same profile with one player's action replaced.
    pub fn with(&self, player: usize, action: Action) -> Self {
        let mut p = self.clone();
        p.0[player] = action;
        p
    }

    /// Inserts `action` for `player` into the actions of everyone else.
    pub fn from_others(others: &[Action], player: usize, action: Action) -> Self {
        let mut v = others.to_vec();
        v.insert(player, action);
        ActionProfile(v)
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            write!(f, "{}", a.symbol())?;
        }
        Ok(())
    }
}

/// Who plays and who is in conflict with whom inside one (sub-)game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameStructure {
    /// Player 0 is the sub-game's ego.
    pub players: Vec<AgentId>,
    /// Per player, the in-game players whose trajectories conflict with it.
    pub first_level: Vec<Vec<usize>>,
}

impl GameStructure {
    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }
}

/// Dense payoff table for every profile and player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormGame {
    pub structure: GameStructure,
    payoffs: Vec<f64>,
}

impl NormalFormGame {
    /// Fills the table from `f(profile, player)`.
    pub fn from_fn<E>(
        structure: GameStructure,
        mut f: impl FnMut(&ActionProfile, usize) -> Result<f64, E>,
    ) -> Result<Self, E> {
        let n = structure.len();
        let count = 1usize << n;
        let mut payoffs = Vec::with_capacity(count * n);
        for idx in 0..count {
            let profile = ActionProfile::from_index(idx, n);
            for p in 0..n {
                payoffs.push(f(&profile, p)?);
            }
        }
        Ok(NormalFormGame { structure, payoffs })
    }

    /// Game with no conflict structure, for solver tests.
    pub fn from_table(players: usize, payoffs: Vec<f64>) -> Self {
        assert_eq!(payoffs.len(), (1 << players) * players, "table size");
        let structure = GameStructure {
            players: (1..=players as AgentId).collect(),
            first_level: vec![Vec::new(); players],
        };
        NormalFormGame { structure, payoffs }
    }

    pub fn player_count(&self) -> usize {
        self.structure.len()
    }

    pub fn profile_count(&self) -> usize {
        1 << self.player_count()
    }

    pub fn payoff_at(&self, profile_index: usize, player: usize) -> f64 {
        self.payoffs[profile_index * self.player_count() + player]
    }

    pub fn payoff(&self, profile: &ActionProfile, player: usize) -> f64 {
        self.payoff_at(profile.index(), player)
    }

    pub fn payoffs_mut(&mut self) -> &mut [f64] {
        &mut self.payoffs
    }

    /// Text dump: one block per player, profiles in lexicographic order.
    pub fn dump(&self) -> String {
        use fmt::Write;
        let n = self.player_count();
        let ids: Vec<String> = self.structure.players.iter().map(|p| p.to_string()).collect();
        let mut out = String::new();
        writeln!(out, "players: [{}]", ids.join(", ")).unwrap();
        for p in 0..n {
            writeln!(out, "player {} payoffs:", self.structure.players[p]).unwrap();
            for idx in 0..self.profile_count() {
                let prof = ActionProfile::from_index(idx, n);
                writeln!(out, "  {prof}  {:.6}", self.payoff_at(idx, p)).unwrap();
            }
        }
        out
    }
}
