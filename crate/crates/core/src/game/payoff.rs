use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{Action, ActionProfile, GameParams, GameStructure, NormalFormGame};
use crate::error::{AgentId, Error, Result};

/// Timing inputs for the safety term.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GameGeometry {
    /// `(k, i)` -> time for k to reach its conflict point with i.
    pub ttc: BTreeMap<(AgentId, AgentId), f64>,
    /// Per-agent time to clear the intersection.
    pub tosc: BTreeMap<AgentId, f64>,
}

impl GameGeometry {
    pub fn ttc(&self, from: AgentId, to: AgentId) -> Result<f64> {
        self.ttc.get(&(from, to)).copied().ok_or(Error::MissingTtc { from, to })
    }

    pub fn tosc(&self, id: AgentId) -> Result<f64> {
        self.tosc.get(&id).copied().ok_or(Error::MissingTosc(id))
    }
}

/// Stop-line arrival stamps; `None` means not yet arrived.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Arrivals {
    pub times: BTreeMap<AgentId, Option<f64>>,
}

impl Arrivals {
    pub fn new(times: impl IntoIterator<Item = (AgentId, Option<f64>)>) -> Self {
        Arrivals { times: times.into_iter().collect() }
    }

    /// `r_ik`: whether `i` arrived strictly before `k`. Equal stamps go to the
    /// lower id; agents that have not arrived sort last.
    pub fn earlier(&self, i: AgentId, k: AgentId) -> Result<bool> {
        let ti = self.times.get(&i).ok_or(Error::UndefinedArrival(i, k))?;
        let tk = self.times.get(&k).ok_or(Error::UndefinedArrival(i, k))?;
        let key = |t: &Option<f64>| t.unwrap_or(f64::INFINITY);
        Ok(match key(ti).total_cmp(&key(tk)) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => i < k,
        })
    }
}

/// Safety term for `player` under `profile`.
pub fn safety_payoff(
    player: usize,
    profile: &ActionProfile,
    structure: &GameStructure,
    geom: &GameGeometry,
    params: &GameParams,
) -> Result<f64> {
    let me = structure.players[player];
    let first = &structure.first_level[player];
    if first.is_empty() {
        return Ok(0.0);
    }
    let ts = geom.tosc(me)?;
    let mut total = 0.0;
    for &k in first {
        let tc = geom.ttc(structure.players[k], me)?;
        total += match profile.action(player) {
            Action::Yield => params.theta1 * (ts - params.theta2 * tc),
            Action::Go => {
                let pushed = structure.first_level[k]
                    .iter()
                    .any(|&m| m != player && profile.action(m) == Action::Go);
                let bonus = if pushed { params.reward } else { 0.0 };
                params.theta3 * (tc - params.theta4 * ts + bonus)
            }
        };
    }
    Ok(total)
}

/// First-come-first-go term: a flat 0.5 for Yield, the product of `r_ik`
/// over the first level for Go.
pub fn rule_payoff(
    player: usize,
    profile: &ActionProfile,
    structure: &GameStructure,
    arrivals: &Arrivals,
) -> Result<f64> {
    match profile.action(player) {
        Action::Yield => Ok(0.5),
        Action::Go => {
            let me = structure.players[player];
            for &k in &structure.first_level[player] {
                if !arrivals.earlier(me, structure.players[k])? {
                    return Ok(0.0);
                }
            }
            Ok(1.0)
        }
    }
}

pub fn build_payoffs(
    structure: GameStructure,
    geom: &GameGeometry,
    arrivals: &Arrivals,
    params: &GameParams,
) -> Result<NormalFormGame> {
    let beta = params.beta;
    let s = structure.clone();
    NormalFormGame::from_fn(structure, |profile, p| {
        let safety = if beta > 0.0 { safety_payoff(p, profile, &s, geom, params)? } else { 0.0 };
        let rule = if beta < 1.0 { rule_payoff(p, profile, &s, arrivals)? } else { 0.0 };
        let v = beta * safety + (1.0 - beta) * rule;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("payoff"))
        }
    })
}
