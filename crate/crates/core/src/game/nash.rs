use serde::Serialize;

use super::{Action, ActionProfile, NormalFormGame};
use crate::error::{Error, Result};

/// Enumeration cap: 2^12 profiles.
pub const MAX_PLAYERS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashResult {
    /// Pure equilibria in lexicographic profile order.
    pub equilibria: Vec<ActionProfile>,
    pub selected: Option<ActionProfile>,
}

/// Every action maximising `player`'s payoff against `others` (the profile
/// with the player's own entry removed). Returned in `Go, Yield` order.
pub fn best_response(game: &NormalFormGame, player: usize, others: &[Action]) -> Vec<Action> {
    let go = game.payoff(&ActionProfile::from_others(others, player, Action::Go), player);
    let yi = game.payoff(&ActionProfile::from_others(others, player, Action::Yield), player);
    if go > yi {
        vec![Action::Go]
    } else if yi > go {
        vec![Action::Yield]
    } else {
        vec![Action::Go, Action::Yield]
    }
}

pub fn pure_nash(game: &NormalFormGame) -> Result<NashResult> {
    pure_nash_with_cap(game, MAX_PLAYERS)
}

pub fn pure_nash_with_cap(game: &NormalFormGame, cap: usize) -> Result<NashResult> {
    let n = game.player_count();
    if n > cap {
        return Err(Error::PlayerCapExceeded { players: n, cap });
    }
    let mut equilibria = Vec::new();
    for idx in 0..game.profile_count() {
        // Flipping player p's bit gives its unilateral deviation.
        let stable = (0..n).all(|p| {
            let dev = idx ^ (1 << (n - 1 - p));
            game.payoff_at(idx, p) >= game.payoff_at(dev, p)
        });
        if stable {
            equilibria.push(ActionProfile::from_index(idx, n));
        }
    }
    let selected = select_equilibrium(game, &equilibria, 0);
    Ok(NashResult { equilibria, selected })
}

/// Picks one equilibrium: profiles where the ego yields come first, then
/// higher ego payoff, then the lexicographically smallest profile.
pub fn select_equilibrium(
    game: &NormalFormGame,
    equilibria: &[ActionProfile],
    ego: usize,
) -> Option<ActionProfile> {
    let mut best: Option<&ActionProfile> = None;
    for eq in equilibria {
        let better = match best {
            None => true,
            Some(b) => {
                let (ea, ba) = (eq.action(ego), b.action(ego));
                if ea != ba {
                    ea == Action::Yield
                } else {
                    game.payoff(eq, ego) > game.payoff(b, ego)
                }
            }
        };
        if better {
            best = Some(eq);
        }
    }
    best.cloned()
}
