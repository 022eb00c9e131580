//! N-player normal-form go/yield games: payoff construction from safety and
//! first-come-first-go terms, and pure Nash equilibrium solving.

mod nash;
mod payoff;
mod table;

use serde::{Deserialize, Serialize};

pub use crate::world::Action;
pub use nash::{best_response, pure_nash, pure_nash_with_cap, select_equilibrium, NashResult, MAX_PLAYERS};
pub use payoff::{build_payoffs, rule_payoff, safety_payoff, Arrivals, GameGeometry};
pub use table::{ActionProfile, GameStructure, NormalFormGame};

use crate::error::{Error, Result};

/// Payoff weights. `beta` trades the safety term against the rule term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GameParams {
    pub beta: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
    /// Bonus added to a go term when the first-level agent's own neighbour goes.
    pub reward: f64,
}

impl Default for GameParams {
    fn default() -> Self {
        GameParams { beta: 0.5, theta1: 1.0, theta2: 1.0, theta3: 1.0, theta4: 1.0, reward: 5.0 }
    }
}

impl GameParams {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.beta, self.theta1, self.theta2, self.theta3, self.theta4, self.reward];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("GameParams"));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidParameter { name: "beta", reason: format!("{} not in [0, 1]", self.beta) });
        }
        for (name, v) in [("theta1", self.theta1), ("theta2", self.theta2), ("theta3", self.theta3), ("theta4", self.theta4), ("reward", self.reward)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be positive") });
            }
        }
        Ok(())
    }
}
