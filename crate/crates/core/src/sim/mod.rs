//! Closed-loop simulation: physics, decision cadence, arrival bookkeeping,
//! collisions, traces and metrics.

mod ledger;
mod metrics;
mod random;
mod run;

use serde::{Deserialize, Serialize};

pub use ledger::{update_ledger, ArrivalLedger, ARRIVAL_TOLERANCE};
pub use metrics::{compute_metrics, Metrics};
pub use random::{generate_random_scenario, RegionTemplate};
pub use run::{motion_context, run, CollisionEvent, Trace, TraceRow};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub dt_physics: f64,
    pub dt_decision: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { dt_physics: 0.01, dt_decision: 0.1, horizon: 60.0, seed: 0 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dt_physics", self.dt_physics), ("dt_decision", self.dt_decision), ("horizon", self.horizon)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter { name, reason: format!("{v} must be positive") });
            }
        }
        let ratio = self.dt_decision / self.dt_physics;
        if ratio < 1.0 - 1e-9 || (ratio - ratio.round()).abs() > 1e-6 {
            return Err(Error::InvalidParameter {
                name: "dt_decision",
                reason: format!("{} is not an integer multiple of dt_physics {}", self.dt_decision, self.dt_physics),
            });
        }
        Ok(())
    }

    /// Physics steps per decision.
    pub fn decision_every(&self) -> usize {
        (self.dt_decision / self.dt_physics).round() as usize
    }

    pub fn tick_count(&self) -> usize {
        (self.horizon / self.dt_physics).round() as usize
    }
}
