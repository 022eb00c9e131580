use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::AgentId;
use crate::game::Arrivals;
use crate::world::{AgentState, VehicleParams};

/// How far short of the stop line the front may be and still count as
/// arrived; a vehicle that stops just before the line has arrived.
pub const ARRIVAL_TOLERANCE: f64 = 0.5;

/// First stop-line arrival stamp per agent.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ArrivalLedger {
    pub stamps: BTreeMap<AgentId, Option<f64>>,
}

impl ArrivalLedger {
    pub fn from_states(states: &[AgentState]) -> Self {
        ArrivalLedger { stamps: states.iter().map(|s| (s.id, s.arrival_time)).collect() }
    }

    pub fn arrival(&self, id: AgentId) -> Option<f64> {
        self.stamps.get(&id).copied().flatten()
    }

    pub fn arrivals(&self) -> Arrivals {
        Arrivals { times: self.stamps.clone() }
    }
}

fn arrived(state: &AgentState, params: &VehicleParams) -> bool {
    state
        .route
        .stop_arc
        .is_some_and(|stop| state.front_arc(params) >= stop - ARRIVAL_TOLERANCE)
}

/// Stamps agents that reached their stop line for the first time.
pub fn update_ledger(mut ledger: ArrivalLedger, states: &[AgentState], params: &[VehicleParams], t: f64) -> ArrivalLedger {
    for (s, p) in states.iter().zip(params) {
        let slot = ledger.stamps.entry(s.id).or_insert(None);
        if slot.is_none() && arrived(s, p) {
            *slot = Some(t);
        }
    }
    ledger
}
