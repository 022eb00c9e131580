//! Test helpers for building snapshots from straight-line agents.

use std::sync::Arc;

use super::ConflictTable;
use crate::error::AgentId;
use crate::world::{AgentKind, AgentState, IntersectionRegion, Point, Route, Trajectory, VehicleParams};

/// `(id, from, to, speed)`.
pub(crate) type Spec = (AgentId, (f64, f64), (f64, f64), f64);

pub(crate) struct Fixture {
    pub agents: Vec<AgentState>,
    pub params: Vec<VehicleParams>,
    pub region: IntersectionRegion,
    pub table: ConflictTable,
}

impl Fixture {
    /// Agents as `(id, from, to, speed)`, each starting at `from`.
    pub fn new(half: f64, specs: &[Spec]) -> Self {
        let region = IntersectionRegion::square(half, vec![]).unwrap();
        let agents: Vec<AgentState> = specs
            .iter()
            .map(|&(id, a, b, v)| {
                let path = Trajectory::new(vec![Point::new(a.0, a.1), Point::new(b.0, b.1)]).unwrap();
                AgentState::on_route(id, AgentKind::Vehicle, Arc::new(Route::new(path, &region)), 0.0, v)
            })
            .collect();
        let params = agents
            .iter()
            .map(|_| VehicleParams { radius: 0.0001, ..VehicleParams::for_kind(AgentKind::Vehicle) })
            .collect();
        let routes: Vec<&Trajectory> = agents.iter().map(|a| &a.route.path).collect();
        let table = ConflictTable::build(&routes, &region);
        Fixture { agents, params, region, table }
    }

    pub fn snapshot(&self) -> super::Snapshot<'_> {
        super::Snapshot::new(&self.agents, &self.params, &self.region, &self.table)
    }
}
