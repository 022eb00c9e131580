use super::conflict::{ConflictPoint, ConflictTable, Crossing};
use super::timing::{tosc, ttc};
use crate::error::{AgentId, Error, Result};
use crate::world::{AgentState, IntersectionRegion, VehicleParams};

/// A frozen view of every agent at one instant, as seen by the decision
/// layer.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub agents: &'a [AgentState],
    pub params: &'a [VehicleParams],
    pub region: &'a IntersectionRegion,
    pub conflicts: &'a ConflictTable,
}

impl<'a> Snapshot<'a> {
    pub fn new(
        agents: &'a [AgentState],
        params: &'a [VehicleParams],
        region: &'a IntersectionRegion,
        conflicts: &'a ConflictTable,
    ) -> Self {
        debug_assert_eq!(agents.len(), params.len());
        debug_assert_eq!(agents.len(), conflicts.len());
        Snapshot { agents, params, region, conflicts }
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }

    pub fn index_of(&self, id: AgentId) -> Result<usize> {
        self.agents
            .iter()
            .position(|a| a.id == id)
            .ok_or(Error::UnknownAgent(id))
    }

    pub fn id(&self, idx: usize) -> AgentId {
        self.agents[idx].id
    }

    /// Still relevant to the intersection: neither past its exit nor done.
    pub fn is_active(&self, idx: usize) -> bool {
        let a = &self.agents[idx];
        !a.finished() && !a.has_exited(&self.params[idx])
    }

    /// Forward trajectory conflict between two agents, from `i`'s view: the
    /// earliest crossing the two bodies have not both cleared.
    pub fn conflict(&self, i: usize, j: usize) -> Option<Crossing> {
        if i == j {
            return None;
        }
        let reach = self.params[i].radius + self.params[j].radius;
        self.conflicts.forward(i, j, self.agents[i].s, self.agents[j].s, reach)
    }

    pub fn conflict_point(&self, i: usize, j: usize) -> Option<ConflictPoint> {
        self.conflict(i, j).map(|c| ConflictPoint::new(self.id(i), self.id(j), c))
    }

    /// T^c(i, j): time for `i` to reach its conflict point with `j`.
    pub fn ttc_between(&self, i: usize, j: usize) -> Option<f64> {
        let c = self.conflict(i, j)?;
        let a = &self.agents[i];
        ttc((c.arc_i - a.s).max(0.0), a.speed).ok()
    }

    /// |T^c(i, j) - T^c(j, i)| at the shared conflict point.
    pub fn ttc_gap(&self, i: usize, j: usize) -> Option<f64> {
        let c = self.conflict(i, j)?;
        let (ai, aj) = (&self.agents[i], &self.agents[j]);
        let ti = ttc((c.arc_i - ai.s).max(0.0), ai.speed).ok()?;
        let tj = ttc((c.arc_j - aj.s).max(0.0), aj.speed).ok()?;
        Some((ti - tj).abs())
    }

    pub fn tosc(&self, idx: usize) -> f64 {
        tosc(&self.agents[idx], &self.params[idx])
    }
}
