use serde::Serialize;

use super::snapshot::Snapshot;
use crate::error::{AgentId, Error, Result};
use crate::world::{Point, Route};

/// Default parallelism tolerance for clustering, 10 degrees.
pub const DEFAULT_HEADING_TOL: f64 = 10.0 * std::f64::consts::PI / 180.0;

/// Agents with parallel in-region trajectories, represented by one member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cluster {
    /// Sorted ascending.
    pub members: Vec<AgentId>,
    pub representative: AgentId,
}

impl Cluster {
    pub fn singleton(id: AgentId) -> Self {
        Cluster { members: vec![id], representative: id }
    }
}

/// Direction of the route's chord through the region.
fn region_chord(route: &Route) -> Option<Point> {
    let (entry, exit) = route.span?;
    let d = route.path.point_at(exit) - route.path.point_at(entry);
    (d.norm() > 1e-6).then_some(d)
}

/// Parallel within `tol` and travelling the same way.
pub fn parallel_same_direction(a: &Route, b: &Route, tol: f64) -> bool {
    match (region_chord(a), region_chord(b)) {
        (Some(da), Some(db)) => {
            let angle = da.cross(db).atan2(da.dot(db)).abs();
            angle <= tol
        }
        _ => false,
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Partitions the candidate agents (snapshot indices) into connected
/// components of the pairwise parallel-and-same-direction relation. The
/// representative defaults to the smallest id until chosen against an
/// anchor.
pub fn cluster_agents(snap: &Snapshot<'_>, candidates: &[usize], heading_tol: f64) -> Vec<Cluster> {
    let n = candidates.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for a in 0..n {
        for b in (a + 1)..n {
            let ra = &snap.agents[candidates[a]].route;
            let rb = &snap.agents[candidates[b]].route;
            if parallel_same_direction(ra, rb, heading_tol) {
                let (x, y) = (find(&mut parent, a), find(&mut parent, b));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut groups: Vec<Vec<AgentId>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; n];
    for (a, &cand) in candidates.iter().enumerate() {
        let r = find(&mut parent, a);
        let slot = *root_slot[r].get_or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(snap.id(cand));
    }
    let mut clusters: Vec<Cluster> = groups
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            Cluster { representative: members[0], members }
        })
        .collect();
    clusters.sort_by_key(|c| c.members[0]);
    clusters
}

/// The member most in conflict with `anchor`: smallest |T^c(anchor, j) -
/// T^c(j, anchor)|, ties to the smaller id. Members without a conflict with
/// the anchor are skipped.
pub fn select_representative(anchor: AgentId, cluster: &Cluster, snap: &Snapshot<'_>) -> Result<AgentId> {
    let a = snap.index_of(anchor)?;
    let mut best: Option<(f64, AgentId)> = None;
    for &m in &cluster.members {
        let j = snap.index_of(m)?;
        if let Some(gap) = snap.ttc_gap(a, j) {
            if best.is_none_or(|(g, id)| gap < g || (gap == g && m < id)) {
                best = Some((gap, m));
            }
        }
    }
    best.map(|(_, id)| id).ok_or(Error::NoConflictingMember { anchor })
}
