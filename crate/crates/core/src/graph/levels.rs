use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::cluster::{cluster_agents, Cluster, DEFAULT_HEADING_TOL};
use super::snapshot::Snapshot;
use crate::error::AgentId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphOptions {
    pub cluster: bool,
    pub heading_tol: f64,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions { cluster: true, heading_tol: DEFAULT_HEADING_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphNode {
    pub id: AgentId,
    /// 0 for the ego.
    pub level: usize,
    /// Cluster members this node stands for (itself included).
    pub members: Vec<AgentId>,
    /// Smallest |T^c difference| to a node of the previous level; 0 for the ego.
    pub conflict_gap: f64,
}

/// Leveled dependence graph rooted at the ego. An edge `(child, parent)`
/// means the child's trajectory conflicts with the parent's, and the
/// parent sits exactly one level closer to the ego.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionGraph {
    pub ego: AgentId,
    /// Ego first, then by level and id.
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<(AgentId, AgentId)>,
    pub clusters: Vec<Cluster>,
}

impl InteractionGraph {
    pub fn node(&self, id: AgentId) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn level(&self, id: AgentId) -> Option<usize> {
        self.node(id).map(|n| n.level)
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }

    /// Node count per level, starting at level 1.
    pub fn level_sizes(&self) -> Vec<usize> {
        (1..=self.depth()).map(|k| self.level_members(k).len()).collect()
    }

    /// Ids at level `k`, ascending.
    pub fn level_members(&self, k: usize) -> Vec<AgentId> {
        self.nodes.iter().filter(|n| n.level == k).map(|n| n.id).collect()
    }

    pub fn parents_of(&self, child: AgentId) -> Vec<AgentId> {
        self.edges.iter().filter(|e| e.0 == child).map(|e| e.1).collect()
    }

    pub fn children_of(&self, parent: AgentId) -> Vec<AgentId> {
        self.edges.iter().filter(|e| e.1 == parent).map(|e| e.0).collect()
    }

    /// Every non-ego node, ascending by (level, id).
    pub fn neighbors(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.iter().filter(|n| n.level > 0)
    }
}

/// Clusters the candidates, then assigns levels breadth-first from the
/// ego: level k holds one representative per not-yet-placed cluster that
/// has a member in conflict with some level-(k-1) node.
pub fn build_interaction_graph(snap: &Snapshot<'_>, ego: usize, opts: GraphOptions) -> InteractionGraph {
    let ego_id = snap.id(ego);
    let candidates: Vec<usize> = (0..snap.len()).filter(|&i| i != ego && snap.is_active(i)).collect();
    let clusters = if opts.cluster {
        cluster_agents(snap, &candidates, opts.heading_tol)
    } else {
        let mut c: Vec<Cluster> = candidates.iter().map(|&i| Cluster::singleton(snap.id(i))).collect();
        c.sort_by_key(|c| c.members[0]);
        c
    };
    let index: BTreeMap<AgentId, usize> = candidates.iter().map(|&i| (snap.id(i), i)).collect();

    let mut nodes = vec![GraphNode { id: ego_id, level: 0, members: vec![ego_id], conflict_gap: 0.0 }];
    let mut edges = Vec::new();
    let mut placed = vec![false; clusters.len()];
    let mut out_clusters = clusters.clone();
    let mut frontier = vec![ego];
    let mut level = 0;

    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        let mut level_nodes = Vec::new();
        for (ci, cluster) in clusters.iter().enumerate() {
            if placed[ci] {
                continue;
            }
            // (gap, member id, anchor id) minimised lexicographically.
            let mut best: Option<(f64, AgentId, AgentId)> = None;
            for &m in &cluster.members {
                let mi = index[&m];
                for &f in &frontier {
                    if let Some(gap) = snap.ttc_gap(f, mi) {
                        let key = (gap, m, snap.id(f));
                        let better = match best {
                            None => true,
                            Some(b) => key.0 < b.0 || (key.0 == b.0 && (key.1, key.2) < (b.1, b.2)),
                        };
                        if better {
                            best = Some(key);
                        }
                    }
                }
            }
            let Some((gap, rep, _)) = best else { continue };
            placed[ci] = true;
            out_clusters[ci].representative = rep;
            let ri = index[&rep];
            let mut parents: Vec<AgentId> = frontier
                .iter()
                .filter(|&&f| snap.conflict(ri, f).is_some())
                .map(|&f| snap.id(f))
                .collect();
            parents.sort_unstable();
            edges.extend(parents.into_iter().map(|p| (rep, p)));
            level_nodes.push(GraphNode { id: rep, level, members: cluster.members.clone(), conflict_gap: gap });
            next.push(ri);
        }
        level_nodes.sort_by_key(|n| n.id);
        nodes.extend(level_nodes);
        next.sort_by_key(|&i| snap.id(i));
        frontier = next;
    }

    let kept: BTreeSet<AgentId> = nodes.iter().flat_map(|n| n.members.iter().copied()).collect();
    out_clusters.retain(|c| c.members.iter().any(|m| kept.contains(m)));
    InteractionGraph { ego: ego_id, nodes, edges, clusters: out_clusters }
}

/// Largest k such that the ego plus levels 1..=k fit within `n_max`
/// players.
pub fn select_k(level_sizes: &[usize], n_max: usize) -> usize {
    let mut total = 1;
    let mut k = 0;
    for &size in level_sizes {
        total += size;
        if total > n_max {
            break;
        }
        k += 1;
    }
    k
}
