use std::collections::BTreeSet;

use serde::Serialize;

use super::levels::InteractionGraph;
use crate::error::AgentId;

/// A level-1 node and every node (within the selected levels) with a
/// directed path to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub root: AgentId,
    /// Ascending, root included.
    pub members: Vec<AgentId>,
}

/// One branch per level-1 node, restricted to nodes at level `max_level`
/// or below.
pub fn extract_branches(graph: &InteractionGraph, max_level: usize) -> Vec<Branch> {
    let within = |id: AgentId| graph.level(id).is_some_and(|l| l >= 1 && l <= max_level);
    graph
        .level_members(1)
        .into_iter()
        .filter(|&r| within(r))
        .map(|root| {
            let mut seen = BTreeSet::from([root]);
            let mut stack = vec![root];
            while let Some(n) = stack.pop() {
                for child in graph.children_of(n) {
                    if within(child) && seen.insert(child) {
                        stack.push(child);
                    }
                }
            }
            Branch { root, members: seen.into_iter().collect() }
        })
        .collect()
}

/// Merges branches that share a node (transitively) and prefixes each
/// merged group with the ego. Groups are ordered by their smallest root;
/// members after the ego are ascending.
pub fn decompose(branches: &[Branch], ego: AgentId) -> Vec<Vec<AgentId>> {
    let n = branches.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(g: &mut [usize], mut x: usize) -> usize {
        while g[x] != x {
            g[x] = g[g[x]];
            x = g[x];
        }
        x
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let shares = branches[a].members.iter().any(|m| branches[b].members.contains(m));
            if shares {
                let (x, y) = (find(&mut group, a), find(&mut group, b));
                if x != y {
                    group[x.max(y)] = x.min(y);
                }
            }
        }
    }
    let mut merged: Vec<(AgentId, BTreeSet<AgentId>)> = Vec::new();
    let mut slot_of_root = vec![None; n];
    for (a, branch) in branches.iter().enumerate() {
        let r = find(&mut group, a);
        let slot = *slot_of_root[r].get_or_insert_with(|| {
            merged.push((AgentId::MAX, BTreeSet::new()));
            merged.len() - 1
        });
        merged[slot].0 = merged[slot].0.min(branch.root);
        merged[slot].1.extend(branch.members.iter().copied());
    }
    merged.sort_by_key(|(root, _)| *root);
    merged
        .into_iter()
        .map(|(_, members)| std::iter::once(ego).chain(members.into_iter().filter(|&m| m != ego)).collect())
        .collect()
}
