use std::collections::BTreeSet;
use std::time::Instant;

use super::{Decision, Plan, PolicyConfig, PolicyKind};
use crate::error::{AgentId, Error, Result};
use crate::game::{build_payoffs, pure_nash, Arrivals, GameGeometry, GameStructure, NormalFormGame, MAX_PLAYERS};
use crate::graph::{build_interaction_graph, decompose, extract_branches, select_k, GraphOptions, InteractionGraph, Snapshot};
use crate::world::Action;

/// The state one agent decides against.
#[derive(Debug, Clone, Copy)]
pub struct DecisionInput<'a> {
    pub snap: Snapshot<'a>,
    /// Index of the deciding agent in the snapshot.
    pub ego: usize,
}

impl<'a> DecisionInput<'a> {
    pub fn new(snap: Snapshot<'a>, ego: usize) -> Self {
        DecisionInput { snap, ego }
    }

    pub fn for_id(snap: Snapshot<'a>, ego: AgentId) -> Result<Self> {
        Ok(DecisionInput { snap, ego: snap.index_of(ego)? })
    }

    fn ego_id(&self) -> AgentId {
        self.snap.id(self.ego)
    }
}

/// Actions allowed by the stop-sign rule.
pub fn action_filter(input: &DecisionInput<'_>) -> Vec<Action> {
    let ego = &input.snap.agents[input.ego];
    if ego.has_stopped || ego.past_stop_line(&input.snap.params[input.ego]) {
        vec![Action::Go, Action::Yield]
    } else {
        vec![Action::Yield]
    }
}

/// Safety check: a Go is replaced by Yield when a moving agent that
/// directly conflicts with the ego reaches the conflict before the ego has
/// cleared plus a margin. Returns the action and whether it was overridden.
pub fn safety_check(proposed: Action, input: &DecisionInput<'_>, t_margin: f64) -> (Action, bool) {
    if proposed == Action::Yield {
        return (Action::Yield, false);
    }
    let snap = &input.snap;
    let ts = snap.tosc(input.ego);
    let threat = (0..snap.len()).any(|j| {
        j != input.ego
            && snap.is_active(j)
            && snap.agents[j].is_moving()
            && snap.conflict(input.ego, j).is_some()
            && snap.ttc_between(j, input.ego).is_some_and(|tc| tc < ts + t_margin)
    });
    if threat {
        (Action::Yield, true)
    } else {
        (Action::Go, false)
    }
}

fn graph_options(cfg: &PolicyConfig, cluster: bool) -> GraphOptions {
    GraphOptions { cluster, heading_tol: cfg.heading_tol }
}

/// Chooses k (the number of whole levels kept) and the player set (ego
/// first, then ascending ids).
///
/// Whole levels are taken while they fit. If not even level 1 fits, the
/// `n_max - 1` level-1 nodes with the smallest conflict gap are kept. With
/// `partial_levels`, leftover slots are filled the same way from level k+1.
pub fn select_players(graph: &InteractionGraph, cfg: &PolicyConfig) -> (usize, Vec<AgentId>) {
    let sizes = graph.level_sizes();
    let k = select_k(&sizes, cfg.n_max);
    let mut chosen: BTreeSet<AgentId> = graph.neighbors().filter(|n| n.level <= k).map(|n| n.id).collect();
    let next = k + 1;
    if next <= sizes.len() && (k == 0 || cfg.partial_levels) {
        let mut partial: Vec<_> = graph.neighbors().filter(|n| n.level == next).collect();
        partial.sort_by(|a, b| a.conflict_gap.total_cmp(&b.conflict_gap).then(a.id.cmp(&b.id)));
        let room = cfg.n_max.saturating_sub(1 + chosen.len());
        chosen.extend(partial.iter().take(room).map(|n| n.id));
    }
    let mut players = vec![graph.ego];
    players.extend(chosen);
    (k, players)
}

/// Builds the payoff table over `players` (ids, ego first) from the
/// snapshot's conflicts, timing and arrival stamps.
pub fn build_game(snap: &Snapshot<'_>, players: &[AgentId], cfg: &PolicyConfig) -> Result<NormalFormGame> {
    let idx: Vec<usize> = players.iter().map(|&p| snap.index_of(p)).collect::<Result<_>>()?;
    let first_level: Vec<Vec<usize>> = (0..idx.len())
        .map(|a| (0..idx.len()).filter(|&b| b != a && snap.conflict(idx[a], idx[b]).is_some()).collect())
        .collect();
    let mut geom = GameGeometry::default();
    for (a, fl) in first_level.iter().enumerate() {
        geom.tosc.insert(players[a], snap.tosc(idx[a]));
        for &b in fl {
            let tc = snap
                .ttc_between(idx[b], idx[a])
                .ok_or(Error::MissingTtc { from: players[b], to: players[a] })?;
            geom.ttc.insert((players[b], players[a]), tc);
        }
    }
    let arrivals = Arrivals::new(idx.iter().map(|&i| (snap.id(i), snap.agents[i].arrival_time)));
    let structure = GameStructure { players: players.to_vec(), first_level };
    build_payoffs(structure, &geom, &arrivals, &cfg.game)
}

fn solve(snap: &Snapshot<'_>, groups: Vec<Vec<AgentId>>, cfg: &PolicyConfig) -> Result<(Vec<NormalFormGame>, Vec<crate::game::NashResult>)> {
    let mut games = Vec::with_capacity(groups.len());
    let mut results = Vec::with_capacity(groups.len());
    for g in groups {
        if g.len() > MAX_PLAYERS {
            return Err(Error::PlayerCapExceeded { players: g.len(), cap: MAX_PLAYERS });
        }
        let game = build_game(snap, &g, cfg)?;
        results.push(pure_nash(&game)?);
        games.push(game);
    }
    Ok((games, results))
}

/// Graph, player selection and solved games for the configured policy.
pub fn plan(input: &DecisionInput<'_>, cfg: &PolicyConfig) -> Result<Plan> {
    let snap = &input.snap;
    let ego = input.ego_id();
    let (graph, k, groups) = match cfg.policy {
        PolicyKind::Hierarchical => {
            let graph = build_interaction_graph(snap, input.ego, graph_options(cfg, cfg.cluster));
            let (k, players) = select_players(&graph, cfg);
            let groups = if players.len() > 1 { vec![players] } else { Vec::new() };
            (graph, k, groups)
        }
        PolicyKind::Improved => {
            let graph = build_interaction_graph(snap, input.ego, graph_options(cfg, cfg.cluster));
            let (k, players) = select_players(&graph, cfg);
            let keep: BTreeSet<AgentId> = players.iter().copied().collect();
            // Deepest level with a kept player; deeper than k with partial levels.
            let depth = graph.neighbors().filter(|n| keep.contains(&n.id)).map(|n| n.level).max().unwrap_or(0);
            let branches: Vec<_> = extract_branches(&graph, depth)
                .into_iter()
                .filter(|b| keep.contains(&b.root))
                .map(|mut b| {
                    b.members.retain(|m| keep.contains(m));
                    b
                })
                .collect();
            let groups = decompose(&branches, ego);
            (graph, k, groups)
        }
        PolicyKind::Pairwise => {
            let graph = build_interaction_graph(snap, input.ego, graph_options(cfg, cfg.cluster));
            let groups: Vec<Vec<AgentId>> = graph.level_members(1).into_iter().map(|r| vec![ego, r]).collect();
            let k = usize::from(!groups.is_empty());
            (graph, k, groups)
        }
        PolicyKind::Full => {
            let graph = build_interaction_graph(snap, input.ego, graph_options(cfg, false));
            let mut players = vec![ego];
            let mut rest: Vec<AgentId> = graph.neighbors().map(|n| n.id).collect();
            rest.sort_unstable();
            players.extend(rest);
            let k = graph.depth();
            let groups = if players.len() > 1 { vec![players] } else { Vec::new() };
            (graph, k, groups)
        }
    };
    let (games, results) = solve(snap, groups, cfg)?;
    Ok(Plan { graph, k, games, results })
}

/// Runs the configured policy, then the rule filter and the safety check.
pub fn decide(input: &DecisionInput<'_>, cfg: &PolicyConfig) -> Result<Decision> {
    let start = Instant::now();
    let plan = plan(input, cfg)?;
    let mut action = plan.ego_action();
    if !action_filter(input).contains(&action) {
        action = Action::Yield;
    }
    let mut overridden = false;
    if cfg.safety_check {
        (action, overridden) = safety_check(action, input, cfg.t_margin);
    }
    Ok(Decision {
        ego: input.ego_id(),
        action,
        policy: cfg.policy,
        players_used: plan.games.iter().map(|g| g.structure.players.clone()).collect(),
        equilibrium: plan.results.iter().map(|r| r.selected.clone()).collect(),
        safety_overridden: overridden,
        k: plan.k,
        levels: {
            let mut l: Vec<_> = plan.graph.nodes.iter().flat_map(|n| n.members.iter().map(move |&m| (m, n.level))).collect();
            l.sort_unstable();
            l
        },
        latency: start.elapsed().as_secs_f64(),
    })
}

fn with_policy(cfg: &PolicyConfig, policy: PolicyKind) -> PolicyConfig {
    PolicyConfig { policy, ..*cfg }
}

pub fn hierarchical_decide(input: &DecisionInput<'_>, cfg: &PolicyConfig) -> Result<Decision> {
    decide(input, &with_policy(cfg, PolicyKind::Hierarchical))
}

pub fn improved_hierarchical_decide(input: &DecisionInput<'_>, cfg: &PolicyConfig) -> Result<Decision> {
    decide(input, &with_policy(cfg, PolicyKind::Improved))
}

pub fn pairwise_decide(input: &DecisionInput<'_>, cfg: &PolicyConfig) -> Result<Decision> {
    decide(input, &with_policy(cfg, PolicyKind::Pairwise))
}

pub fn full_game_decide(input: &DecisionInput<'_>, cfg: &PolicyConfig) -> Result<Decision> {
    decide(input, &with_policy(cfg, PolicyKind::Full))
}
