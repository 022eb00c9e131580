//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use hgame::game::GameParams;
use hgame::graph::{ConflictTable, GraphNode, InteractionGraph, Snapshot};
use hgame::scenario::Scenario;
use hgame::sim::{update_ledger, ArrivalLedger};
use hgame::world::{Action, AgentKind, AgentState, IntersectionRegion, Point, Route, Trajectory, VehicleParams};
use hgame::AgentId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct World {
    pub agents: Vec<AgentState>,
    pub params: Vec<VehicleParams>,
    pub region: IntersectionRegion,
    pub table: ConflictTable,
}

impl World {
    pub fn new(agents: Vec<AgentState>, params: Vec<VehicleParams>, region: IntersectionRegion) -> Self {
        let routes: Vec<&Trajectory> = agents.iter().map(|a| &a.route.path).collect();
        let table = ConflictTable::build(&routes, &region);
        World { agents, params, region, table }
    }

    /// The scenario at t=0 with arrival stamps as the simulator sets them.
    pub fn from_scenario(s: &Scenario) -> Self {
        let params = s.params();
        let mut agents = s.states();
        let ledger = update_ledger(ArrivalLedger::from_states(&agents), &agents, &params, 0.0);
        for a in &mut agents {
            a.arrival_time = ledger.arrival(a.id);
        }
        World::new(agents, params, s.region.clone())
    }

    /// `n` agents on random straight chords through a 10 m box, at random
    /// arc positions and speeds (some stopped), with random arrival stamps.
    pub fn random_lines(seed: u64, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let region = IntersectionRegion::square(10.0, vec![]).unwrap();
        let mut agents = Vec::with_capacity(n);
        for k in 0..n {
            let through = Point::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let d = Point::new(ang.cos(), ang.sin());
            let from = Point::new(through.x - 30.0 * d.x, through.y - 30.0 * d.y);
            let to = Point::new(through.x + 30.0 * d.x, through.y + 30.0 * d.y);
            let route = Arc::new(Route::new(Trajectory::new(vec![from, to]).unwrap(), &region));
            let speed = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.5..10.0) };
            let s = rng.gen_range(0.0..25.0);
            let mut a = AgentState::on_route(k as AgentId + 1, AgentKind::Vehicle, route, s, speed);
            a.has_stopped = rng.gen_bool(0.5);
            a.arrival_time = rng.gen_bool(0.7).then(|| f64::from(rng.gen_range(0..6u8)) * 0.5);
            agents.push(a);
        }
        let params = vec![VehicleParams::for_kind(AgentKind::Vehicle); n];
        World::new(agents, params, region)
    }

    pub fn snapshot(&self) -> Snapshot<'_> {
        Snapshot::new(&self.agents, &self.params, &self.region, &self.table)
    }
}

/// Every action vector (player 0 first) from which no single player gains
/// by switching, by exhaustive enumeration.
pub fn brute_force_equilibria(n: usize, payoff: impl Fn(&[Action], usize) -> f64) -> BTreeSet<Vec<Action>> {
    let mut out = BTreeSet::new();
    let mut profile = vec![Action::Go; n];
    for code in 0..(1u32 << n) {
        for (p, slot) in profile.iter_mut().enumerate() {
            *slot = if code >> p & 1 == 1 { Action::Yield } else { Action::Go };
        }
        let stable = (0..n).all(|p| {
            let mut alt = profile.clone();
            alt[p] = match alt[p] {
                Action::Go => Action::Yield,
                Action::Yield => Action::Go,
            };
            payoff(&profile, p) >= payoff(&alt, p)
        });
        if stable {
            out.insert(profile.clone());
        }
    }
    out
}

/// Element `p` of a payoff table stored row-major with player 0 as the
/// most significant bit (Go = 0).
pub fn table_payoff(table: &[f64], n: usize, actions: &[Action], p: usize) -> f64 {
    let mut idx = 0usize;
    for a in actions {
        idx = idx * 2 + usize::from(*a == Action::Yield);
    }
    table[idx * n + p]
}

/// Agents reachable from `ego` through the symmetric conflict relation
/// among active agents, with their hop distance.
pub fn hop_distances(snap: &Snapshot<'_>, ego: usize) -> BTreeMap<AgentId, usize> {
    let n = snap.len();
    let mut dist = vec![usize::MAX; n];
    dist[ego] = 0;
    let mut queue = VecDeque::from([ego]);
    while let Some(u) = queue.pop_front() {
        for v in 0..n {
            if v != u && dist[v] == usize::MAX && snap.is_active(v) && snap.conflict(u, v).is_some() {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (0..n).filter(|&i| dist[i] != usize::MAX).map(|i| (snap.id(i), dist[i])).collect()
}

/// Payoff of `players[p]` under `actions`, computed straight from the
/// snapshot's timing and arrival stamps.
pub fn direct_payoff(snap: &Snapshot<'_>, players: &[AgentId], params: &GameParams, actions: &[Action], p: usize) -> f64 {
    let idx: Vec<usize> = players.iter().map(|&id| snap.index_of(id).unwrap()).collect();
    let neighbours = |a: usize| -> Vec<usize> {
        (0..players.len()).filter(|&b| b != a && snap.conflict(idx[a], idx[b]).is_some()).collect()
    };
    let mine = neighbours(p);
    let ts = snap.tosc(idx[p]);
    let mut safety = 0.0;
    for &k in &mine {
        let tc = snap.ttc_between(idx[k], idx[p]).unwrap();
        safety += if actions[p] == Action::Yield {
            params.theta1 * (ts - params.theta2 * tc)
        } else {
            let pushed = neighbours(k).into_iter().any(|m| m != p && actions[m] == Action::Go);
            params.theta3 * (tc - params.theta4 * ts + if pushed { params.reward } else { 0.0 })
        };
    }
    let arrival = |i: usize| snap.agents[idx[i]].arrival_time.unwrap_or(f64::INFINITY);
    let first = |i: usize, k: usize| arrival(i) < arrival(k) || (arrival(i) == arrival(k) && players[i] < players[k]);
    let rule = match actions[p] {
        Action::Yield => 0.5,
        Action::Go => {
            if mine.iter().all(|&k| first(p, k)) {
                1.0
            } else {
                0.0
            }
        }
    };
    params.beta * safety + (1.0 - params.beta) * rule
}

/// Random layered dependence graph: `sizes[l]` nodes on level l+1, each
/// node below level 1 with one to three parents one level up. Levels
/// after an empty one stay empty.
pub fn random_graph(rng: &mut ChaCha8Rng, sizes: &[usize]) -> InteractionGraph {
    let ego: AgentId = 1;
    let mut nodes = vec![GraphNode { id: ego, level: 0, members: vec![ego], conflict_gap: 0.0 }];
    let mut edges = Vec::new();
    let mut prev = vec![ego];
    let mut next_id = 2;
    for (l, &size) in sizes.iter().enumerate() {
        if prev.is_empty() {
            break;
        }
        let mut this = Vec::new();
        for _ in 0..size {
            let id = next_id;
            next_id += 1;
            let mut parents: BTreeSet<AgentId> = BTreeSet::new();
            let want = rng.gen_range(1..=3.min(prev.len()));
            while parents.len() < want {
                parents.insert(prev[rng.gen_range(0..prev.len())]);
            }
            edges.extend(parents.into_iter().map(|p| (id, p)));
            nodes.push(GraphNode { id, level: l + 1, members: vec![id], conflict_gap: 0.0 });
            this.push(id);
        }
        prev = this;
    }
    InteractionGraph { ego, nodes, edges, clusters: Vec::new() }
}
