//! Seeded invariant checks. Each returns `Err(description)` on the first
//! violation; the property tests feed them proptest seeds and the
//! acceptance suite runs them over fixed seed ranges.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use hgame::decision::{action_filter, decide, plan, safety_check, DecisionInput, PolicyConfig, PolicyKind};
use hgame::game::{build_payoffs, pure_nash, ActionProfile, Arrivals, GameGeometry, GameParams, GameStructure, NormalFormGame};
use hgame::graph::{
    all_crossings, build_interaction_graph, cluster_agents, decompose, extract_branches, trajectories_conflict,
    GraphOptions, DEFAULT_HEADING_TOL,
};
use hgame::sim::{generate_random_scenario, run, update_ledger, ArrivalLedger, RegionTemplate, SimConfig};
use hgame::world::{
    advance_along_trajectory, step_bicycle, Action, AgentKind, AgentState, IntersectionRegion, MotionContext, Point,
    Route, Trajectory, VehicleParams, V_STOP_EPS,
};
use hgame::AgentId;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{brute_force_equilibria, direct_payoff, hop_distances, random_graph, table_payoff, World};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn straight_route(region: &IntersectionRegion) -> Arc<Route> {
    let path = Trajectory::new(vec![Point::new(0.0, -60.0), Point::new(0.0, 60.0)]).unwrap();
    Arc::new(Route::new(path, region))
}

fn open_region() -> IntersectionRegion {
    IntersectionRegion::square(10.0, vec![]).unwrap()
}

// ---- world -------------------------------------------------------------

/// Pose after one second of piecewise-constant controls.
fn integrate(start: &AgentState, p: &VehicleParams, controls: &[(f64, f64)], dt: f64) -> [f64; 4] {
    let per = (1.0 / controls.len() as f64 / dt).round() as usize;
    let mut s = start.clone();
    for &(a, d) in controls {
        for _ in 0..per {
            s = step_bicycle(&s, p, a, d, dt).unwrap();
        }
    }
    [s.x, s.y, s.heading, s.speed]
}

fn pose_gap(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Halving dt roughly halves the one-second pose error.
pub fn integrator_convergence(seed: u64) -> Check {
    let mut r = rng(seed);
    let p = VehicleParams::for_kind(AgentKind::Vehicle);
    let region = open_region();
    let mut start = AgentState::on_route(1, AgentKind::Vehicle, straight_route(&region), 10.0, r.gen_range(2.0..8.0));
    start.heading = r.gen_range(-3.0..3.0);
    let controls: Vec<(f64, f64)> =
        (0..5).map(|_| (r.gen_range(-1.5..2.0), r.gen_range(-0.9..0.9) * p.steer_max)).collect();
    let coarse = integrate(&start, &p, &controls, 0.02);
    let mid = integrate(&start, &p, &controls, 0.01);
    let fine = integrate(&start, &p, &controls, 0.005);
    let (e1, e2) = (pose_gap(coarse, mid), pose_gap(mid, fine));
    if e2 < 1e-10 {
        ensure!(e1 < 1e-8, "seed {seed}: fine steps agree but coarse differs by {e1}");
        return Ok(());
    }
    let ratio = e1 / e2;
    ensure!((1.6..=2.5).contains(&ratio), "seed {seed}: error ratio {ratio:.3} (e1 {e1:.3e}, e2 {e2:.3e})");
    ensure!(e1 < 0.5, "seed {seed}: coarse error {e1} too large");
    Ok(())
}

/// Yielding from a state that can still brake in time stops short of the
/// target.
pub fn yield_stops_before_target(seed: u64) -> Check {
    let mut r = rng(seed);
    let p = VehicleParams::for_kind(AgentKind::Vehicle);
    let region = open_region();
    let dt = 0.01;
    let v = r.gen_range(0.5..=p.v_target);
    let need = v * v / (2.0 * -p.a_min) + dt * v;
    let target = 5.0 + need + r.gen_range(0.0..30.0);
    let mut s = AgentState::on_route(1, AgentKind::Vehicle, straight_route(&region), 5.0, v);
    let ctx = MotionContext { yield_targets: vec![target], hard_targets: vec![] };
    for _ in 0..5000 {
        if s.speed <= V_STOP_EPS {
            ensure!(s.s < target, "seed {seed}: stopped at {} with target {target}", s.s);
            return Ok(());
        }
        s = advance_along_trajectory(&s, &p, Action::Yield, &ctx, dt);
        ensure!(s.s < target, "seed {seed}: reached target {target} at speed {}", s.speed);
    }
    Err(format!("seed {seed}: never stopped (v {v}, target {target})"))
}

/// Arc position never decreases under random actions and obstacles.
pub fn arc_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let p = VehicleParams::for_kind(AgentKind::Vehicle);
    let region = open_region();
    let mut s = AgentState::on_route(1, AgentKind::Vehicle, straight_route(&region), r.gen_range(0.0..50.0), r.gen_range(0.0..8.0));
    for _ in 0..2000 {
        let ctx = MotionContext {
            yield_targets: if r.gen_bool(0.5) { vec![s.s + r.gen_range(-5.0..30.0)] } else { vec![] },
            hard_targets: if r.gen_bool(0.2) { vec![s.s + r.gen_range(-2.0..20.0)] } else { vec![] },
        };
        let action = if r.gen_bool(0.5) { Action::Go } else { Action::Yield };
        let next = advance_along_trajectory(&s, &p, action, &ctx, 0.01);
        ensure!(next.s >= s.s, "seed {seed}: arc went back from {} to {}", s.s, next.s);
        ensure!(next.s <= s.route.path.length() + 1e-9, "seed {seed}: arc past route end");
        s = next;
    }
    Ok(())
}

// ---- graph -------------------------------------------------------------

fn random_polyline(r: &mut ChaCha8Rng, points: usize) -> Trajectory {
    let pts = (0..points).map(|_| Point::new(r.gen_range(-25.0..25.0), r.gen_range(-25.0..25.0))).collect();
    Trajectory::new(pts).unwrap()
}

/// Conflict existence is symmetric; on straight paths (at most one
/// crossing) the points coincide.
pub fn conflict_symmetry(seed: u64) -> Check {
    let mut r = rng(seed);
    let region = IntersectionRegion::square(15.0, vec![]).unwrap();
    for points in [2, 2, 3, 4] {
        let a = random_polyline(&mut r, points);
        let b = random_polyline(&mut r, points);
        let ab = trajectories_conflict(&a, &b, &region);
        let ba = trajectories_conflict(&b, &a, &region);
        ensure!(ab.is_some() == ba.is_some(), "seed {seed}: one-sided conflict {ab:?} vs {ba:?}");
        let (all_ab, all_ba) = (all_crossings(&a, &b, &region), all_crossings(&b, &a, &region));
        ensure!(all_ab.len() == all_ba.len(), "seed {seed}: crossing counts differ");
        if let (Some(x), Some(y)) = (ab, ba) {
            if all_ab.len() == 1 {
                ensure!(x.point.distance(y.point) <= 1e-9, "seed {seed}: points differ {:?} {:?}", x.point, y.point);
                ensure!((x.arc_i - y.arc_j).abs() <= 1e-9 && (x.arc_j - y.arc_i).abs() <= 1e-9, "seed {seed}: arcs not swapped");
            }
        }
    }
    Ok(())
}

/// Without clustering every node sits at its shortest conflict-chain
/// distance from the ego, and the graph covers exactly the reachable set.
pub fn level_minimality(seed: u64) -> Check {
    let n = 2 + (seed % 9) as usize;
    let world = World::random_lines(seed, n);
    let snap = world.snapshot();
    let graph = build_interaction_graph(&snap, 0, GraphOptions { cluster: false, heading_tol: DEFAULT_HEADING_TOL });
    let oracle = hop_distances(&snap, 0);
    let levels: BTreeMap<AgentId, usize> = graph.nodes.iter().map(|n| (n.id, n.level)).collect();
    ensure!(levels == oracle, "seed {seed}: levels {levels:?} vs shortest paths {oracle:?}");
    Ok(())
}

/// Clusters are disjoint and cover every candidate.
pub fn clustering_partition(seed: u64) -> Check {
    let n = 3 + (seed % 10) as usize;
    let s = generate_random_scenario(seed, n, RegionTemplate::default());
    let world = World::from_scenario(&s);
    let snap = world.snapshot();
    let ego = s.ego_index().unwrap();
    let candidates: Vec<usize> = (0..snap.len()).filter(|&i| i != ego && snap.is_active(i)).collect();
    let clusters = cluster_agents(&snap, &candidates, DEFAULT_HEADING_TOL);
    let mut seen = BTreeSet::new();
    for c in &clusters {
        ensure!(c.members.contains(&c.representative), "seed {seed}: representative outside its cluster");
        for &m in &c.members {
            ensure!(seen.insert(m), "seed {seed}: agent {m} in two clusters");
        }
    }
    let want: BTreeSet<AgentId> = candidates.iter().map(|&i| snap.id(i)).collect();
    ensure!(seen == want, "seed {seed}: clusters cover {seen:?}, candidates {want:?}");
    Ok(())
}

/// Branch count, decomposition soundness and the cost bound on a random
/// layered graph.
pub fn branch_properties(seed: u64) -> Check {
    let mut r = rng(seed);
    let sizes = [r.gen_range(1..=4), r.gen_range(0..=4), r.gen_range(0..=3)];
    let graph = random_graph(&mut r, &sizes);
    let branches = extract_branches(&graph, graph.depth());
    ensure!(branches.len() == sizes[0], "seed {seed}: {} branches for {} level-1 nodes", branches.len(), sizes[0]);
    let groups = decompose(&branches, graph.ego);
    let union: BTreeSet<AgentId> = groups.iter().flatten().copied().collect();
    let all: BTreeSet<AgentId> = graph.nodes.iter().map(|n| n.id).collect();
    ensure!(union == all || (groups.is_empty() && all.len() == 1), "seed {seed}: groups {groups:?} miss nodes of {all:?}");
    for a in &branches {
        for b in &branches {
            if a.members.iter().any(|m| b.members.contains(m)) {
                let together = groups.iter().any(|g| g.contains(&a.root) && g.contains(&b.root));
                ensure!(together, "seed {seed}: roots {} and {} share a node but were split", a.root, b.root);
            }
        }
    }
    if groups.len() >= 2 {
        let cost: u64 = groups.iter().map(|g| 1u64 << g.len()).sum();
        ensure!(cost <= 1u64 << all.len(), "seed {seed}: cost {cost} above 2^{}", all.len());
    }
    Ok(())
}

// ---- game --------------------------------------------------------------

fn random_table(r: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let ints = r.gen_bool(0.5);
    (0..(1usize << n) * n)
        .map(|_| if ints { f64::from(r.gen_range(-3i32..=3)) } else { r.gen_range(-10.0..10.0) })
        .collect()
}

fn equilibria_of(game: &NormalFormGame) -> BTreeSet<Vec<Action>> {
    pure_nash(game).unwrap().equilibria.into_iter().map(|p| p.0).collect()
}

/// pure_nash returns exactly the profiles that survive every unilateral
/// deviation.
pub fn nash_certified(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(2..=4);
    let table = random_table(&mut r, n);
    let game = NormalFormGame::from_table(n, table.clone());
    let got = equilibria_of(&game);
    let want = brute_force_equilibria(n, |a, p| table_payoff(&table, n, a, p));
    ensure!(got == want, "seed {seed}: solver {got:?} vs oracle {want:?}");
    Ok(())
}

/// A positive affine map of one player's payoffs keeps the equilibrium set.
pub fn affine_invariance(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(2..=4);
    let mut table: Vec<f64> = (0..(1usize << n) * n).map(|_| f64::from(r.gen_range(-4i32..=4))).collect();
    let before = equilibria_of(&NormalFormGame::from_table(n, table.clone()));
    let who = r.gen_range(0..n);
    let a = [0.5, 1.0, 2.0, 3.0, 8.0][r.gen_range(0..5)];
    let b = f64::from(r.gen_range(-20i32..=20));
    for idx in 0..(1usize << n) {
        let v = &mut table[idx * n + who];
        *v = a * *v + b;
    }
    let after = equilibria_of(&NormalFormGame::from_table(n, table));
    ensure!(before == after, "seed {seed}: x -> {a}x + {b} on player {who} changed {before:?} to {after:?}");
    Ok(())
}

fn random_params(r: &mut ChaCha8Rng) -> GameParams {
    GameParams {
        beta: r.gen_range(0.0..=1.0),
        theta1: r.gen_range(0.1..3.0),
        theta2: r.gen_range(0.1..3.0),
        theta3: r.gen_range(0.1..3.0),
        theta4: r.gen_range(0.1..3.0),
        reward: r.gen_range(0.1..10.0),
    }
}

/// Ego-first star: the ego conflicts with players 1..n, player k also with
/// player k+1 (when present).
fn chain_structure(n: usize) -> GameStructure {
    let mut first_level = vec![(1..n).collect::<Vec<_>>()];
    for k in 1..n {
        let mut fl = vec![0];
        if k + 1 < n {
            fl.push(k + 1);
        }
        if k > 1 {
            fl.push(k - 1);
        }
        fl.sort_unstable();
        first_level.push(fl);
    }
    GameStructure { players: (1..=n as AgentId).collect(), first_level }
}

fn random_geometry(r: &mut ChaCha8Rng, s: &GameStructure) -> GameGeometry {
    let mut g = GameGeometry::default();
    for (a, fl) in s.first_level.iter().enumerate() {
        g.tosc.insert(s.players[a], r.gen_range(0.5..8.0));
        for &b in fl {
            g.ttc.insert((s.players[b], s.players[a]), r.gen_range(0.0..12.0));
        }
    }
    g
}

fn random_arrivals(r: &mut ChaCha8Rng, s: &GameStructure) -> Arrivals {
    Arrivals::new(s.players.iter().map(|&p| (p, r.gen_bool(0.8).then(|| f64::from(r.gen_range(0..4u8))))))
}

/// Payoffs exist and are finite for every profile and player, on games
/// built from random snapshots.
pub fn table_complete(seed: u64) -> Check {
    let n = 2 + (seed % 6) as usize;
    let world = World::random_lines(seed, n);
    let snap = world.snapshot();
    let cfg = PolicyConfig { cluster: false, n_max: n, ..PolicyConfig::default() };
    let p = plan(&DecisionInput::new(snap, 0), &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    for g in &p.games {
        let n = g.player_count();
        for idx in 0..g.profile_count() {
            for pl in 0..n {
                ensure!(g.payoff_at(idx, pl).is_finite(), "seed {seed}: non-finite payoff");
            }
        }
    }
    Ok(())
}

/// Raising one T^c toward the ego never lowers the ego's Go payoff.
pub fn go_payoff_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = r.gen_range(2..=5);
    let s = chain_structure(n);
    let params = random_params(&mut r);
    let geom = random_geometry(&mut r, &s);
    let arrivals = random_arrivals(&mut r, &s);
    let k = r.gen_range(1..n);
    let mut raised = geom.clone();
    *raised.ttc.get_mut(&(s.players[k], s.players[0])).unwrap() += r.gen_range(0.01..5.0);
    let before = build_payoffs(s.clone(), &geom, &arrivals, &params).unwrap();
    let after = build_payoffs(s, &raised, &arrivals, &params).unwrap();
    for idx in 0..before.profile_count() {
        if ActionProfile::from_index(idx, n).action(0) == Action::Go {
            let (b, a) = (before.payoff_at(idx, 0), after.payoff_at(idx, 0));
            ensure!(a >= b, "seed {seed}: Go payoff fell from {b} to {a}");
        }
    }
    Ok(())
}

/// A neighbour of the ego's conflict partner switching to Go adds exactly
/// beta * theta3 * R to the ego's Go payoff.
pub fn reward_consistency(seed: u64) -> Check {
    let mut r = rng(seed);
    let s = GameStructure { players: vec![1, 2, 3], first_level: vec![vec![1], vec![0, 2], vec![1]] };
    let params = random_params(&mut r);
    let geom = random_geometry(&mut r, &s);
    let arrivals = random_arrivals(&mut r, &s);
    let game = build_payoffs(s, &geom, &arrivals, &params).unwrap();
    for k_action in [Action::Go, Action::Yield] {
        let quiet = ActionProfile(vec![Action::Go, k_action, Action::Yield]);
        let pushed = quiet.with(2, Action::Go);
        let delta = game.payoff(&pushed, 0) - game.payoff(&quiet, 0);
        let want = params.beta * params.theta3 * params.reward;
        ensure!((delta - want).abs() <= 1e-9 * (1.0 + want.abs()), "seed {seed}: delta {delta} vs {want}");
    }
    Ok(())
}

// ---- decision ----------------------------------------------------------

fn profile_by_id(players: &[AgentId], actions: &[Action]) -> BTreeMap<AgentId, Action> {
    players.iter().copied().zip(actions.iter().copied()).collect()
}

/// With clustering off and room for everyone, the hierarchical game spans
/// the whole conflict-connected component and has the full game's
/// equilibria.
pub fn global_nash_equivalence(world: &World, label: &str) -> Check {
    let snap = world.snapshot();
    let ego = 0;
    let cfg = PolicyConfig { cluster: false, n_max: snap.len().max(2), policy: PolicyKind::Hierarchical, ..PolicyConfig::default() };
    let p = plan(&DecisionInput::new(snap, ego), &cfg).map_err(|e| format!("{label}: {e}"))?;
    let reach: BTreeSet<AgentId> = hop_distances(&snap, ego).into_keys().collect();
    if reach.len() == 1 {
        ensure!(p.games.is_empty(), "{label}: lone ego played a game");
        return Ok(());
    }
    ensure!(p.games.len() == 1, "{label}: {} games", p.games.len());
    let players = &p.games[0].structure.players;
    let got_players: BTreeSet<AgentId> = players.iter().copied().collect();
    ensure!(got_players == reach, "{label}: players {got_players:?} vs component {reach:?}");
    let got: BTreeSet<_> = p.results[0].equilibria.iter().map(|e| profile_by_id(players, &e.0)).collect();
    let want: BTreeSet<_> = brute_force_equilibria(players.len(), |a, pl| direct_payoff(&snap, players, &cfg.game, a, pl))
        .into_iter()
        .map(|a| profile_by_id(players, &a))
        .collect();
    ensure!(got == want, "{label}: equilibria {got:?} vs full game {want:?}");
    Ok(())
}

pub fn global_nash_equivalence_lines(seed: u64) -> Check {
    let n = 2 + (seed % 5) as usize;
    global_nash_equivalence(&World::random_lines(seed, n), &format!("seed {seed}"))
}

/// Every level-1 representative plays whenever at least one level is kept.
pub fn level_one_kept(seed: u64) -> Check {
    let n = 2 + (seed % 9) as usize;
    let world = World::random_lines(seed, n);
    let snap = world.snapshot();
    let n_max = 2 + (seed / 9 % 6) as usize;
    let cfg = PolicyConfig { n_max, ..PolicyConfig::default() };
    let p = plan(&DecisionInput::new(snap, 0), &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    if p.k >= 1 {
        let players: BTreeSet<AgentId> = p.games.iter().flat_map(|g| g.structure.players.iter().copied()).collect();
        for id in p.graph.level_members(1) {
            ensure!(players.contains(&id), "seed {seed}: level-1 node {id} dropped at k={}", p.k);
        }
    }
    Ok(())
}

/// The safety check vetoes Go exactly when some moving agent in direct
/// conflict with the ego arrives inside the ego's crossing window plus the
/// margin, whether or not it made it into a game.
pub fn safety_covers_level_one(seed: u64) -> Check {
    let n = 2 + (seed % 9) as usize;
    let world = World::random_lines(seed, n);
    let snap = world.snapshot();
    let margin = 0.5;
    let window = snap.tosc(0) + margin;
    let threat = (1..snap.len()).any(|j| {
        snap.is_active(j) && snap.agents[j].is_moving() && snap.ttc_between(j, 0).is_some_and(|t| t < window)
    });
    let (action, vetoed) = safety_check(Action::Go, &DecisionInput::new(snap, 0), margin);
    ensure!(vetoed == threat, "seed {seed}: vetoed {vetoed}, threat {threat}");
    ensure!((action == Action::Yield) == threat, "seed {seed}: action {action}");
    Ok(())
}

/// The improved policy goes only if every sub-game's selected profile has
/// the ego going.
pub fn improved_conjunction(seed: u64) -> Check {
    let n = 2 + (seed % 9) as usize;
    let world = World::random_lines(seed, n);
    let snap = world.snapshot();
    let cfg = PolicyConfig { policy: PolicyKind::Improved, ..PolicyConfig::default() };
    let input = DecisionInput::new(snap, 0);
    let p = plan(&input, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    let all_go = p.results.iter().all(|r| r.selected.as_ref().is_some_and(|s| s.action(0) == Action::Go));
    let want = if all_go { Action::Go } else { Action::Yield };
    ensure!(p.ego_action() == want, "seed {seed}: merged {} vs conjunction {want}", p.ego_action());
    let d = decide(&input, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    ensure!(want == Action::Go || d.action == Action::Yield, "seed {seed}: decision went against a sub-game");
    Ok(())
}

/// The final action is always allowed by the rule filter, and repeated
/// decisions agree.
pub fn filter_and_determinism(seed: u64) -> Check {
    let n = 2 + (seed % 9) as usize;
    let world = World::random_lines(seed, n);
    let policy = PolicyKind::ALL[(seed / 9 % 4) as usize];
    let cfg = PolicyConfig { policy, ..PolicyConfig::default() };
    let input = DecisionInput::new(world.snapshot(), 0);
    let mut a = decide(&input, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    let mut b = decide(&input, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
    ensure!(action_filter(&input).contains(&a.action), "seed {seed}: {policy} chose a filtered action");
    a.latency = 0.0;
    b.latency = 0.0;
    ensure!(a == b, "seed {seed}: {policy} decisions differ");
    Ok(())
}

// ---- sim ---------------------------------------------------------------

fn short_sim(horizon: f64) -> SimConfig {
    SimConfig { horizon, ..SimConfig::default() }
}

/// Listing the agents in another order changes no decision.
pub fn simultaneous_decisions(seed: u64) -> Check {
    let n = 3 + (seed % 5) as usize;
    let s = generate_random_scenario(seed, n, RegionTemplate::default());
    let mut flipped = s.clone();
    flipped.agents.reverse();
    let cfg = s.policy;
    let sim = short_sim(4.0);
    let a = run(&s, &sim, &cfg).map_err(|e| e.to_string())?;
    let b = run(&flipped, &sim, &cfg).map_err(|e| e.to_string())?;
    let key = |t: &hgame::sim::Trace| -> BTreeMap<(u64, AgentId), Action> {
        t.decisions.iter().map(|(time, d)| (((time * 1e3).round() as u64, d.ego), d.action)).collect()
    };
    ensure!(key(&a) == key(&b), "seed {seed}: decisions depend on agent order");
    Ok(())
}

/// Stamps are set once and never move, so the arrival order between any
/// two stamped agents is fixed.
pub fn ledger_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let n = 3 + (seed % 8) as usize;
    let s = generate_random_scenario(seed, n, RegionTemplate::default());
    let params = s.params();
    let mut states = s.states();
    let mut ledger = ArrivalLedger::from_states(&states);
    let mut seen: BTreeMap<AgentId, f64> = BTreeMap::new();
    for step in 0..400 {
        let t = step as f64 * 0.1;
        for st in &mut states {
            let ds = r.gen_range(0.0..0.8);
            let moved = AgentState::on_route(st.id, st.kind, st.route.clone(), st.s + ds, st.speed);
            *st = AgentState { arrival_time: st.arrival_time, has_stopped: st.has_stopped, ..moved };
        }
        ledger = update_ledger(ledger, &states, &params, t);
        for (&id, &stamp) in &ledger.stamps {
            match (seen.get(&id), stamp) {
                (Some(&old), Some(now)) => ensure!(old == now, "seed {seed}: stamp of {id} moved {old} -> {now}"),
                (Some(_), None) => return Err(format!("seed {seed}: stamp of {id} erased")),
                (None, Some(now)) => {
                    seen.insert(id, now);
                }
                (None, None) => {}
            }
        }
    }
    // The closed-loop runner records each arrival once.
    let trace = run(&s, &short_sim(8.0), &s.policy).map_err(|e| e.to_string())?;
    let mut ids = BTreeSet::new();
    for &(t, id) in &trace.arrivals {
        ensure!(ids.insert(id), "seed {seed}: agent {id} stamped twice");
        ensure!(trace.ledger.arrival(id) == Some(t), "seed {seed}: ledger disagrees with event for {id}");
    }
    Ok(())
}
