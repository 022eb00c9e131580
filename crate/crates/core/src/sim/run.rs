use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use super::{update_ledger, ArrivalLedger, SimConfig};
use crate::decision::{decide, Decision, DecisionInput, PolicyConfig, PolicyKind};
use crate::error::{AgentId, Result};
use crate::graph::{ConflictTable, Snapshot};
use crate::scenario::{Behavior, Scenario};
use crate::world::{advance_along_trajectory, detect_collision, wrap_angle, Action, AgentState, MotionContext, VehicleParams, V_STOP_EPS};

/// Spacing kept behind a conflict point while yielding, on top of both radii.
const YIELD_CLEARANCE: f64 = 1.0;
/// Lateral slack for treating another agent as being on one's path.
const PATH_WIDTH_SLACK: f64 = 0.3;
/// Gap kept behind an obstacle on the path, on top of both radii.
const FOLLOW_GAP: f64 = 0.5;
const LOOK_AHEAD: f64 = 40.0;
const LEADER_HEADING_TOL: f64 = std::f64::consts::FRAC_PI_4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub id: AgentId,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub action: Action,
    /// Level in the ego's latest interaction graph.
    pub level: Option<usize>,
    pub safety_overridden: bool,
}

/// Onset of an overlap between two agents; `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionEvent {
    pub t: f64,
    pub a: AgentId,
    pub b: AgentId,
}

impl CollisionEvent {
    pub fn involves(&self, id: AgentId) -> bool {
        self.a == id || self.b == id
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub ego_id: AgentId,
    pub dt_physics: f64,
    pub ticks: usize,
    /// One row per tick per agent: the state at `t` and the action applied
    /// from `t`.
    pub rows: Vec<TraceRow>,
    /// Every decision taken, stamped with its time.
    pub decisions: Vec<(f64, Decision)>,
    pub collisions: Vec<CollisionEvent>,
    /// `(t, id)` for each new stop-line arrival.
    pub arrivals: Vec<(f64, AgentId)>,
    pub ledger: ArrivalLedger,
    pub ego_exit_time: Option<f64>,
    #[serde(skip)]
    pub final_states: Vec<AgentState>,
}

impl Trace {
    pub const CSV_HEADER: &'static str = "t,id,x,y,phi,v,action,level,safety_overridden";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 48);
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let level = r.level.map(|l| l.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{:.3},{},{:.4},{:.4},{:.5},{:.4},{},{},{}",
                r.t, r.id, r.x, r.y, r.heading, r.speed, r.action, level, r.safety_overridden
            )
            .unwrap();
        }
        out
    }

    pub fn ego_decisions(&self) -> impl Iterator<Item = &(f64, Decision)> {
        self.decisions.iter().filter(|(_, d)| d.ego == self.ego_id)
    }
}

fn gone(state: &AgentState) -> bool {
    state.finished()
}

/// Yield and hard targets for agent `i` given everyone's current state.
pub fn motion_context(i: usize, states: &[AgentState], params: &[VehicleParams], table: &ConflictTable) -> MotionContext {
    let me = &states[i];
    let pi = &params[i];
    let mut ctx = MotionContext::default();
    let path = &me.route.path;
    for (j, other) in states.iter().enumerate() {
        if j == i || gone(other) {
            continue;
        }
        let pj = &params[j];
        let radii = pi.radius + pj.radius;
        if !other.has_exited(pj) {
            if let Some(c) = table.forward(i, j, me.s, other.s, radii) {
                if c.arc_i > me.s {
                    ctx.yield_targets.push((c.arc_i - radii - YIELD_CLEARANCE).max(me.s));
                }
            }
        }
        let (arc, dist) = path.project(other.position(), me.s, me.s + LOOK_AHEAD);
        if arc > me.s && dist < radii + PATH_WIDTH_SLACK {
            let heading_gap = wrap_angle(other.heading - path.heading_at(arc)).abs();
            if heading_gap < LEADER_HEADING_TOL || other.speed < V_STOP_EPS {
                ctx.hard_targets.push(arc - radii - FOLLOW_GAP);
            }
        }
    }
    ctx
}

fn policy_for(behavior: &Behavior, is_ego: bool, cfg: &PolicyConfig) -> Option<PolicyKind> {
    match behavior {
        Behavior::Scripted { .. } => None,
        Behavior::Policy { kind: Some(k) } => Some(*k),
        Behavior::Policy { kind: None } if is_ego => Some(cfg.policy),
        Behavior::Policy { kind: None } => Some(PolicyKind::Hierarchical),
    }
}

/// Closed-loop run. Policy agents all decide against the same snapshot
/// every decision period; everyone then moves simultaneously.
pub fn run(scenario: &Scenario, sim: &SimConfig, cfg: &PolicyConfig) -> Result<Trace> {
    scenario.validate()?;
    sim.validate()?;
    cfg.validate()?;
    let ego_id = scenario.ego_id;
    let ego = scenario.ego_index()?;
    let params = scenario.params();
    let table = scenario.conflict_table();
    let mut states = scenario.states();
    let policies: Vec<Option<PolicyConfig>> = scenario
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| policy_for(&a.behavior, i == ego, cfg).map(|p| PolicyConfig { policy: p, ..*cfg }))
        .collect();

    let dt = sim.dt_physics;
    let every = sim.decision_every();
    let ticks = sim.tick_count();
    let mut ledger = update_ledger(ArrivalLedger::from_states(&states), &states, &params, 0.0);
    for s in &mut states {
        s.arrival_time = ledger.arrival(s.id);
    }
    let mut actions = vec![Action::Yield; states.len()];
    let mut overridden = vec![false; states.len()];
    let mut levels: BTreeMap<AgentId, usize> = BTreeMap::new();
    let mut trace = Trace {
        ego_id,
        dt_physics: dt,
        ticks: 0,
        rows: Vec::new(),
        decisions: Vec::new(),
        collisions: Vec::new(),
        arrivals: Vec::new(),
        ledger: ArrivalLedger::default(),
        ego_exit_time: None,
        final_states: Vec::new(),
    };
    let mut touching: BTreeSet<(usize, usize)> = BTreeSet::new();

    for tick in 0..ticks {
        let t = tick as f64 * dt;
        if tick % every == 0 {
            let snap = Snapshot::new(&states, &params, &scenario.region, &table);
            for (i, p) in policies.iter().enumerate() {
                let Some(p) = p else { continue };
                if !snap.is_active(i) {
                    actions[i] = Action::Go;
                    overridden[i] = false;
                    continue;
                }
                let d = decide(&DecisionInput::new(snap, i), p)?;
                actions[i] = d.action;
                overridden[i] = d.safety_overridden;
                if i == ego {
                    levels = d.levels.iter().copied().collect();
                }
                trace.decisions.push((t, d));
            }
        }
        for (i, a) in scenario.agents.iter().enumerate() {
            if let Some(act) = a.behavior.scripted_action(t) {
                actions[i] = act;
            }
        }

        for (i, s) in states.iter().enumerate() {
            trace.rows.push(TraceRow {
                t,
                id: s.id,
                x: s.x,
                y: s.y,
                heading: s.heading,
                speed: s.speed,
                action: actions[i],
                level: levels.get(&s.id).copied(),
                safety_overridden: overridden[i],
            });
        }

        let next: Vec<AgentState> = (0..states.len())
            .map(|i| {
                if gone(&states[i]) {
                    return states[i].clone();
                }
                let ctx = motion_context(i, &states, &params, &table);
                advance_along_trajectory(&states[i], &params[i], actions[i], &ctx, dt)
            })
            .collect();
        states = next;
        trace.ticks = tick + 1;
        let t_next = (tick + 1) as f64 * dt;

        let before = ledger.clone();
        ledger = update_ledger(ledger, &states, &params, t_next);
        for s in &mut states {
            s.arrival_time = ledger.arrival(s.id);
            if before.arrival(s.id).is_none() && s.arrival_time.is_some() {
                trace.arrivals.push((t_next, s.id));
            }
        }

        let mut now = BTreeSet::new();
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                if gone(&states[i]) || gone(&states[j]) {
                    continue;
                }
                if detect_collision(&states[i], &states[j], &params[i], &params[j]) {
                    now.insert((i, j));
                    if !touching.contains(&(i, j)) {
                        let (a, b) = (states[i].id.min(states[j].id), states[i].id.max(states[j].id));
                        trace.collisions.push(CollisionEvent { t: t_next, a, b });
                    }
                }
            }
        }
        touching = now;

        if trace.ego_exit_time.is_none() && states[ego].has_exited(&params[ego]) {
            trace.ego_exit_time = Some(t_next);
        }
        if states.iter().zip(&params).all(|(s, p)| gone(s) || s.has_exited(p)) {
            break;
        }
    }
    trace.ledger = ledger;
    trace.final_states = states;
    Ok(trace)
}
