//! Built-in scenarios on a four-way, one-lane-per-approach stop
//! intersection, plus a few free-form layouts for graph inspection.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::{AgentSetup, Behavior, Scenario};
use crate::decision::PolicyConfig;
use crate::error::AgentId;
use crate::game::GameParams;
use crate::sim::SimConfig;
use crate::world::{Action, AgentKind, AgentState, Approach, IntersectionRegion, Point, Route, Trajectory, VehicleParams, STOP_BUFFER};

/// Lane centre offset from the road axis.
pub const LANE_OFFSET: f64 = 1.75;
pub const LANE_WIDTH: f64 = 3.5;
pub const BOX_HALF: f64 = 10.0;
/// Route length before the box edge.
pub const LEAD: f64 = 80.0;
/// Route length after the box edge.
pub const TAIL: f64 = 30.0;

/// The side an agent enters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    South,
    East,
    North,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::South, Side::East, Side::North, Side::West];

    fn quarter_turns(self) -> u32 {
        match self {
            Side::South => 0,
            Side::East => 1,
            Side::North => 2,
            Side::West => 3,
        }
    }

    /// Rotates a point given in the south-approach frame.
    pub fn rotate(self, p: Point) -> Point {
        (0..self.quarter_turns()).fold(p, |q, _| Point::new(-q.y, q.x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Turn {
    Straight,
    Left,
    Right,
}

impl Turn {
    pub const ALL: [Turn; 3] = [Turn::Straight, Turn::Left, Turn::Right];
}

/// Square box with a stop line on every incoming lane.
pub fn four_way_region(half: f64) -> IntersectionRegion {
    let approaches = Side::ALL
        .iter()
        .map(|side| Approach {
            stop_line: [side.rotate(Point::new(0.0, -half)), side.rotate(Point::new(LANE_WIDTH, -half))],
            exit_line: [side.rotate(Point::new(-LANE_WIDTH, -half)), side.rotate(Point::new(0.0, -half))],
        })
        .collect();
    IntersectionRegion::square(half, approaches).expect("valid square")
}

fn arc(center: Point, radius: f64, from: f64, to: f64, steps: usize) -> impl Iterator<Item = Point> {
    (1..=steps).map(move |k| {
        let a = from + (to - from) * k as f64 / steps as f64;
        Point::new(center.x + radius * a.cos(), center.y + radius * a.sin())
    })
}

/// Lane-following route through a four-way box.
pub fn lane_route(side: Side, turn: Turn, half: f64) -> Trajectory {
    let w = LANE_OFFSET;
    let mut pts = vec![Point::new(w, -half - LEAD), Point::new(w, -half)];
    match turn {
        Turn::Straight => pts.push(Point::new(w, half + TAIL)),
        Turn::Right => {
            pts.extend(arc(Point::new(half, -half), half - w, PI, FRAC_PI_2, 10));
            pts.push(Point::new(half + TAIL, -w));
        }
        Turn::Left => {
            pts.extend(arc(Point::new(-half, -half), half + w, 0.0, FRAC_PI_2, 14));
            pts.push(Point::new(-half - TAIL, w));
        }
    }
    Trajectory::new(pts.into_iter().map(|p| side.rotate(p)).collect()).expect("valid lane route")
}

/// An agent whose front is `gap` metres short of its stop line.
pub fn at_gap(id: AgentId, kind: AgentKind, route: Arc<Route>, gap: f64, speed: f64) -> AgentSetup {
    let params = VehicleParams::for_kind(kind);
    let stop = route.stop_arc.expect("route has a stop line");
    let state = AgentState::on_route(id, kind, route, stop - params.l_f - gap, speed);
    AgentSetup { state, params, behavior: Behavior::default() }
}

/// Agent standing still at its stop line, already stopped and arrived at
/// `arrival`.
pub fn waiting(id: AgentId, route: Arc<Route>, arrival: f64) -> AgentSetup {
    let mut a = at_gap(id, AgentKind::Vehicle, route, STOP_BUFFER, 0.0);
    a.state.has_stopped = true;
    a.state.arrival_time = Some(arrival);
    a
}

/// Agent on an explicit polyline, starting at its first waypoint.
pub fn on_path(id: AgentId, kind: AgentKind, region: &IntersectionRegion, pts: &[(f64, f64)], speed: f64) -> AgentSetup {
    let path = Trajectory::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).expect("valid path");
    let route = Arc::new(Route::new(path, region));
    AgentSetup {
        state: AgentState::on_route(id, kind, route, 0.0, speed),
        params: VehicleParams::for_kind(kind),
        behavior: Behavior::default(),
    }
}

fn scripted(mut a: AgentSetup, actions: Vec<(f64, Action)>) -> AgentSetup {
    a.behavior = Behavior::Scripted { actions };
    a
}

fn scenario(name: &str, region: IntersectionRegion, agents: Vec<AgentSetup>, policy: PolicyConfig) -> Scenario {
    Scenario { name: name.into(), region, agents, ego_id: 1, policy, sim: SimConfig::default() }
}

fn route(region: &IntersectionRegion, side: Side, turn: Turn) -> Arc<Route> {
    Arc::new(Route::new(lane_route(side, turn, BOX_HALF), region))
}

/// Two-vehicle scene: the ego pulls away from its stop line with priority
/// while a vehicle from the west runs its stop sign. `beta = 0` weighs the
/// rule term only. The safety check is off so the payoff alone decides.
pub fn stop_runner(beta: f64) -> Scenario {
    let region = four_way_region(BOX_HALF);
    let mut ego = at_gap(1, AgentKind::Vehicle, route(&region, Side::South, Turn::Straight), -0.6, 2.0);
    ego.state.has_stopped = true;
    ego.state.arrival_time = Some(0.0);
    let r2 = route(&region, Side::West, Turn::Straight);
    // Centre 16 m short of the crossing with the ego's lane at 8 m/s.
    let violator = AgentState::on_route(2, AgentKind::Vehicle, r2.clone(), LEAD + BOX_HALF + LANE_OFFSET - 16.0, 8.0);
    let violator = AgentSetup { state: violator, params: VehicleParams::for_kind(AgentKind::Vehicle), behavior: Behavior::default() };
    let policy = PolicyConfig { game: GameParams { beta, ..Default::default() }, safety_check: false, ..Default::default() };
    let mut s = scenario(if beta == 0.0 { "stop-runner-rule-only" } else { "stop-runner" }, region, vec![ego, scripted(violator, vec![(0.0, Action::Go)])], policy);
    s.sim.horizon = 20.0;
    s
}

/// Three stopped vehicles forming the chain ego <- 2 <- 3. With
/// `vehicle3_first` vehicle 3 arrived first and has priority over 2;
/// otherwise 2 arrived first.
pub fn chain(vehicle3_first: bool) -> Scenario {
    let region = four_way_region(BOX_HALF);
    let (t2, t3) = if vehicle3_first { (1.0, 0.0) } else { (0.0, 1.0) };
    let agents = vec![
        waiting(1, route(&region, Side::South, Turn::Straight), 2.0),
        waiting(2, route(&region, Side::West, Turn::Straight), t2),
        waiting(3, route(&region, Side::North, Turn::Straight), t3),
    ];
    let name = if vehicle3_first { "chain-v3-first" } else { "chain-v2-first" };
    let mut s = scenario(name, region, agents, PolicyConfig::default());
    s.sim.horizon = 40.0;
    s
}

/// Vehicle 2 arrived before the ego but is held by a pedestrian walking
/// across its lane; the pedestrian does not cross the ego's path.
pub fn pedestrian_chain() -> Scenario {
    let region = four_way_region(BOX_HALF);
    let mut ped = on_path(3, AgentKind::Pedestrian, &region, &[(-7.5, -12.0), (-7.5, 12.0)], 1.4);
    ped.state.s = 8.0;
    let p = ped.state.route.path.point_at(8.0);
    ped.state.x = p.x;
    ped.state.y = p.y;
    ped.state.arrival_time = Some(0.0);
    let agents = vec![
        waiting(1, route(&region, Side::South, Turn::Straight), 2.0),
        waiting(2, route(&region, Side::West, Turn::Straight), 1.0),
        ped,
    ];
    let mut s = scenario("pedestrian-chain", region, agents, PolicyConfig::default());
    s.sim.horizon = 40.0;
    s
}

/// The ego has priority and sets off; a vehicle stopped at the west line
/// floors it at the same instant.
pub fn abrupt_change() -> Scenario {
    let region = four_way_region(BOX_HALF);
    let agents = vec![
        waiting(1, route(&region, Side::South, Turn::Straight), 0.0),
        scripted(waiting(2, route(&region, Side::West, Turn::Straight), 1.0), vec![(0.0, Action::Go)]),
    ];
    let mut s = scenario("abrupt-change", region, agents, PolicyConfig::default());
    s.sim.horizon = 30.0;
    s
}

/// Six agents whose graph has levels {2, 3}, {4, 5}, {6}.
pub fn layered() -> Scenario {
    let region = IntersectionRegion::square(BOX_HALF, vec![]).expect("square");
    let v = AgentKind::Vehicle;
    let agents = vec![
        on_path(1, v, &region, &[(2.0, -30.0), (2.0, 30.0)], 5.0),
        on_path(2, AgentKind::Pedestrian, &region, &[(-1.0, 8.0), (12.0, 8.0)], 1.4),
        on_path(3, v, &region, &[(30.0, 4.0), (-30.0, 4.0)], 5.0),
        on_path(4, v, &region, &[(-4.0, 30.0), (-4.0, -30.0)], 5.0),
        on_path(5, v, &region, &[(-7.0, -30.0), (-7.0, 30.0)], 5.0),
        on_path(6, v, &region, &[(-30.0, -6.0), (-2.0, -6.0), (-2.0, -30.0)], 5.0),
    ];
    scenario("layered", region, agents, PolicyConfig::default())
}

/// Graph whose branches merge into sub-games {1,2,5} and {1,3,4,6}.
pub fn merging_branches() -> Scenario {
    let region = IntersectionRegion::square(BOX_HALF, vec![]).expect("square");
    let v = AgentKind::Vehicle;
    let agents = vec![
        on_path(1, v, &region, &[(0.0, -30.0), (0.0, 30.0)], 5.0),
        on_path(2, v, &region, &[(-30.0, -5.0), (30.0, -5.0)], 5.0),
        on_path(3, v, &region, &[(30.0, 0.0), (-30.0, 0.0)], 5.0),
        on_path(4, v, &region, &[(20.0, 14.0), (-20.0, 2.0)], 5.0),
        on_path(5, v, &region, &[(-6.0, -30.0), (-6.0, -2.0), (-30.0, -2.0)], 5.0),
        on_path(6, v, &region, &[(6.0, 30.0), (6.0, -2.0), (30.0, -2.0)], 5.0),
    ];
    scenario("merging-branches", region, agents, PolicyConfig::default())
}

fn queue(region: &IntersectionRegion, side: Side, turn: Turn, first_id: AgentId, n: usize, arrival: f64) -> Vec<AgentSetup> {
    let r = route(region, side, turn);
    (0..n)
        .map(|k| {
            let id = first_id + k as AgentId;
            if k == 0 {
                waiting(id, r.clone(), arrival)
            } else {
                let mut a = at_gap(id, AgentKind::Vehicle, r.clone(), STOP_BUFFER + 8.0 * k as f64, 0.0);
                a.state.has_stopped = false;
                a
            }
        })
        .collect()
}

fn crosswalk(region: &IntersectionRegion, first_id: AgentId, n: usize) -> Vec<AgentSetup> {
    (0..n)
        .map(|k| {
            let x0 = -12.0 - 1.5 * k as f64;
            let mut p = on_path(first_id + k as AgentId, AgentKind::Pedestrian, region, &[(x0, 8.0), (14.0, 8.0)], 1.4);
            p.state.arrival_time = Some(0.0);
            p
        })
        .collect()
}

/// Busy intersection: queues of five on three approaches, six pedestrians
/// on the north crosswalk and four vehicles queued behind the ego.
pub fn dense26() -> Scenario {
    let region = four_way_region(BOX_HALF);
    let mut agents = queue(&region, Side::South, Turn::Straight, 1, 5, 3.0);
    agents.extend(queue(&region, Side::East, Turn::Straight, 6, 5, 0.0));
    agents.extend(queue(&region, Side::West, Turn::Straight, 11, 5, 1.0));
    agents.extend(queue(&region, Side::North, Turn::Straight, 16, 5, 2.0));
    agents.extend(crosswalk(&region, 21, 6));
    let mut s = scenario("dense26", region, agents, PolicyConfig::default());
    s.sim.horizon = 30.0;
    s
}

/// Ten agents: queues on three approaches and two pedestrians.
pub fn dense10() -> Scenario {
    let region = four_way_region(BOX_HALF);
    let mut agents = queue(&region, Side::South, Turn::Left, 1, 2, 1.5);
    agents.extend(queue(&region, Side::East, Turn::Straight, 3, 3, 0.0));
    agents.extend(queue(&region, Side::West, Turn::Right, 6, 2, 1.0));
    agents.extend(queue(&region, Side::North, Turn::Straight, 8, 1, 2.0));
    agents.extend(crosswalk(&region, 9, 2));
    let mut s = scenario("dense10", region, agents, PolicyConfig::default());
    s.sim.horizon = 40.0;
    s
}

/// Every built-in scenario by name.
pub fn all() -> Vec<Scenario> {
    vec![stop_runner(0.0), stop_runner(0.5), chain(false), chain(true), pedestrian_chain(), abrupt_change(), layered(), merging_branches(), dense10(), dense26()]
}
