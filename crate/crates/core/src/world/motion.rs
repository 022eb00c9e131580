use serde::{Deserialize, Serialize};

use super::{AgentState, VehicleParams, STOP_BUFFER, V_STOP_EPS};
use crate::error::{Error, Result};

/// Discrete decision available to every agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    Go,
    Yield,
}

impl Action {
    pub fn flipped(self) -> Action {
        match self {
            Action::Go => Action::Yield,
            Action::Yield => Action::Go,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Action::Go => 'G',
            Action::Yield => 'Y',
        }
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Action::Go => "go",
            Action::Yield => "yield",
        })
    }
}

/// Arc positions (of the agent's centre, along its own route) it must not
/// pass.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MotionContext {
    /// Conflict points with other agents, already offset by the clearance.
    /// Honoured only while yielding.
    pub yield_targets: Vec<f64>,
    /// Obstacles on the path (queued leaders, stopped blockers), honoured
    /// under any action.
    pub hard_targets: Vec<f64>,
}

/// One explicit-Euler step of the kinematic bicycle model.
pub fn step_bicycle(
    state: &AgentState,
    params: &VehicleParams,
    accel: f64,
    steer: f64,
    dt: f64,
) -> Result<AgentState> {
    let inputs = [state.x, state.y, state.heading, state.speed, accel, steer, dt];
    if inputs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("step_bicycle"));
    }
    if dt <= 0.0 {
        return Err(Error::InvalidParameter { name: "dt", reason: "must be positive".into() });
    }
    if steer.abs() > params.steer_max {
        return Err(Error::InvalidParameter {
            name: "steer",
            reason: format!("|{steer}| exceeds steering limit {}", params.steer_max),
        });
    }
    let slip = (params.l_r / (params.l_r + params.l_f) * steer.tan()).atan();
    let v = state.speed;
    let mut next = state.clone();
    next.x += v * (state.heading + slip).cos() * dt;
    next.y += v * (state.heading + slip).sin() * dt;
    next.heading += v / params.l_r * slip.sin() * dt;
    next.speed = (v + accel * dt).max(0.0);
    next.s += v * dt;
    Ok(next)
}

/// Would the state after applying `accel` for one step still be able to
/// stop within `gap` under full braking?
fn can_still_stop(gap: f64, v: f64, accel: f64, brake: f64, dt: f64) -> bool {
    let v1 = (v + accel * dt).max(0.0);
    let gap1 = gap - v * dt;
    gap1 >= v1 * v1 / (2.0 * brake) + v1 * dt
}

fn approach_accel(gap: f64, v: f64, cruise: f64, params: &VehicleParams, dt: f64) -> f64 {
    let brake = -params.a_min;
    if gap <= 0.0 {
        return params.a_min;
    }
    // Comfortable profile at half the braking capability.
    let v_des = (brake * (gap - 0.05).max(0.0)).sqrt();
    let want = cruise.min(((v_des - v) / dt).clamp(params.a_min, params.a_max));
    if can_still_stop(gap, v, want, brake, dt) {
        want
    } else {
        params.a_min
    }
}

/// Maps a discrete action to longitudinal control and moves the agent along
/// its route by one step. The agent tracks its path exactly.
pub fn advance_along_trajectory(
    state: &AgentState,
    params: &VehicleParams,
    action: Action,
    ctx: &MotionContext,
    dt: f64,
) -> AgentState {
    let v = state.speed;
    let s = state.s;
    let cruise = ((params.v_target - v) / dt).clamp(params.a_min, params.a_max);

    let mut nearest: Option<f64> = None;
    let mut consider = |target: f64| {
        nearest = Some(nearest.map_or(target, |n: f64| n.min(target)));
    };
    for &t in &ctx.hard_targets {
        consider(t.max(s));
    }
    if action == Action::Yield {
        if !state.committed(params) {
            if let Some(stop) = state.route.stop_arc {
                // Hold at the line; an agent already inside the buffer holds
                // where it is.
                consider((stop - params.l_f - STOP_BUFFER).max(s));
            }
        }
        if let Some(t) = ctx
            .yield_targets
            .iter()
            .copied()
            .filter(|&t| t >= s)
            .min_by(|a, b| a.total_cmp(b))
        {
            consider(t);
        }
    }

    let accel = match nearest {
        None => cruise,
        Some(target) => approach_accel(target - s, v, cruise, params, dt),
    };

    let length = state.route.path.length();
    let new_s = (s + v * dt).min(length);
    let mut next = state.clone();
    next.s = new_s;
    next.speed = if new_s >= length { 0.0 } else { (v + accel * dt).max(0.0) };
    let p = state.route.path.point_at(new_s);
    next.x = p.x;
    next.y = p.y;
    next.heading = state.route.path.heading_at(new_s);
    if !next.has_stopped && next.speed <= V_STOP_EPS && next.before_stop_line(params) {
        next.has_stopped = true;
    }
    next
}
