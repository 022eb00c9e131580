//! Agent kinematics, path geometry, intersection layout and collision tests.

pub mod geometry;
mod motion;
mod region;
mod trajectory;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use geometry::{wrap_angle, Point};
pub use motion::{advance_along_trajectory, step_bicycle, Action, MotionContext};
pub use region::{Approach, IntersectionRegion};
pub use trajectory::Trajectory;

use crate::error::{AgentId, Error, Result};

/// Speed at or below which an agent counts as stopped.
pub const V_STOP_EPS: f64 = 0.1;

/// Distance past the stop line after which an agent no longer stops for it.
pub const COMMIT_DISTANCE: f64 = 0.5;

/// Gap kept between the front of the agent and the stop line when yielding.
pub const STOP_BUFFER: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Vehicle,
    Pedestrian,
    Bicycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Centre of mass to front end, metres.
    pub l_f: f64,
    /// Centre of mass to rear end, metres.
    pub l_r: f64,
    pub a_max: f64,
    /// Maximum braking, negative.
    pub a_min: f64,
    pub v_target: f64,
    pub steer_max: f64,
    /// Collision disc radius.
    pub radius: f64,
}

impl VehicleParams {
    pub fn for_kind(kind: AgentKind) -> Self {
        match kind {
            AgentKind::Vehicle => VehicleParams {
                l_f: 1.5,
                l_r: 1.5,
                a_max: 2.5,
                a_min: -4.0,
                v_target: 8.0,
                steer_max: 0.6,
                radius: 1.6,
            },
            AgentKind::Bicycle => VehicleParams {
                l_f: 0.3,
                l_r: 0.3,
                a_max: 1.5,
                a_min: -3.0,
                v_target: 5.0,
                steer_max: 0.6,
                radius: 0.8,
            },
            AgentKind::Pedestrian => VehicleParams {
                l_f: 0.3,
                l_r: 0.3,
                a_max: 1.0,
                a_min: -2.0,
                v_target: 1.4,
                steer_max: 1.0,
                radius: 0.4,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(Error::InvalidParameter { name, reason: reason.into() });
        let all = [self.l_f, self.l_r, self.a_max, self.a_min, self.v_target, self.steer_max, self.radius];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("VehicleParams"));
        }
        if self.l_f <= 0.0 {
            return bad("l_f", "must be positive");
        }
        if self.l_r <= 0.0 {
            return bad("l_r", "must be positive");
        }
        if !(self.a_min < 0.0 && 0.0 < self.a_max) {
            return bad("a_min/a_max", "need a_min < 0 < a_max");
        }
        if self.radius <= 0.0 {
            return bad("radius", "must be positive");
        }
        if self.v_target < 0.0 {
            return bad("v_target", "must be non-negative");
        }
        Ok(())
    }

    pub fn body_length(&self) -> f64 {
        self.l_f + self.l_r
    }
}

/// A path together with its precomputed landmarks in a given region.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub path: Trajectory,
    /// Arc where the path crosses its stop line, if it has one.
    pub stop_arc: Option<f64>,
    /// Arc interval inside the intersection region.
    pub span: Option<(f64, f64)>,
}

impl Route {
    pub fn new(path: Trajectory, region: &IntersectionRegion) -> Self {
        let stop_arc = region.stop_arc(&path);
        let span = region.span(&path);
        Route { path, stop_arc, span }
    }

    pub fn exit_arc(&self) -> Option<f64> {
        self.span.map(|(_, exit)| exit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    pub kind: AgentKind,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub has_stopped: bool,
    pub route: Arc<Route>,
    /// Arc position of the centre along the route.
    pub s: f64,
    pub arrival_time: Option<f64>,
}

impl AgentState {
    /// Places an agent on its route at arc `s`.
    pub fn on_route(id: AgentId, kind: AgentKind, route: Arc<Route>, s: f64, speed: f64) -> Self {
        let s = s.clamp(0.0, route.path.length());
        let p = route.path.point_at(s);
        AgentState {
            id,
            kind,
            x: p.x,
            y: p.y,
            heading: route.path.heading_at(s),
            speed: speed.max(0.0),
            has_stopped: false,
            route,
            s,
            arrival_time: None,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn front_arc(&self, params: &VehicleParams) -> f64 {
        self.s + params.l_f
    }

    /// Whether the front is still behind the stop line. Agents without a
    /// stop line are never "before" it.
    pub fn before_stop_line(&self, params: &VehicleParams) -> bool {
        self.route.stop_arc.is_some_and(|stop| self.front_arc(params) <= stop)
    }

    pub fn past_stop_line(&self, params: &VehicleParams) -> bool {
        !self.before_stop_line(params)
    }

    /// Past the point of no return for the stop line.
    pub fn committed(&self, params: &VehicleParams) -> bool {
        self.route
            .stop_arc
            .is_none_or(|stop| self.front_arc(params) > stop + COMMIT_DISTANCE)
    }

    pub fn is_moving(&self) -> bool {
        self.speed > V_STOP_EPS
    }

    /// Distance still to travel before the whole body has left the region.
    pub fn remaining_crossing(&self, params: &VehicleParams) -> Option<f64> {
        self.route
            .exit_arc()
            .map(|exit| exit - self.s + params.body_length())
    }

    pub fn has_exited(&self, params: &VehicleParams) -> bool {
        self.remaining_crossing(params).is_none_or(|d| d <= 0.0)
    }

    /// Reached the end of its route.
    pub fn finished(&self) -> bool {
        self.s >= self.route.path.length() - 1e-9
    }
}

/// Disc-disc overlap with a strict inequality.
pub fn detect_collision(a: &AgentState, b: &AgentState, pa: &VehicleParams, pb: &VehicleParams) -> bool {
    a.position().distance(b.position()) < pa.radius + pb.radius
}
