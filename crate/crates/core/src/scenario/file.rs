use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{AgentSetup, Behavior, Scenario};
use crate::decision::{PolicyConfig, PolicyKind};
use crate::error::{AgentId, Error, Result};
use crate::game::GameParams;
use crate::sim::SimConfig;
use crate::world::{wrap_angle, AgentKind, AgentState, IntersectionRegion, Point, Route, Trajectory, VehicleParams};

/// Furthest an initial position may sit from its route.
const POSE_TOLERANCE: f64 = 0.5;
const HEADING_TOLERANCE: f64 = 0.35;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
}

/// Per-field overrides of the kind's default vehicle parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsOverride {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steer_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl ParamsOverride {
    fn apply(&self, mut p: VehicleParams) -> VehicleParams {
        let fields = [
            (&mut p.l_f, self.l_f),
            (&mut p.l_r, self.l_r),
            (&mut p.a_max, self.a_max),
            (&mut p.a_min, self.a_min),
            (&mut p.v_target, self.v_target),
            (&mut p.steer_max, self.steer_max),
            (&mut p.radius, self.radius),
        ];
        for (slot, v) in fields {
            if let Some(v) = v {
                *slot = v;
            }
        }
        p
    }

    fn diff(base: &VehicleParams, p: &VehicleParams) -> Option<Self> {
        let pick = |a: f64, b: f64| (a != b).then_some(b);
        let o = ParamsOverride {
            l_f: pick(base.l_f, p.l_f),
            l_r: pick(base.l_r, p.l_r),
            a_max: pick(base.a_max, p.a_max),
            a_min: pick(base.a_min, p.a_min),
            v_target: pick(base.v_target, p.v_target),
            steer_max: pick(base.steer_max, p.steer_max),
            radius: pick(base.radius, p.radius),
        };
        (o != ParamsOverride::default()).then_some(o)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub id: AgentId,
    pub kind: AgentKind,
    pub pose: Pose,
    #[serde(default)]
    pub speed: f64,
    pub route: Trajectory,
    #[serde(default)]
    pub behavior: Behavior,
    #[serde(default)]
    pub has_stopped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsOverride>,
}

/// Decision settings that a file may override; `params` carries the payoff
/// weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicySection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<PolicyKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heading_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safety_check: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partial_levels: Option<bool>,
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default)]
    pub name: String,
    pub region: IntersectionRegion,
    pub agents: Vec<AgentEntry>,
    pub ego_id: AgentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GameParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<PolicySection>,
}

fn at(path: impl Into<String>, err: Error) -> Error {
    Error::Scenario { path: path.into(), message: err.to_string() }
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let mut agents = Vec::with_capacity(self.agents.len());
        for (i, e) in self.agents.into_iter().enumerate() {
            let key = format!("agents[{i}]");
            let route = Arc::new(Route::new(e.route, &self.region));
            let (s, dist) = route.path.project(Point::new(e.pose.x, e.pose.y), 0.0, route.path.length());
            if dist > POSE_TOLERANCE {
                return Err(Error::Scenario {
                    path: format!("{key}.pose"),
                    message: format!("position is {dist:.2} m from the route"),
                });
            }
            let mut state = AgentState::on_route(e.id, e.kind, route, s, e.speed);
            if let Some(h) = e.pose.heading {
                if wrap_angle(h - state.heading).abs() > HEADING_TOLERANCE {
                    return Err(Error::Scenario {
                        path: format!("{key}.pose.heading"),
                        message: format!("heading {h:.3} disagrees with the route heading {:.3}", state.heading),
                    });
                }
            }
            if !(e.speed.is_finite() && e.speed >= 0.0) {
                return Err(Error::Scenario { path: format!("{key}.speed"), message: "must be a non-negative number".into() });
            }
            state.x = e.pose.x;
            state.y = e.pose.y;
            state.has_stopped = e.has_stopped;
            state.arrival_time = e.arrival_time;
            let params = e.params.unwrap_or_default().apply(VehicleParams::for_kind(e.kind));
            params.validate().map_err(|err| at(format!("{key}.params"), err))?;
            e.behavior.validate().map_err(|err| at(format!("{key}.behavior"), err))?;
            agents.push(AgentSetup { state, params, behavior: e.behavior });
        }

        let mut policy = PolicyConfig::default();
        if let Some(g) = self.params {
            g.validate().map_err(|err| at("params", err))?;
            policy.game = g;
        }
        if let Some(p) = self.policy {
            policy.policy = p.kind.unwrap_or(policy.policy);
            policy.n_max = p.n_max.unwrap_or(policy.n_max);
            policy.cluster = p.cluster.unwrap_or(policy.cluster);
            policy.heading_tol = p.heading_tol.unwrap_or(policy.heading_tol);
            policy.safety_check = p.safety_check.unwrap_or(policy.safety_check);
            policy.t_margin = p.t_margin.unwrap_or(policy.t_margin);
            policy.partial_levels = p.partial_levels.unwrap_or(policy.partial_levels);
            policy.validate().map_err(|err| at("policy", err))?;
        }
        let sim = self.sim.unwrap_or_default();
        sim.validate().map_err(|err| at("sim", err))?;

        let scenario = Scenario { name: self.name, region: self.region, agents, ego_id: self.ego_id, policy, sim };
        scenario.validate().map_err(|err| {
            let path = match &err {
                Error::Config(m) if m.contains("ego_id") => "ego_id",
                _ => "agents",
            };
            at(path, err)
        })?;
        Ok(scenario)
    }

    pub fn from_scenario(s: &Scenario) -> Self {
        let defaults = PolicyConfig::default();
        let p = &s.policy;
        let opt = |differs: bool| differs.then_some(());
        let policy = PolicySection {
            kind: opt(p.policy != defaults.policy).map(|_| p.policy),
            n_max: opt(p.n_max != defaults.n_max).map(|_| p.n_max),
            cluster: opt(p.cluster != defaults.cluster).map(|_| p.cluster),
            heading_tol: opt(p.heading_tol != defaults.heading_tol).map(|_| p.heading_tol),
            safety_check: opt(p.safety_check != defaults.safety_check).map(|_| p.safety_check),
            t_margin: opt(p.t_margin != defaults.t_margin).map(|_| p.t_margin),
            partial_levels: opt(p.partial_levels != defaults.partial_levels).map(|_| p.partial_levels),
        };
        ScenarioFile {
            name: s.name.clone(),
            region: s.region.clone(),
            agents: s
                .agents
                .iter()
                .map(|a| AgentEntry {
                    id: a.state.id,
                    kind: a.state.kind,
                    pose: Pose { x: a.state.x, y: a.state.y, heading: Some(a.state.heading) },
                    speed: a.state.speed,
                    route: a.state.route.path.clone(),
                    behavior: a.behavior.clone(),
                    has_stopped: a.state.has_stopped,
                    arrival_time: a.state.arrival_time,
                    params: ParamsOverride::diff(&VehicleParams::for_kind(a.state.kind), &a.params),
                })
                .collect(),
            ego_id: s.ego_id,
            params: (p.game != GameParams::default()).then_some(p.game),
            sim: Some(s.sim),
            policy: (policy != PolicySection::default()).then_some(policy),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses a scenario document; errors carry the offending key path.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Scenario { path, message: e.into_inner().to_string() }
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)?.into_scenario()
}
