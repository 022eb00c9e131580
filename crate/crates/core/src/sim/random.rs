use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decision::PolicyConfig;
use crate::error::AgentId;
use crate::scenario::library::{at_gap, LEAD, four_way_region, lane_route, Side, Turn};
use crate::scenario::{Behavior, Scenario};
use crate::sim::SimConfig;
use crate::world::{Action, AgentKind, Route, STOP_BUFFER};

/// Layouts the generator can populate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionTemplate {
    /// Square box of the given half-size, one lane per approach.
    FourWay { half: f64 },
}

impl Default for RegionTemplate {
    fn default() -> Self {
        RegionTemplate::FourWay { half: 10.0 }
    }
}

/// Share of non-ego agents that ignore the stop-sign rule.
pub const VIOLATOR_SHARE: f64 = 0.2;
const MIN_SPACING: f64 = 12.0;
const MAX_FIRST_GAP: f64 = 20.0;
/// Furthest front gap that still fits on a lane's lead-in.
const MAX_QUEUE: f64 = LEAD - 8.0;

/// Speed from which a gap can be closed at a gentle 1.5 m/s^2.
fn gentle_speed(gap: f64) -> f64 {
    (3.0 * (gap - STOP_BUFFER).max(0.0)).sqrt()
}

/// Deterministic random scenario: the ego (agent 1) enters from the south,
/// everyone else queues on a random approach with a random manoeuvre.
/// Lanes hold about four queued agents each, so beyond ~16 agents the
/// queues no longer fit.
pub fn generate_random_scenario(seed: u64, n_agents: usize, template: RegionTemplate) -> Scenario {
    let RegionTemplate::FourWay { half } = template;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = four_way_region(half);
    // Front gap to the stop line of the last agent placed on each side.
    let mut tail: [Option<f64>; 4] = [None; 4];
    let mut agents = Vec::with_capacity(n_agents);

    for k in 0..n_agents.max(1) {
        let id = (k + 1) as AgentId;
        let preferred = if k == 0 { 0 } else { rng.gen_range(0..4) };
        let turn = Turn::ALL[rng.gen_range(0..3)];
        let jitter = rng.gen_range(0.0..8.0);
        let next_gap = |slot: usize, jitter: f64| match tail[slot] {
            None => STOP_BUFFER + jitter / 8.0 * (MAX_FIRST_GAP - STOP_BUFFER),
            Some(prev) => prev + MIN_SPACING + jitter,
        };
        // Queues must fit on the lead-in; fall back to the shortest queue.
        let slot = (0..4)
            .map(|o| (preferred + o) % 4)
            .find(|&sl| next_gap(sl, jitter) < MAX_QUEUE)
            .unwrap_or_else(|| (0..4).min_by(|&a, &b| next_gap(a, 0.0).total_cmp(&next_gap(b, 0.0))).unwrap());
        let side = Side::ALL[slot];
        let gap = next_gap(slot, jitter);
        let following = tail[slot].is_some();
        tail[slot] = Some(gap);
        let cap = if following { gentle_speed(MIN_SPACING - 3.7) } else { gentle_speed(gap) };
        let route = Arc::new(Route::new(lane_route(side, turn, half), &region));
        let mut a = at_gap(id, AgentKind::Vehicle, route, gap, 0.0);
        a.state.speed = rng.gen_range(0.0..=cap.min(a.params.v_target));
        if k > 0 && rng.gen_bool(VIOLATOR_SHARE) {
            a.behavior = if rng.gen_bool(0.5) {
                Behavior::Scripted { actions: vec![(0.0, Action::Go)] }
            } else {
                let switch = (rng.gen_range(1.0..8.0) * 10.0_f64).round() / 10.0;
                Behavior::Scripted { actions: vec![(0.0, Action::Yield), (switch, Action::Go)] }
            };
        }
        agents.push(a);
    }

    Scenario {
        name: format!("random-{seed}"),
        region,
        agents,
        ego_id: 1,
        policy: PolicyConfig::default(),
        sim: SimConfig { seed, ..SimConfig::default() },
    }
}
