use crate::error::{Error, Result};
use crate::world::{AgentState, VehicleParams, V_STOP_EPS};

/// Finite stand-in for "never arrives", used for stopped agents.
pub const T_MAX: f64 = 1e4;

/// Time-to-collision: the time to cover `distance` at speed `speed`.
pub fn ttc(distance: f64, speed: f64) -> Result<f64> {
    if !distance.is_finite() || !speed.is_finite() {
        return Err(Error::NonFinite("ttc"));
    }
    if distance < 0.0 {
        return Err(Error::NegativeDistance(distance));
    }
    if speed < V_STOP_EPS {
        return Ok(T_MAX);
    }
    Ok((distance / speed).min(T_MAX))
}

/// Time-of-safe-crossing: time until the whole body has left the region.
pub fn tosc(agent: &AgentState, params: &VehicleParams) -> f64 {
    match agent.remaining_crossing(params) {
        Some(d) if d > 0.0 => {
            if agent.speed < V_STOP_EPS {
                T_MAX
            } else {
                (d / agent.speed).min(T_MAX)
            }
        }
        _ => 0.0,
    }
}
