use serde::Serialize;

use super::Trace;
use crate::world::Action;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub ego_collisions: usize,
    /// Time of the ego's full exit from the region, if it got out.
    pub ego_crossing_time: Option<f64>,
    pub first_decision: Option<Action>,
    pub decisions: usize,
    pub latency_mean: f64,
    pub latency_max: f64,
    /// Largest game per ego decision.
    pub game_sizes: Vec<usize>,
    /// Number of games per ego decision.
    pub game_counts: Vec<usize>,
    pub yields_forced_by_safety: usize,
    pub total_collisions: usize,
}

impl Metrics {
    pub fn max_game_size(&self) -> usize {
        self.game_sizes.iter().copied().max().unwrap_or(1)
    }

    pub const CSV_HEADER: &'static str =
        "ego_collisions,ego_crossing_time,first_decision,decisions,latency_mean_ms,latency_max_ms,max_game_size,yields_forced_by_safety,total_collisions";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.4},{:.4},{},{},{}",
            self.ego_collisions,
            self.ego_crossing_time.map(|t| format!("{t:.2}")).unwrap_or_else(|| "none".into()),
            self.first_decision.map(|a| a.to_string()).unwrap_or_else(|| "none".into()),
            self.decisions,
            self.latency_mean * 1e3,
            self.latency_max * 1e3,
            self.max_game_size(),
            self.yields_forced_by_safety,
            self.total_collisions,
        )
    }

    pub fn summary(&self) -> String {
        let crossing = self.ego_crossing_time.map(|t| format!("{t:.2} s")).unwrap_or_else(|| "did not cross".into());
        let first = self.first_decision.map(|a| a.to_string()).unwrap_or_else(|| "none".into());
        format!(
            "ego collisions: {}\nego crossing time: {}\nfirst decision: {}\ndecisions: {}\nlatency mean/max: {:.3} / {:.3} ms\nmax game size: {}\nsafety overrides: {}\n",
            self.ego_collisions,
            crossing,
            first,
            self.decisions,
            self.latency_mean * 1e3,
            self.latency_max * 1e3,
            self.max_game_size(),
            self.yields_forced_by_safety,
        )
    }
}

pub fn compute_metrics(trace: &Trace) -> Metrics {
    let ego: Vec<_> = trace.ego_decisions().map(|(_, d)| d).collect();
    let lat: Vec<f64> = ego.iter().map(|d| d.latency).collect();
    Metrics {
        ego_collisions: trace.collisions.iter().filter(|c| c.involves(trace.ego_id)).count(),
        ego_crossing_time: trace.ego_exit_time,
        first_decision: ego.first().map(|d| d.action),
        decisions: ego.len(),
        latency_mean: if lat.is_empty() { 0.0 } else { lat.iter().sum::<f64>() / lat.len() as f64 },
        latency_max: lat.iter().copied().fold(0.0, f64::max),
        game_sizes: ego.iter().map(|d| d.max_game_size()).collect(),
        game_counts: ego.iter().map(|d| d.game_count()).collect(),
        yields_forced_by_safety: ego.iter().filter(|d| d.safety_overridden).count(),
        total_collisions: trace.collisions.len(),
    }
}
