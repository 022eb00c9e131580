use serde::Serialize;

use crate::error::AgentId;
use crate::world::geometry::segment_intersection;
use crate::world::{IntersectionRegion, Point, Trajectory};

/// Shallowest crossing angle (as a sine) used when sizing the zone two
/// bodies can touch in.
const MIN_SIN: f64 = 0.25;

/// A point where two paths cross, with the arc position along each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub point: Point,
    pub arc_i: f64,
    pub arc_j: f64,
    /// |sin| of the angle between the two paths at the point.
    pub sin_angle: f64,
}

impl Crossing {
    pub fn swapped(self) -> Crossing {
        Crossing { arc_i: self.arc_j, arc_j: self.arc_i, ..self }
    }

    /// Arc distance from the point within which two discs whose radii add
    /// up to `reach` can still overlap.
    pub fn contact_half_width(&self, reach: f64) -> f64 {
        reach / self.sin_angle.max(MIN_SIN)
    }
}

/// A trajectory conflict between two specific agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConflictPoint {
    pub pair: (AgentId, AgentId),
    pub point: Point,
    pub arc_i: f64,
    pub arc_j: f64,
}

impl ConflictPoint {
    pub fn new(i: AgentId, j: AgentId, c: Crossing) -> Self {
        ConflictPoint { pair: (i, j), point: c.point, arc_i: c.arc_i, arc_j: c.arc_j }
    }

    pub fn swapped(self) -> Self {
        ConflictPoint {
            pair: (self.pair.1, self.pair.0),
            point: self.point,
            arc_i: self.arc_j,
            arc_j: self.arc_i,
        }
    }
}

fn bbox(a: Point, b: Point) -> (f64, f64, f64, f64) {
    (a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y))
}

/// Both paths reach the point along the same stretch of road: where two
/// routes sharing a lane split. Merges (shared only afterwards) still count.
fn shared_approach(ti: &Trajectory, tj: &Trajectory, arc_i: f64, arc_j: f64) -> bool {
    const BACK: f64 = 0.5;
    arc_i >= BACK && arc_j >= BACK && ti.point_at(arc_i - BACK).distance(tj.point_at(arc_j - BACK)) < 1e-6
}

/// Every crossing of the two polylines inside the region, ordered by arc
/// along `ti`. Diverge points of routes sharing a lane are not crossings.
pub fn all_crossings(ti: &Trajectory, tj: &Trajectory, region: &IntersectionRegion) -> Vec<Crossing> {
    let mut out = Vec::new();
    for (si, a0, a1) in ti.segments() {
        let ba = bbox(a0, a1);
        let len_a = a0.distance(a1);
        for (sj, b0, b1) in tj.segments() {
            let bb = bbox(b0, b1);
            if ba.2 < bb.0 - 1e-9 || bb.2 < ba.0 - 1e-9 || ba.3 < bb.1 - 1e-9 || bb.3 < ba.1 - 1e-9 {
                continue;
            }
            if let Some((t, u)) = segment_intersection(a0, a1, b0, b1) {
                let point = a0.lerp(a1, t);
                let len_b = b0.distance(b1);
                let (arc_i, arc_j) = (si + t * len_a, sj + u * len_b);
                if region.contains(point) && !shared_approach(ti, tj, arc_i, arc_j) {
                    let sin_angle = ((a1 - a0).cross(b1 - b0) / (len_a * len_b)).abs().min(1.0);
                    out.push(Crossing { point, arc_i, arc_j, sin_angle });
                }
            }
        }
    }
    out.sort_by(|a, b| a.arc_i.total_cmp(&b.arc_i).then(a.arc_j.total_cmp(&b.arc_j)));
    // A crossing exactly at a shared vertex is reported by both adjacent
    // segments.
    out.dedup_by(|a, b| (a.arc_i - b.arc_i).abs() < 1e-9 && (a.arc_j - b.arc_j).abs() < 1e-9);
    out
}

/// Earliest (by arc along `ti`) crossing of two forward-looking paths
/// inside the region; boundary points count as inside.
pub fn trajectories_conflict(ti: &Trajectory, tj: &Trajectory, region: &IntersectionRegion) -> Option<Crossing> {
    all_crossings(ti, tj, region).into_iter().next()
}

/// Precomputed crossings between the full routes of every agent pair,
/// indexed by agent position. Routes are fixed for a run, so forward
/// conflicts reduce to filtering these by current arc positions.
#[derive(Debug, Clone, Default)]
pub struct ConflictTable {
    n: usize,
    // Upper triangle, crossings from the lower index's point of view.
    pairs: Vec<Vec<Crossing>>,
}

impl ConflictTable {
    pub fn build(routes: &[&Trajectory], region: &IntersectionRegion) -> Self {
        let n = routes.len();
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push(all_crossings(routes[i], routes[j], region));
            }
        }
        ConflictTable { n, pairs }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.n);
        i * (2 * self.n - i - 1) / 2 + (j - i - 1)
    }

    /// Crossings between routes `i` and `j`, from `i`'s point of view.
    pub fn crossings(&self, i: usize, j: usize) -> Vec<Crossing> {
        if i == j {
            return Vec::new();
        }
        if i < j {
            self.pairs[self.slot(i, j)].clone()
        } else {
            let mut v: Vec<_> = self.pairs[self.slot(j, i)].iter().map(|c| c.swapped()).collect();
            v.sort_by(|a, b| a.arc_i.total_cmp(&b.arc_i));
            v
        }
    }

    /// Earliest crossing neither agent has cleared. Agent `i` at arc `s_i`
    /// has cleared a crossing once it is past it by more than the contact
    /// half-width for `reach`, the sum of both radii.
    pub fn forward(&self, i: usize, j: usize, s_i: f64, s_j: f64, reach: f64) -> Option<Crossing> {
        if i == j {
            return None;
        }
        let (lo, hi, swapped) = if i < j { (i, j, false) } else { (j, i, true) };
        let list = &self.pairs[self.slot(lo, hi)];
        let mut best: Option<Crossing> = None;
        for c in list {
            let c = if swapped { c.swapped() } else { *c };
            let w = c.contact_half_width(reach);
            if c.arc_i >= s_i - w && c.arc_j >= s_j - w && best.is_none_or(|b| c.arc_i < b.arc_i) {
                best = Some(c);
            }
        }
        best
    }
}
