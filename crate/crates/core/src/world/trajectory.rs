use serde::{Deserialize, Serialize};

use super::geometry::{project_on_segment, Point};
use crate::error::{Error, Result};

/// A polyline path with cumulative arc length per waypoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Trajectory {
    waypoints: Vec<Point>,
    arc: Vec<f64>,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Point>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidTrajectory(format!(
                "needs at least 2 waypoints, got {}",
                waypoints.len()
            )));
        }
        if let Some(i) = waypoints.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidTrajectory(format!("waypoint {i} is not finite")));
        }
        let mut arc = Vec::with_capacity(waypoints.len());
        arc.push(0.0);
        for (i, w) in waypoints.windows(2).enumerate() {
            let len = w[0].distance(w[1]);
            if len <= 0.0 {
                return Err(Error::InvalidTrajectory(format!(
                    "waypoints {i} and {} coincide",
                    i + 1
                )));
            }
            arc.push(arc[i] + len);
        }
        Ok(Trajectory { waypoints, arc })
    }

    pub fn waypoints(&self) -> &[Point] {
        &self.waypoints
    }

    /// Cumulative arc length at each waypoint.
    pub fn arc_lengths(&self) -> &[f64] {
        &self.arc
    }

    pub fn length(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }

    /// Segment `i` as `(start_arc, a, b)`.
    pub fn segment(&self, i: usize) -> (f64, Point, Point) {
        (self.arc[i], self.waypoints[i], self.waypoints[i + 1])
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, Point, Point)> + '_ {
        (0..self.segment_count()).map(move |i| self.segment(i))
    }

    fn segment_index(&self, s: f64) -> usize {
        let n = self.segment_count();
        match self.arc.binary_search_by(|a| a.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Position at arc length `s`, clamped to the path ends.
    pub fn point_at(&self, s: f64) -> Point {
        let s = s.clamp(0.0, self.length());
        let i = self.segment_index(s);
        let (s0, a, b) = self.segment(i);
        let len = self.arc[i + 1] - s0;
        a.lerp(b, (s - s0) / len)
    }

    /// Tangent heading at arc length `s`.
    pub fn heading_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.length());
        let (_, a, b) = self.segment(self.segment_index(s));
        let d = b - a;
        d.y.atan2(d.x)
    }

    /// The part of the path from arc `s` onward, or `None` if nothing of
    /// positive length remains.
    pub fn slice_from(&self, s: f64) -> Option<Trajectory> {
        if s <= 0.0 {
            return Some(self.clone());
        }
        if s >= self.length() - 1e-9 {
            return None;
        }
        let i = self.segment_index(s);
        let mut pts = vec![self.point_at(s)];
        for (k, w) in self.waypoints.iter().enumerate().skip(i + 1) {
            if self.arc[k] - s > 1e-9 {
                pts.push(*w);
            }
        }
        Trajectory::new(pts).ok()
    }

    /// Nearest point on the path within the arc window `[from, to]`,
    /// returned as `(arc, distance)`.
    pub fn project(&self, p: Point, from: f64, to: f64) -> (f64, f64) {
        let from = from.clamp(0.0, self.length());
        let to = to.clamp(from, self.length());
        let mut best = (from, p.distance(self.point_at(from)));
        for (s0, a, b) in self.segments() {
            let seg_len = a.distance(b);
            if s0 > to || s0 + seg_len < from {
                continue;
            }
            let t = project_on_segment(p, a, b);
            let s = (s0 + t * seg_len).clamp(from, to);
            let d = p.distance(self.point_at(s));
            if d < best.1 {
                best = (s, d);
            }
        }
        best
    }
}

impl TryFrom<Vec<Point>> for Trajectory {
    type Error = Error;
    fn try_from(value: Vec<Point>) -> Result<Self> {
        Trajectory::new(value)
    }
}

impl From<Trajectory> for Vec<Point> {
    fn from(t: Trajectory) -> Self {
        t.waypoints
    }
}
