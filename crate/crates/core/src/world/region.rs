use serde::{Deserialize, Serialize};

use super::geometry::{segment_intersection, signed_area, Point, GEOM_EPS};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};

/// Stop line and exit line of one incoming lane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approach {
    pub stop_line: [Point; 2],
    pub exit_line: [Point; 2],
}

/// The conflict area of the intersection: a convex polygon plus the
/// per-lane stop and exit lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RegionRepr", into = "RegionRepr")]
pub struct IntersectionRegion {
    boundary: Vec<Point>,
    approaches: Vec<Approach>,
}

#[derive(Serialize, Deserialize)]
struct RegionRepr {
    boundary: Vec<Point>,
    #[serde(default)]
    approaches: Vec<Approach>,
}

impl TryFrom<RegionRepr> for IntersectionRegion {
    type Error = Error;
    fn try_from(r: RegionRepr) -> Result<Self> {
        IntersectionRegion::new(r.boundary, r.approaches)
    }
}

impl From<IntersectionRegion> for RegionRepr {
    fn from(r: IntersectionRegion) -> Self {
        RegionRepr { boundary: r.boundary, approaches: r.approaches }
    }
}

impl IntersectionRegion {
    /// Builds a region; the boundary may be given in either orientation but
    /// must be convex with non-zero area.
    pub fn new(mut boundary: Vec<Point>, approaches: Vec<Approach>) -> Result<Self> {
        if boundary.len() < 3 {
            return Err(Error::InvalidRegion("boundary needs at least 3 vertices".into()));
        }
        if boundary.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidRegion("boundary vertex is not finite".into()));
        }
        let area = signed_area(&boundary);
        if area.abs() < GEOM_EPS {
            return Err(Error::InvalidRegion("boundary is degenerate".into()));
        }
        if area < 0.0 {
            boundary.reverse();
        }
        let n = boundary.len();
        for i in 0..n {
            let a = boundary[i];
            let b = boundary[(i + 1) % n];
            let c = boundary[(i + 2) % n];
            if (b - a).cross(c - b) < -GEOM_EPS {
                return Err(Error::InvalidRegion(format!("boundary is not convex at vertex {}", (i + 1) % n)));
            }
        }
        Ok(IntersectionRegion { boundary, approaches })
    }

    /// Axis-aligned square box centred on the origin.
    pub fn square(half: f64, approaches: Vec<Approach>) -> Result<Self> {
        Self::new(
            vec![
                Point::new(-half, -half),
                Point::new(half, -half),
                Point::new(half, half),
                Point::new(-half, half),
            ],
            approaches,
        )
    }

    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    pub fn approaches(&self) -> &[Approach] {
        &self.approaches
    }

    /// Boundary-inclusive containment test.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.boundary.len();
        (0..n).all(|i| {
            let a = self.boundary[i];
            let b = self.boundary[(i + 1) % n];
            let edge = b - a;
            edge.cross(p - a) >= -1e-9 * edge.norm()
        })
    }

    /// Arc interval `[entry, exit]` of the path that lies inside the region.
    pub fn span(&self, path: &Trajectory) -> Option<(f64, f64)> {
        let mut arcs = Vec::new();
        if self.contains(path.waypoints()[0]) {
            arcs.push(0.0);
        }
        if self.contains(*path.waypoints().last().unwrap()) {
            arcs.push(path.length());
        }
        let n = self.boundary.len();
        for (s0, a, b) in path.segments() {
            let len = a.distance(b);
            for i in 0..n {
                if let Some((t, _)) =
                    segment_intersection(a, b, self.boundary[i], self.boundary[(i + 1) % n])
                {
                    arcs.push(s0 + t * len);
                }
            }
        }
        let entry = arcs.iter().cloned().fold(f64::INFINITY, f64::min);
        let exit = arcs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (entry <= exit).then_some((entry, exit))
    }

    /// First arc at which the path crosses any approach's stop line.
    pub fn stop_arc(&self, path: &Trajectory) -> Option<f64> {
        let mut best: Option<f64> = None;
        for (s0, a, b) in path.segments() {
            let len = a.distance(b);
            for ap in &self.approaches {
                if let Some((t, _)) = segment_intersection(a, b, ap.stop_line[0], ap.stop_line[1]) {
                    let s = s0 + t * len;
                    best = Some(best.map_or(s, |b: f64| b.min(s)));
                }
            }
            if best.is_some() {
                break;
            }
        }
        best
    }
}
