use std::f64::consts::PI;

use crate::{Error, Result, Vec2};

/// Piecewise-linear integration contour.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    waypoints: Vec<Vec2>,
    closed: bool,
}

impl Path {
    /// Open polyline through `waypoints` (at least two).
    pub fn open(waypoints: Vec<Vec2>) -> Result<Self> {
        Self::checked(waypoints, false)
    }

    /// Closed polyline; the first and last waypoints must coincide exactly.
    pub fn closed(waypoints: Vec<Vec2>) -> Result<Self> {
        Self::checked(waypoints, true)
    }

    /// Closed polygon through `vertices`, repeating the first vertex at the end.
    pub fn polygon(mut vertices: Vec<Vec2>) -> Result<Self> {
        if let Some(&first) = vertices.first() {
            vertices.push(first);
        }
        Self::closed(vertices)
    }

    /// Regular polygon approximating a circle traversed `winding` times
    /// (counterclockwise for positive winding).
    pub fn circle(center: Vec2, radius: f64, vertices_per_turn: usize, winding: i32) -> Result<Self> {
        if winding == 0 || vertices_per_turn < 3 || !(radius > 0.0) {
            return Err(Error::InvalidPath(
                "circle needs radius > 0, ≥ 3 vertices per turn and nonzero winding".into(),
            ));
        }
        let n = vertices_per_turn * winding.unsigned_abs() as usize;
        let dir = f64::from(winding.signum());
        let mut pts: Vec<Vec2> = (0..n)
            .map(|i| {
                let th = dir * 2.0 * PI * (i % vertices_per_turn) as f64 / vertices_per_turn as f64;
                center + Vec2::new(th.cos(), th.sin()) * radius
            })
            .collect();
        pts.push(pts[0]);
        Self::closed(pts)
    }

    fn checked(waypoints: Vec<Vec2>, closed: bool) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least 2 waypoints".into()));
        }
        if waypoints.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidPath("waypoints must be finite".into()));
        }
        if closed && waypoints.first() != waypoints.last() {
            return Err(Error::InvalidPath(
                "closed path must end exactly where it starts".into(),
            ));
        }
        Ok(Path { waypoints, closed })
    }

    pub fn waypoints(&self) -> &[Vec2] {
        &self.waypoints
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn start(&self) -> Vec2 {
        self.waypoints[0]
    }

    pub fn end(&self) -> Vec2 {
        self.waypoints[self.waypoints.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn reversed(&self) -> Path {
        let mut waypoints = self.waypoints.clone();
        waypoints.reverse();
        Path {
            waypoints,
            closed: self.closed,
        }
    }

    /// `self` followed by `other`; `other` must start where `self` ends.
    /// The result is closed when it returns exactly to its start.
    pub fn concat(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::InvalidPath(
                "concatenated paths must share the junction point".into(),
            ));
        }
        let mut waypoints = self.waypoints.clone();
        waypoints.extend_from_slice(&other.waypoints[1..]);
        let closed = waypoints.first() == waypoints.last();
        Ok(Path { waypoints, closed })
    }

    /// Signed number of turns around `about`. Requires a closed path that
    /// does not pass through `about`.
    pub fn winding_number(&self, about: Vec2) -> Result<i32> {
        if !self.closed {
            return Err(Error::InvalidPath("winding number needs a closed path".into()));
        }
        let mut total = 0.0;
        for (a, b) in self.segments() {
            let (u, v) = (a - about, b - about);
            if u.norm_squared() == 0.0 || v.norm_squared() == 0.0 {
                return Err(Error::InvalidPath("path passes through the winding center".into()));
            }
            total += (u.x * v.y - u.y * v.x).atan2(u.dot(&v));
        }
        Ok((total / (2.0 * PI)).round() as i32)
    }

    /// Smallest distance from `p` to any segment.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        self.segments()
            .map(|(a, b)| segment_distance(a, b, p))
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn segment_distance(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).dot(&d) / len2).clamp(0.0, 1.0);
    (a + d * s - p).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rules() {
        assert!(Path::open(vec![Vec2::zeros()]).is_err());
        assert!(Path::closed(vec![Vec2::zeros(), Vec2::new(1.0, 0.0)]).is_err());
        assert!(Path::polygon(vec![Vec2::zeros(), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)])
            .unwrap()
            .is_closed());
    }

    #[test]
    fn winding_numbers() {
        let c = Vec2::new(0.2, -0.1);
        assert_eq!(Path::circle(c, 2.0, 12, 1).unwrap().winding_number(c).unwrap(), 1);
        assert_eq!(Path::circle(c, 2.0, 12, -1).unwrap().winding_number(c).unwrap(), -1);
        assert_eq!(Path::circle(c, 2.0, 12, 2).unwrap().winding_number(c).unwrap(), 2);
        let far = Vec2::new(10.0, 0.0);
        assert_eq!(Path::circle(c, 2.0, 12, 1).unwrap().winding_number(far).unwrap(), 0);
    }

    #[test]
    fn concat_closes_loops() {
        let a = Path::open(vec![Vec2::zeros(), Vec2::new(1.0, 1.0), Vec2::new(2.0, 0.0)]).unwrap();
        let b = Path::open(vec![Vec2::zeros(), Vec2::new(1.0, -1.0), Vec2::new(2.0, 0.0)]).unwrap();
        let lp = b.concat(&a.reversed()).unwrap();
        assert!(lp.is_closed());
        assert_eq!(lp.winding_number(Vec2::new(1.0, 0.0)).unwrap(), 1);
        assert!(a.concat(&b).is_err());
    }

    #[test]
    fn distances() {
        let p = Path::open(vec![Vec2::new(-1.0, 1.0), Vec2::new(1.0, 1.0)]).unwrap();
        assert!((p.distance_to(Vec2::zeros()) - 1.0).abs() < 1e-15);
        assert!((p.distance_to(Vec2::new(3.0, 1.0)) - 2.0).abs() < 1e-15);
    }
}
