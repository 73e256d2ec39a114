use serde::{Deserialize, Serialize};

use super::point::Point2;
use crate::error::{Error, Result};

/// Bounded strictly convex domain containing the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexDomain {
    /// Vertices in counterclockwise order.
    Polygon { vertices: Vec<Point2> },
    /// Ellipse with semi-axes `a`, `b`, rotated by `rotation` radians.
    Ellipse { center: Point2, a: f64, b: f64, rotation: f64 },
}

impl ConvexDomain {
    pub fn polygon(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidDomain("polygon needs at least 3 vertices".into()));
        }
        let n = vertices.len();
        for i in 0..n {
            let e1 = vertices[(i + 1) % n] - vertices[i];
            let e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            if !(e1.cross(e2) > 0.0) {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not strictly convex and counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        Ok(Self::Polygon { vertices })
    }

    pub fn ellipse(center: Point2, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidDomain(format!("ellipse semi-axes must be positive, got {a}, {b}")));
        }
        Ok(Self::Ellipse { center, a, b, rotation: 0.0 })
    }

    pub fn disk(center: Point2, r: f64) -> Result<Self> {
        Self::ellipse(center, r, r)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Polygon { vertices } => Self::polygon(vertices.clone()).map(|_| ()),
            Self::Ellipse { center, a, b, .. } => Self::ellipse(*center, *a, *b).map(|_| ()),
        }
    }

    /// Whether `p` lies in the closed domain, up to `tol` in length units.
    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        match self {
            Self::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let e = vertices[(i + 1) % n] - a;
                    e.cross(p - a) / e.norm() >= -tol
                })
            }
            Self::Ellipse { center, a, b, rotation } => {
                let q = (p - *center).rotate(-rotation);
                let r = (q.x / a).hypot(q.y / b);
                // Radial distance to the boundary is at least (r - 1) * min(a, b).
                (r - 1.0) * a.min(*b) <= tol
            }
        }
    }

    /// Image under p ↦ scale · R(rotation) p + shift.
    pub fn transformed(&self, scale: f64, rotation: f64, shift: Point2) -> Self {
        let map = |p: Point2| p.rotate(rotation) * scale + shift;
        match self {
            Self::Polygon { vertices } => Self::Polygon { vertices: vertices.iter().map(|&p| map(p)).collect() },
            Self::Ellipse { center, a, b, rotation: r } => {
                Self::Ellipse { center: map(*center), a: a * scale, b: b * scale, rotation: r + rotation }
            }
        }
    }
}
