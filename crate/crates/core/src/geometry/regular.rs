use std::f64::consts::TAU;

use super::curve::VertexId;
use super::network::{Network, VertexKind};
use super::point::{wrap_angle, Point2};

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionCheck {
    pub vertex: VertexId,
    /// |Σ outward unit tangents|.
    pub residual: f64,
    /// Counterclockwise gaps between consecutive outward tangents, radians.
    pub angles: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularityReport {
    pub junctions: Vec<JunctionCheck>,
    pub tol: f64,
    pub pass: bool,
}

impl RegularityReport {
    pub fn max_residual(&self) -> f64 {
        self.junctions.iter().map(|j| j.residual).fold(0.0, f64::max)
    }
}

/// Outward unit tangents at a vertex, in incidence order.
pub fn outward_tangents(n: &Network, v: VertexId) -> Vec<Point2> {
    n.incident(v)
        .into_iter()
        .map(|inc| n.curve(inc.curve).expect("incident curve exists").outward_tangent(inc.end))
        .collect()
}

/// Counterclockwise gaps between a set of directions, sorted by angle.
pub fn angular_gaps(dirs: &[Point2]) -> Vec<f64> {
    let mut a: Vec<f64> = dirs.iter().map(|d| wrap_angle(d.angle())).collect();
    a.sort_by(f64::total_cmp);
    let k = a.len();
    (0..k).map(|i| if i + 1 < k { a[i + 1] - a[i] } else { a[0] + TAU - a[i] }).collect()
}

/// Angle-condition residual at every triple junction.
pub fn check_regular(n: &Network, tol: f64) -> RegularityReport {
    let junctions: Vec<JunctionCheck> = n
        .vertices()
        .filter(|v| v.kind == VertexKind::TripleJunction)
        .map(|v| {
            let t = outward_tangents(n, v.id);
            let residual = t.iter().copied().sum::<Point2>().norm();
            JunctionCheck { vertex: v.id, residual, angles: angular_gaps(&t) }
        })
        .collect();
    let pass = junctions.iter().all(|j| j.residual < tol);
    RegularityReport { junctions, tol, pass }
}
