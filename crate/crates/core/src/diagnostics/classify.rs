use serde::{Deserialize, Serialize};

use super::rescale::RescaledSnapshot;
use crate::geometry::{wrap_angle, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangentFlowKind {
    Empty,
    Halfline,
    Line,
    Triod,
    TwoHalflines120,
    Cross,
    Unclassified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentFlowClass {
    pub kind: TangentFlowKind,
    pub density: f64,
    /// RMS of κ + ⟨p, ν⟩ over B_R after normalizing to τ = −1/2.
    pub shrinker_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub radius: f64,
    pub tol_shrink: f64,
    /// Allowed deviation from antipodal and from radial for cross arms, in radians.
    pub arm_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { radius: 10.0, tol_shrink: 0.05, arm_tol: 0.05 }
    }
}

pub fn classify_tangent_flow(snap: &RescaledSnapshot, probe_on_boundary: bool) -> TangentFlowClass {
    classify_with(snap, probe_on_boundary, &ClassifyOptions::default())
}

pub fn classify_with(snap: &RescaledSnapshot, probe_on_boundary: bool, opts: &ClassifyOptions) -> TangentFlowClass {
    let sigma = snap.sigma();
    if !(sigma > 0.0) {
        return TangentFlowClass {
            kind: TangentFlowKind::Unclassified,
            density: f64::NAN,
            shrinker_residual: f64::NAN,
        };
    }
    let r = opts.radius;
    let mut density = 0.0;
    let mut res2 = 0.0;
    let mut weight = 0.0;
    let norm = (2.0 * sigma).sqrt();
    for c in snap.network.curves() {
        let p = c.points();
        let m = p.len();
        let chords = if c.is_closed() { m } else { m - 1 };
        let inside: Vec<bool> = (0..chords).map(|j| p[j].lerp(p[(j + 1) % m], 0.5).norm() <= r).collect();
        for j in (0..chords).filter(|&j| inside[j]) {
            density += super::density::density_at_sigma_segment(p[j], p[(j + 1) % m], sigma);
        }
        let (r2, w) = windowed_shrinker_residual(p, chords, &inside, norm);
        res2 += r2;
        weight += w;
    }
    let shrinker_residual = if weight > 0.0 { (res2 / weight).sqrt() } else { 0.0 };
    let bucket = |lo: f64, hi: f64| density >= lo && density < hi;
    let shrinker = shrinker_residual < opts.tol_shrink;
    let kind = if bucket(0.0, 0.25) {
        TangentFlowKind::Empty
    } else if !shrinker {
        TangentFlowKind::Unclassified
    } else if bucket(0.25, 0.75) {
        if probe_on_boundary {
            TangentFlowKind::Halfline
        } else {
            TangentFlowKind::Unclassified
        }
    } else if bucket(0.75, 1.25) {
        TangentFlowKind::Line
    } else if bucket(1.25, 1.75) {
        if probe_on_boundary {
            TangentFlowKind::TwoHalflines120
        } else {
            TangentFlowKind::Triod
        }
    } else if bucket(1.75, 2.25) {
        if cross_arms(snap, r / 2.0, opts.arm_tol) {
            TangentFlowKind::Cross
        } else {
            TangentFlowKind::Unclassified
        }
    } else {
        TangentFlowKind::Unclassified
    };
    TangentFlowClass { kind, density, shrinker_residual }
}

/// Weak form of `κ + <x,ν>/(2σ) = 0` averaged over runs of consecutive chords
/// about half a parabolic length long. The turning angle between the first
/// and last chord of a run replaces the pointwise curvature, so sample noise
/// at the scale of the spacing does not dominate. Returns the weighted sum of
/// squared window means and the total weight.
fn windowed_shrinker_residual(p: &[Point2], chords: usize, inside: &[bool], norm: f64) -> (f64, f64) {
    let m = p.len();
    let chord = |j: usize| (p[j], p[(j + 1) % m]);
    let target = 0.5 * norm;
    let (mut res2, mut weight) = (0.0, 0.0);
    let mut j = 0;
    while j < chords {
        if !inside[j] {
            j += 1;
            continue;
        }
        let start = j;
        let mut len = 0.0;
        let mut end = j;
        while end < chords && inside[end] {
            let (a, b) = chord(end);
            len += a.distance(b);
            end += 1;
            if len >= target {
                break;
            }
        }
        // Run of chords [start, end): integrate from the first to the last chord midpoint.
        let (mut ell, mut support) = (0.0, 0.0);
        for i in start..end {
            let (a, b) = chord(i);
            let h = a.distance(b);
            let half = if end - start == 1 {
                1.0
            } else if i == start || i + 1 == end {
                0.5
            } else {
                1.0
            };
            let nu = (b - a).normalized().perp();
            support += half * h * a.lerp(b, 0.5).dot(nu);
            ell += half * h;
        }
        let (a0, b0) = chord(start);
        let (a1, b1) = chord(end - 1);
        let turn = (b0 - a0).cross(b1 - a1).atan2((b0 - a0).dot(b1 - a1));
        if ell > 0.0 {
            let mean = (norm * turn + support / norm) / ell;
            res2 += ell / norm * mean * mean;
            weight += ell / norm;
        }
        j = end;
    }
    (res2, weight)
}

/// Exactly four radial crossings of the circle of radius `rho`, forming two
/// antipodal pairs.
fn cross_arms(snap: &RescaledSnapshot, rho: f64, tol: f64) -> bool {
    let mut hits: Vec<f64> = Vec::new();
    for c in snap.network.curves() {
        let p = c.points();
        let m = p.len();
        let chords = if c.is_closed() { m } else { m - 1 };
        for j in 0..chords {
            let (a, b) = (p[j], p[(j + 1) % m]);
            let (ra, rb) = (a.norm(), b.norm());
            let (da, db) = (ra - rho, rb - rho);
            // A crossing exactly at a sample is counted once, on the chord it starts.
            if da * db > 0.0 || db == 0.0 || da == db {
                continue;
            }
            let u = (rho - ra) / (rb - ra);
            let x = a.lerp(b, u);
            let dir = (b - a).normalized();
            if dir.cross(x.normalized()).abs() > tol.sin() {
                return false;
            }
            hits.push(wrap_angle(x.angle()));
        }
    }
    if hits.len() != 4 {
        return false;
    }
    hits.sort_by(f64::total_cmp);
    (0..2).all(|k| {
        let d = Point2::from_angle(hits[k]).dot(Point2::from_angle(hits[k + 2]));
        d < -tol.cos()
    })
}
