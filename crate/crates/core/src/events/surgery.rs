use std::f64::consts::{FRAC_PI_3, PI};

use crate::error::{Error, Result};
use crate::geometry::{
    angular_gaps, end_derivative_weights, resample_uniform, signed_angle, wrap_angle, CurveEnd, CurveEnds, CurveId,
    CurveSamples, Network, Point2, Vertex, VertexId, VertexKind,
};

/// Tunables shared by the surgery operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurgeryOptions {
    /// Collapse is refused for curves at least this long.
    pub min_length_eps: f64,
    /// Allowed deviation of the four-point sector angles from 60°/120°, in radians.
    pub opening_tol: f64,
}

impl SurgeryOptions {
    pub fn new(min_length_eps: f64) -> Self {
        Self { min_length_eps, opening_tol: 0.1 }
    }
}

/// Below this misalignment (radians) an end tangent is left untouched.
const ALIGNED: f64 = 1e-13;

/// Moves the `end` sample of `c` so that the discrete end tangent points along
/// `dir` (outward, into the curve).
///
/// Only the neighbouring sample is moved, perpendicular to `dir`.
pub fn impose_end_tangent(c: &CurveSamples, end: CurveEnd, dir: Point2) -> Result<CurveSamples> {
    let dir = dir.normalized();
    let perp = dir.perp();
    let mut pts = c.points().to_vec();
    let n = pts.len();
    let (i0, i1, i2) = match end {
        CurveEnd::Start => (0, 1, 2),
        CurveEnd::End => (n - 1, n - 2, n - 3),
    };
    for _ in 0..50 {
        let w = end_derivative_weights(pts[i0], pts[i1], pts[i2]);
        let t = pts[i0] * w[0] + pts[i1] * w[1] + pts[i2] * w[2];
        let off = t.dot(perp);
        if off.abs() <= 1e-16 * t.norm() {
            break;
        }
        pts[i1] -= perp * (off / w[1]);
    }
    let out = c.with_points(pts)?;
    let got = out.outward_tangent(end);
    if got.dot(dir) <= 0.0 {
        return Err(Error::InvariantViolation(format!("cannot align end tangent of {}", c.id())));
    }
    Ok(out)
}

fn smoothstep_down(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else {
        1.0 - u * u * (3.0 - 2.0 * u)
    }
}

/// Rebuilds an arm whose `end` is moved to `target_point` and re-attached to
/// `vertex`, with outward end tangent `target_dir`.
///
/// The displacement and rotation are blended over arclength `blend` from the end.
fn rebuild_arm(
    c: &CurveSamples,
    end: CurveEnd,
    vertex: VertexId,
    target_point: Point2,
    target_dir: Point2,
    blend: f64,
) -> Result<CurveSamples> {
    let mut pts = c.points().to_vec();
    if end == CurveEnd::End {
        pts.reverse();
    }
    let shift = target_point - pts[0];
    let theta = signed_angle(c.outward_tangent(end), target_dir);
    let mut s = 0.0;
    let mut prev = pts[0];
    for p in pts.iter_mut() {
        s += prev.distance(*p);
        prev = *p;
        let w = smoothstep_down(s / blend);
        if w == 0.0 {
            break;
        }
        let moved = *p + shift * w;
        *p = target_point + (moved - target_point).rotate(theta * w);
    }
    pts[0] = target_point;
    if end == CurveEnd::End {
        pts.reverse();
    }
    let ends = match c.ends() {
        CurveEnds::Open { start, end: e } => match end {
            CurveEnd::Start => CurveEnds::Open { start: vertex, end: e },
            CurveEnd::End => CurveEnds::Open { start, end: vertex },
        },
        CurveEnds::Closed => return Err(Error::InvariantViolation("closed curve has no ends".into())),
    };
    let rebuilt = CurveSamples::new(c.id(), ends, pts)?;
    let rebuilt = resample_uniform(&rebuilt, c.segments())?;
    impose_end_tangent(&rebuilt, end, target_dir)
}

fn blend_length(arm: &CurveSamples, scale: f64) -> f64 {
    let h = arm.length() / arm.segments() as f64;
    (6.0 * scale).max(4.0 * h).min(0.4 * arm.length())
}

fn end_of(c: &CurveSamples, v: VertexId) -> CurveEnd {
    if c.vertex_at(CurveEnd::Start) == Some(v) {
        CurveEnd::Start
    } else {
        CurveEnd::End
    }
}

fn midpoint_along(c: &CurveSamples) -> Point2 {
    let s = c.arclength();
    let half = s[s.len() - 1] / 2.0;
    let k = s.partition_point(|v| *v < half).clamp(1, s.len() - 1);
    let p = c.points();
    let span = s[k] - s[k - 1];
    p[k - 1].lerp(p[k], if span > 0.0 { (half - s[k - 1]) / span } else { 0.0 })
}

/// Removes a short inner curve and merges its two junctions into a four-point
/// at the curve's midpoint.
///
/// Returns the new network and the id of the four-point (the smaller of the
/// two junction ids). The four arms are reshaped near the merged vertex so
/// that they form two pairs of opposite tangents.
pub fn collapse_interior(n: &Network, curve: CurveId, opts: &SurgeryOptions) -> Result<(Network, VertexId)> {
    let c = n.curve(curve)?;
    let (a, b) = match c.ends() {
        CurveEnds::Open { start, end } => (start, end),
        CurveEnds::Closed => return Err(Error::NotInnerCurve(curve)),
    };
    let junction = |v| n.vertex(v).map(|v| v.kind == VertexKind::TripleJunction);
    if a == b || !junction(a)? || !junction(b)? {
        return Err(Error::NotInnerCurve(curve));
    }
    let length = c.length();
    if length >= opts.min_length_eps {
        return Err(Error::NotShortEnough { curve, length, eps: opts.min_length_eps });
    }
    let mid = midpoint_along(c);
    let merged = a.min(b);
    let arms: Vec<(CurveId, VertexId)> = [a, b]
        .iter()
        .flat_map(|&v| n.incident(v).into_iter().filter(|i| i.curve != curve).map(move |i| (i.curve, v)))
        .collect();
    let (mut vertices, mut curves, domain) = n.clone().into_parts();
    curves.remove(&curve);
    vertices.remove(&a);
    vertices.remove(&b);
    vertices.insert(merged, Vertex::new(merged, VertexKind::QuadruplePoint, mid));
    for (id, v) in arms {
        let arm = &curves[&id];
        let end = end_of(arm, v);
        let shift = mid.distance(arm.end_point(end));
        let rebuilt = rebuild_arm(arm, end, merged, mid, arm.outward_tangent(end), blend_length(arm, shift))?;
        curves.insert(id, rebuilt);
    }
    let out = Network::from_parts(vertices, curves, domain)?;
    Ok((reproject_four_point(&out, merged)?, merged))
}

/// Adjusts the arms at a four-point so that their end tangents form two exactly
/// opposite pairs. Applying it twice gives the same network as applying it once.
pub fn reproject_four_point(n: &Network, v: VertexId) -> Result<Network> {
    if n.vertex(v)?.kind != VertexKind::QuadruplePoint {
        return Err(Error::NotFourPoint(v));
    }
    let arms = sorted_arms(n, v);
    if arms.len() != 4 {
        return Err(Error::NotFourPoint(v));
    }
    let pos = n.vertex(v)?.position;
    let mut targets = [Point2::ORIGIN; 4];
    for k in 0..2 {
        let d = (arms[k].2 - arms[k + 2].2).normalized();
        targets[k] = d;
        targets[k + 2] = -d;
    }
    let mut out = n.clone();
    for (k, &(id, end, t)) in arms.iter().enumerate() {
        if signed_angle(t, targets[k]).abs() < ALIGNED {
            continue;
        }
        let arm = out.curve(id)?;
        let blend = blend_length(arm, 0.0);
        let rebuilt = rebuild_arm(arm, end, v, pos, targets[k], blend)?;
        out.replace_curve(rebuilt);
    }
    out.validate_structure()?;
    Ok(out)
}

/// Incident arms of `v` sorted counterclockwise by outward tangent angle.
fn sorted_arms(n: &Network, v: VertexId) -> Vec<(CurveId, CurveEnd, Point2)> {
    let mut arms: Vec<(CurveId, CurveEnd, Point2)> = n
        .incident(v)
        .into_iter()
        .map(|i| (i.curve, i.end, n.curve(i.curve).expect("incident curve").outward_tangent(i.end)))
        .collect();
    arms.sort_by(|x, y| wrap_angle(x.2.angle()).total_cmp(&wrap_angle(y.2.angle())));
    arms
}

/// Resolves a four-point by inserting a new straight curve of length `delta`
/// that pairs the arms across the two 60° sectors.
///
/// `delta == 0` returns the input unchanged. The new curve gets the next free
/// curve id and starts at a new vertex; the four-point id is reused for the
/// other new junction.
pub fn reopen_cross(n: &Network, v: VertexId, delta: f64, opts: &SurgeryOptions) -> Result<Network> {
    if n.vertex(v)?.kind != VertexKind::QuadruplePoint {
        return Err(Error::NotFourPoint(v));
    }
    if delta == 0.0 {
        return Ok(n.clone());
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidConfig(format!("opening length must be positive, got {delta}")));
    }
    let arms = sorted_arms(n, v);
    let dirs: Vec<Point2> = arms.iter().map(|a| a.2).collect();
    let gaps = angular_gaps(&dirs);
    let near = |g: f64, target: f64| (g - target).abs() < opts.opening_tol;
    let first = (0..2).find(|&k| {
        near(gaps[k], FRAC_PI_3)
            && near(gaps[k + 2], FRAC_PI_3)
            && near(gaps[k + 1], 2.0 * FRAC_PI_3)
            && near(gaps[(k + 3) % 4], 2.0 * FRAC_PI_3)
    });
    let Some(k) = first else {
        return Err(Error::NoAdmissibleOpening(v));
    };
    let limit = arms
        .iter()
        .map(|a| n.curve(a.0).map(|c| c.length()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        / 2.0;
    if delta >= limit {
        return Err(Error::DeltaTooLarge { delta, limit });
    }
    let pos = n.vertex(v)?.position;
    let e = (dirs[k] + dirs[k + 1]).normalized();
    let p_near = pos + e * (delta / 2.0);
    let p_far = pos - e * (delta / 2.0);
    let far = n.next_vertex_id();
    let stub_id = n.next_curve_id();
    let m = n.curve(arms[0].0)?.segments();

    let (mut vertices, mut curves, domain) = n.clone().into_parts();
    vertices.insert(v, Vertex::new(v, VertexKind::TripleJunction, p_near));
    vertices.insert(far, Vertex::new(far, VertexKind::TripleJunction, p_far));
    // Arms k, k+1 go to the near junction, the others to the far one. Each
    // gets the direction at ±60° from the stub's continuation.
    let rot = FRAC_PI_3;
    let plan = [
        (k, v, p_near, e.rotate(-rot)),
        (k + 1, v, p_near, e.rotate(rot)),
        (k + 2, far, p_far, (-e).rotate(-rot)),
        ((k + 3) % 4, far, p_far, (-e).rotate(rot)),
    ];
    for (idx, vid, p, dir) in plan {
        let (id, end, _) = arms[idx];
        let arm = &curves[&id];
        let blend = blend_length(arm, 0.5 * delta);
        let rebuilt = rebuild_arm(arm, end, vid, p, dir, blend)?;
        curves.insert(id, rebuilt);
    }
    let mut stub_pts: Vec<Point2> = (0..=m).map(|j| p_far.lerp(p_near, j as f64 / m as f64)).collect();
    stub_pts[m] = p_near;
    curves.insert(stub_id, CurveSamples::open(stub_id, far, v, stub_pts)?);
    Network::from_parts(vertices, curves, domain)
}

/// Removes a short curve joining a fixed endpoint to a triple junction. The
/// junction's two other arms are re-attached to the endpoint at 120°.
pub fn collapse_boundary(n: &Network, curve: CurveId, opts: &SurgeryOptions) -> Result<(Network, VertexId)> {
    let c = n.curve(curve)?;
    let (a, b) = match c.ends() {
        CurveEnds::Open { start, end } => (start, end),
        CurveEnds::Closed => return Err(Error::NotBoundaryCurve(curve)),
    };
    let (ka, kb) = (n.vertex(a)?.kind, n.vertex(b)?.kind);
    let (fixed, junction) = match (ka, kb) {
        (VertexKind::FixedEndpoint, VertexKind::TripleJunction) => (a, b),
        (VertexKind::TripleJunction, VertexKind::FixedEndpoint) => (b, a),
        _ => return Err(Error::NotBoundaryCurve(curve)),
    };
    if n.valence(fixed) != 1 {
        return Err(Error::NotBoundaryCurve(curve));
    }
    let length = c.length();
    if length >= opts.min_length_eps {
        return Err(Error::NotShortEnough { curve, length, eps: opts.min_length_eps });
    }
    let p = n.vertex(fixed)?.position;
    let arms: Vec<(CurveId, CurveEnd, Point2)> = n
        .incident(junction)
        .into_iter()
        .filter(|i| i.curve != curve)
        .map(|i| (i.curve, i.end, n.curve(i.curve).expect("incident curve").outward_tangent(i.end)))
        .collect();
    let bis = (arms[0].2 + arms[1].2).normalized();
    let targets = if signed_angle(bis, arms[0].2) >= 0.0 {
        [bis.rotate(FRAC_PI_3), bis.rotate(-FRAC_PI_3)]
    } else {
        [bis.rotate(-FRAC_PI_3), bis.rotate(FRAC_PI_3)]
    };
    let (mut vertices, mut curves, domain) = n.clone().into_parts();
    curves.remove(&curve);
    vertices.remove(&junction);
    for (k, &(id, end, _)) in arms.iter().enumerate() {
        let arm = &curves[&id];
        let shift = p.distance(arm.end_point(end));
        let blend = blend_length(arm, shift);
        let rebuilt = rebuild_arm(arm, end, fixed, p, targets[k], blend)?;
        curves.insert(id, rebuilt);
    }
    Ok((Network::from_parts(vertices, curves, domain)?, fixed))
}

/// Reopens a two-valent fixed endpoint: a new junction is placed at distance
/// `delta` along the bisector of the two arms and joined to the endpoint by a
/// straight curve.
pub fn reopen_boundary(n: &Network, p: VertexId, delta: f64, opts: &SurgeryOptions) -> Result<Network> {
    let vertex = n.vertex(p)?;
    if vertex.kind != VertexKind::FixedEndpoint || n.valence(p) != 2 {
        return Err(Error::NotCollapsedEndpoint(p));
    }
    let arms: Vec<(CurveId, CurveEnd, Point2)> = n
        .incident(p)
        .into_iter()
        .map(|i| (i.curve, i.end, n.curve(i.curve).expect("incident curve").outward_tangent(i.end)))
        .collect();
    let gap = arms[0].2.dot(arms[1].2).clamp(-1.0, 1.0).acos();
    if (gap - 2.0 * PI / 3.0).abs() > opts.opening_tol {
        return Err(Error::NotCollapsedEndpoint(p));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidConfig(format!("opening length must be positive, got {delta}")));
    }
    let pos = vertex.position;
    let incident: Vec<CurveId> = arms.iter().map(|a| a.0).collect();
    let mut limit = f64::INFINITY;
    for c in n.curves() {
        if incident.contains(&c.id()) {
            limit = limit.min(c.length() / 2.0);
        } else {
            for q in c.points() {
                limit = limit.min(q.distance(pos));
            }
        }
    }
    if delta >= limit {
        return Err(Error::DeltaTooLarge { delta, limit });
    }
    let bis = (arms[0].2 + arms[1].2).normalized();
    let j = pos + bis * delta;
    let jid = n.next_vertex_id();
    let stub_id = n.next_curve_id();
    let m = n.curve(arms[0].0)?.segments();
    let (mut vertices, mut curves, domain) = n.clone().into_parts();
    vertices.insert(jid, Vertex::new(jid, VertexKind::TripleJunction, j));
    for &(id, end, t) in &arms {
        let target = if signed_angle(bis, t) >= 0.0 { bis.rotate(FRAC_PI_3) } else { bis.rotate(-FRAC_PI_3) };
        let arm = &curves[&id];
        let blend = blend_length(arm, 0.5 * delta);
        let rebuilt = rebuild_arm(arm, end, jid, j, target, blend)?;
        curves.insert(id, rebuilt);
    }
    let mut stub_pts: Vec<Point2> = (0..=m).map(|k| j.lerp(pos, k as f64 / m as f64)).collect();
    stub_pts[m] = pos;
    curves.insert(stub_id, CurveSamples::open(stub_id, jid, p, stub_pts)?);
    Network::from_parts(vertices, curves, domain)
}
