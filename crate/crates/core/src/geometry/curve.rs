use std::fmt;

use serde::{Deserialize, Serialize};

use super::point::Point2;
use super::stencil::fd_weights;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CurveId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Which end of a parametrized curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveEnd {
    Start,
    End,
}

impl CurveEnd {
    pub fn other(self) -> Self {
        match self {
            CurveEnd::Start => CurveEnd::End,
            CurveEnd::End => CurveEnd::Start,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveEnds {
    Open {
        start: VertexId,
        end: VertexId,
    },
    /// Periodic curve without vertices; samples do not repeat the first point.
    Closed,
}

/// Smallest number of samples accepted for an open curve (M = 4).
pub const MIN_OPEN_SAMPLES: usize = 5;
pub const MIN_CLOSED_SAMPLES: usize = 5;

/// Ordered samples of one curve with cached discrete frame.
///
/// Tangent, normal and curvature are recomputed whenever the samples change,
/// so a value of this type always satisfies |τ| = 1 and ν = Rτ.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    id: CurveId,
    ends: CurveEnds,
    pts: Vec<Point2>,
    tangent: Vec<Point2>,
    normal: Vec<Point2>,
    curvature: Vec<f64>,
    zeta: Option<Vec<f64>>,
}

impl CurveSamples {
    pub fn new(id: CurveId, ends: CurveEnds, pts: Vec<Point2>) -> Result<Self> {
        let closed = matches!(ends, CurveEnds::Closed);
        let min = if closed { MIN_CLOSED_SAMPLES } else { MIN_OPEN_SAMPLES };
        if pts.len() < min {
            return Err(Error::TooFewSamples { curve: id, count: pts.len(), min });
        }
        if let Some(bad) = pts.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvariantViolation(format!("curve {id}: sample {bad} is not finite")));
        }
        let n = pts.len();
        let chords = if closed { n } else { n - 1 };
        for j in 0..chords {
            if pts[j] == pts[(j + 1) % n] {
                return Err(Error::DegenerateCurve { curve: id, index: j });
            }
        }
        let (tangent, curvature) = frame(&pts, closed);
        let normal = tangent.iter().map(|t| t.perp()).collect();
        Ok(Self { id, ends, pts, tangent, normal, curvature, zeta: None })
    }

    /// Open curve between two vertices.
    pub fn open(id: CurveId, start: VertexId, end: VertexId, pts: Vec<Point2>) -> Result<Self> {
        Self::new(id, CurveEnds::Open { start, end }, pts)
    }

    pub fn closed(id: CurveId, pts: Vec<Point2>) -> Result<Self> {
        Self::new(id, CurveEnds::Closed, pts)
    }

    pub fn id(&self) -> CurveId {
        self.id
    }

    pub fn ends(&self) -> CurveEnds {
        self.ends
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.ends, CurveEnds::Closed)
    }

    pub fn vertex_at(&self, end: CurveEnd) -> Option<VertexId> {
        match (self.ends, end) {
            (CurveEnds::Open { start, .. }, CurveEnd::Start) => Some(start),
            (CurveEnds::Open { end, .. }, CurveEnd::End) => Some(end),
            (CurveEnds::Closed, _) => None,
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.pts
    }

    /// Number of chords, M.
    pub fn segments(&self) -> usize {
        if self.is_closed() {
            self.pts.len()
        } else {
            self.pts.len() - 1
        }
    }

    pub fn tangents(&self) -> &[Point2] {
        &self.tangent
    }

    pub fn normals(&self) -> &[Point2] {
        &self.normal
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    /// Tangential velocity per node, present only on solver output.
    pub fn zeta(&self) -> Option<&[f64]> {
        self.zeta.as_deref()
    }

    pub fn with_zeta(mut self, zeta: Vec<f64>) -> Self {
        debug_assert_eq!(zeta.len(), self.pts.len());
        self.zeta = Some(zeta);
        self
    }

    pub fn end_point(&self, end: CurveEnd) -> Point2 {
        match end {
            CurveEnd::Start => self.pts[0],
            CurveEnd::End => self.pts[self.pts.len() - 1],
        }
    }

    pub fn end_index(&self, end: CurveEnd) -> usize {
        match end {
            CurveEnd::Start => 0,
            CurveEnd::End => self.pts.len() - 1,
        }
    }

    /// Unit tangent at an end, pointing into the curve.
    pub fn outward_tangent(&self, end: CurveEnd) -> Point2 {
        match end {
            CurveEnd::Start => self.tangent[0],
            CurveEnd::End => -self.tangent[self.tangent.len() - 1],
        }
    }

    pub fn chord_lengths(&self) -> Vec<f64> {
        let n = self.pts.len();
        (0..self.segments()).map(|j| self.pts[j].distance(self.pts[(j + 1) % n])).collect()
    }

    /// Polyline length, the sum of chord lengths.
    pub fn length(&self) -> f64 {
        self.chord_lengths().iter().sum()
    }

    /// Cumulative arclength at each sample (closed curves: excludes the closing chord).
    pub fn arclength(&self) -> Vec<f64> {
        cumulative(&self.pts)
    }

    /// Arclength derivative of the curvature.
    pub fn curvature_derivative(&self) -> Vec<f64> {
        derivative_along(&self.pts, &self.curvature, self.is_closed())
    }

    pub fn with_points(&self, pts: Vec<Point2>) -> Result<Self> {
        Self::new(self.id, self.ends, pts)
    }

    pub fn map_points(&self, f: impl Fn(Point2) -> Point2) -> Result<Self> {
        let mut out = self.with_points(self.pts.iter().map(|&p| f(p)).collect())?;
        out.zeta = self.zeta.clone();
        Ok(out)
    }

    /// Same point set traversed in the opposite direction.
    pub fn reversed(&self) -> Result<Self> {
        let ends = match self.ends {
            CurveEnds::Open { start, end } => CurveEnds::Open { start: end, end: start },
            CurveEnds::Closed => CurveEnds::Closed,
        };
        let mut pts = self.pts.clone();
        pts.reverse();
        if self.is_closed() {
            pts.rotate_right(1);
        }
        Self::new(self.id, ends, pts)
    }
}

pub(crate) fn cumulative(pts: &[Point2]) -> Vec<f64> {
    let mut s = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    s.push(0.0);
    for w in pts.windows(2) {
        acc += w[0].distance(w[1]);
        s.push(acc);
    }
    s
}

/// Stencil node offsets and indices used at sample `j`.
fn stencil(pts: &[Point2], s: &[f64], j: usize, closed: bool, width: usize) -> (Vec<usize>, Vec<f64>) {
    let n = pts.len();
    if closed {
        let prev = (j + n - 1) % n;
        let next = (j + 1) % n;
        let h1 = pts[prev].distance(pts[j]);
        let h2 = pts[j].distance(pts[next]);
        return (vec![prev, j, next], vec![-h1, 0.0, h2]);
    }
    let idx: Vec<usize> = if j == 0 {
        (0..width).collect()
    } else if j == n - 1 {
        (n - width..n).collect()
    } else {
        vec![j - 1, j, j + 1]
    };
    let offs = idx.iter().map(|&k| s[k] - s[j]).collect();
    (idx, offs)
}

/// Second-order discrete tangent and curvature per node. End curvatures use
/// five-point one-sided stencils and are third order.
fn frame(pts: &[Point2], closed: bool) -> (Vec<Point2>, Vec<f64>) {
    let n = pts.len();
    let s = cumulative(pts);
    let mut tangent = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for j in 0..n {
        let (idx1, off1) = stencil(pts, &s, j, closed, 3);
        let w1 = fd_weights(0.0, &off1, 1);
        let d1: Point2 = idx1.iter().zip(&w1[1]).map(|(&k, &c)| pts[k] * c).sum();
        let (idx2, off2) = stencil(pts, &s, j, closed, n.min(5));
        let w2 = fd_weights(0.0, &off2, 2);
        let d2: Point2 = idx2.iter().zip(&w2[2]).map(|(&k, &c)| pts[k] * c).sum();
        let speed = d1.norm();
        tangent.push(d1 * (1.0 / speed));
        let d1_curv =
            if idx2.len() > idx1.len() { idx2.iter().zip(&w2[1]).map(|(&k, &c)| pts[k] * c).sum() } else { d1 };
        let speed_curv = d1_curv.norm();
        curvature.push(d1_curv.cross(d2) / (speed_curv * speed_curv * speed_curv));
    }
    (tangent, curvature)
}

/// Arclength derivative of a nodal scalar field, second order except at
/// unevenly spaced interior nodes. At the ends of an open curve with at least
/// four samples the derivative is extrapolated from the three nearest
/// interior values, so a field whose end values carry a different error than
/// its interior values still differentiates at second order.
pub(crate) fn derivative_along(pts: &[Point2], values: &[f64], closed: bool) -> Vec<f64> {
    let s = cumulative(pts);
    let n = pts.len();
    (0..n)
        .map(|j| {
            let (idx, off) = if !closed && n >= 4 && (j == 0 || j == n - 1) {
                let idx: Vec<usize> = if j == 0 { vec![1, 2, 3] } else { vec![n - 4, n - 3, n - 2] };
                let off = idx.iter().map(|&k| s[k] - s[j]).collect();
                (idx, off)
            } else {
                stencil(pts, &s, j, closed, 3)
            };
            let w = fd_weights(0.0, &off, 1);
            idx.iter().zip(&w[1]).map(|(&k, &c)| values[k] * c).sum()
        })
        .collect()
}

/// Unnormalized one-sided 3-point tangent at an end of an open polyline, given
/// the end sample and its two neighbours in order moving into the curve.
pub(crate) fn end_derivative_weights(p0: Point2, p1: Point2, p2: Point2) -> [f64; 3] {
    let s1 = p0.distance(p1);
    let s2 = s1 + p1.distance(p2);
    let w = fd_weights(0.0, &[0.0, s1, s2], 1);
    [w[1][0], w[1][1], w[1][2]]
}

/// Discrete signed curvature per sample.
pub fn curvature_profile(c: &CurveSamples) -> Vec<f64> {
    c.curvature().to_vec()
}

/// Polyline length of a curve.
pub fn length(c: &CurveSamples) -> f64 {
    c.length()
}

/// Resamples a curve to `m` chords of equal length.
///
/// New samples lie on the piecewise-cubic interpolant of the input in the
/// chord-length parameter (four-point Lagrange on each chord), so resampling
/// a smooth curve perturbs it only at fourth order in the spacing. The end
/// samples (for closed curves, the first sample) are copied bit for bit.
pub fn resample_uniform(c: &CurveSamples, m: usize) -> Result<CurveSamples> {
    let closed = c.is_closed();
    let pts = c.points();
    let n = pts.len();
    let mut ring = pts.to_vec();
    if closed {
        ring.push(pts[0]);
    }
    let s = cumulative(&ring);
    let total = *s.last().unwrap();
    // Parameter and point of node i, extended periodically for closed curves.
    let node = |i: isize| -> (f64, Point2) {
        if closed {
            let k = i.rem_euclid(n as isize) as usize;
            let wraps = i.div_euclid(n as isize) as f64;
            (s[k] + wraps * total, pts[k])
        } else {
            (s[i as usize], pts[i as usize])
        }
    };
    let eval = |u: f64| -> Point2 {
        let k = match s.binary_search_by(|v| v.partial_cmp(&u).unwrap()) {
            Ok(k) => k.min(ring.len() - 2),
            Err(k) => k.saturating_sub(1).min(ring.len() - 2),
        } as isize;
        let first = if closed { k - 1 } else { (k - 1).clamp(0, n as isize - 4) };
        let nodes: Vec<(f64, Point2)> = (first..first + 4).map(node).collect();
        let mut out = Point2::ORIGIN;
        for (a, &(sa, pa)) in nodes.iter().enumerate() {
            let mut w = 1.0;
            for (b, &(sb, _)) in nodes.iter().enumerate() {
                if a != b {
                    w *= (u - sb) / (sa - sb);
                }
            }
            out += pa * w;
        }
        out
    };

    let count = if closed { m } else { m + 1 };
    let mut u: Vec<f64> = (0..count).map(|j| total * j as f64 / m as f64).collect();
    if !closed {
        u[m] = total;
    }
    let mut q: Vec<Point2> = u.iter().map(|&v| eval(v)).collect();
    for _ in 0..100 {
        let chords: Vec<f64> = (0..m).map(|j| q[j].distance(q[(j + 1) % count])).collect();
        let sum: f64 = chords.iter().sum();
        let mean = sum / m as f64;
        let dev = chords.iter().map(|c| (c / mean - 1.0).abs()).fold(0.0, f64::max);
        if dev < 1e-13 {
            break;
        }
        let mut cum = 0.0;
        for j in 1..m {
            cum += chords[j - 1];
            u[j] += mean * j as f64 - cum;
        }
        for j in 1..m {
            u[j] = u[j].clamp(u[j - 1], total);
        }
        q = u.iter().map(|&v| eval(v)).collect();
    }
    q[0] = pts[0];
    if !closed {
        q[m] = pts[pts.len() - 1];
    }
    c.with_points(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    fn segment(a: Point2, b: Point2, m: usize) -> CurveSamples {
        let pts = (0..=m).map(|j| a.lerp(b, j as f64 / m as f64)).collect();
        CurveSamples::open(CurveId(0), VertexId(0), VertexId(1), pts).unwrap()
    }

    fn circle(r: f64, m: usize) -> CurveSamples {
        let pts = (0..m).map(|j| Point2::from_angle(TAU * j as f64 / m as f64) * r).collect();
        CurveSamples::closed(CurveId(0), pts).unwrap()
    }

    fn arc(r: f64, from: f64, to: f64, m: usize) -> CurveSamples {
        let pts = (0..=m).map(|j| Point2::from_angle(from + (to - from) * j as f64 / m as f64) * r).collect();
        CurveSamples::open(CurveId(0), VertexId(0), VertexId(1), pts).unwrap()
    }

    #[test]
    fn straight_segment_has_zero_curvature() {
        let c = segment(Point2::ORIGIN, Point2::new(1.0, 0.0), 10);
        assert!(curvature_profile(&c).iter().all(|k| k.abs() < 1e-12));
    }

    #[test]
    fn unit_circle_arc_curvature() {
        let c = arc(1.0, 0.0, PI, 200);
        for k in curvature_profile(&c) {
            assert!((k - 1.0).abs() < 1e-3, "{k}");
        }
        let c = circle(1.0, 200);
        for k in curvature_profile(&c) {
            assert!((k - 1.0).abs() < 1e-3, "{k}");
        }
    }

    #[test]
    fn clockwise_circle_is_negative() {
        let c = arc(1.0, PI, 0.0, 100);
        assert!(curvature_profile(&c).iter().all(|k| (k + 1.0).abs() < 1e-3));
    }

    #[test]
    fn parabola_apex_curvature() {
        // y = x^2/2 has κ = 1/(1+x^2)^{3/2}, so κ(0) = 1.
        let m = 100;
        let pts = (0..=m)
            .map(|j| {
                let x = -0.5 + j as f64 / m as f64;
                Point2::new(x, 0.5 * x * x)
            })
            .collect();
        let c = CurveSamples::open(CurveId(0), VertexId(0), VertexId(1), pts).unwrap();
        let k = curvature_profile(&c);
        assert!((k[m / 2] - 1.0).abs() < 1e-3);
        for (j, kj) in k.iter().enumerate() {
            let x: f64 = -0.5 + j as f64 / m as f64;
            let exact = 1.0 / (1.0 + x * x).powf(1.5);
            assert!((kj - exact).abs() < 2e-3, "j={j} {kj} vs {exact}");
        }
    }

    #[test]
    fn circle_curvature_converges_second_order() {
        let err = |m| curvature_profile(&circle(1.0, m)).iter().map(|k| (k - 1.0).abs()).fold(0.0, f64::max);
        let (e1, e2, e3) = (err(100), err(200), err(400));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
        }
    }

    #[test]
    fn frame_is_orthonormal() {
        let c = arc(2.0, 0.3, 2.0, 50);
        for (t, n) in c.tangents().iter().zip(c.normals()) {
            assert!((t.norm() - 1.0).abs() < 1e-12);
            assert!((n.norm() - 1.0).abs() < 1e-12);
            assert!(t.dot(*n).abs() < 1e-12);
        }
    }

    #[test]
    fn coincident_samples_are_rejected() {
        let pts = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(3.0, 0.0),
        ];
        let err = CurveSamples::open(CurveId(3), VertexId(0), VertexId(1), pts).unwrap_err();
        assert_eq!(err, Error::DegenerateCurve { curve: CurveId(3), index: 1 });
    }

    #[test]
    fn length_examples() {
        assert!((segment(Point2::ORIGIN, Point2::new(3.0, 4.0), 7).length() - 5.0).abs() < 1e-14);
        assert!((circle(1.0, 200).length() - TAU).abs() < 1e-3);
    }

    #[test]
    fn resample_uniform_segment_is_fixed_point() {
        let c = segment(Point2::new(-1.0, 2.0), Point2::new(3.0, -0.5), 40);
        let r = resample_uniform(&c, 40).unwrap();
        for (p, q) in c.points().iter().zip(r.points()) {
            assert!(p.distance(*q) < 1e-12);
        }
    }

    #[test]
    fn resample_clustered_segment() {
        let m = 12;
        let pts: Vec<Point2> = (0..=m)
            .map(|j| {
                let u = (1.3f64.powi(j as i32) - 1.0) / (1.3f64.powi(m as i32) - 1.0);
                Point2::new(4.0 * u, 2.0 * u)
            })
            .collect();
        let c = CurveSamples::open(CurveId(0), VertexId(0), VertexId(1), pts.clone()).unwrap();
        let r = resample_uniform(&c, 20).unwrap();
        assert_eq!(r.points().len(), 21);
        assert_eq!(r.points()[0], pts[0]);
        assert_eq!(r.points()[20], pts[m]);
        let chords = r.chord_lengths();
        let mean = chords.iter().sum::<f64>() / 20.0;
        assert!(chords.iter().all(|c| (c / mean - 1.0).abs() < 1e-6));
    }

    #[test]
    fn resample_quarter_circle_lengths() {
        let fine = arc(1.0, 0.0, FRAC_PI_2, 2000);
        let l100 = resample_uniform(&fine, 100).unwrap().length();
        let l200 = resample_uniform(&fine, 200).unwrap().length();
        assert!((l100 - FRAC_PI_2).abs() < 1e-4, "{l100}");
        assert!((l200 - FRAC_PI_2).abs() < 2.5e-5, "{l200}");
    }

    #[test]
    fn resample_curved_chords_equal() {
        let c = arc(1.0, 0.0, 2.5, 37);
        let r = resample_uniform(&c, 64).unwrap();
        let chords = r.chord_lengths();
        let mean = chords.iter().sum::<f64>() / 64.0;
        assert!(chords.iter().all(|c| (c / mean - 1.0).abs() < 1e-6));
        assert!((r.length() - c.length()).abs() < 1e-3);
        let rr = resample_uniform(&r, 64).unwrap();
        for (p, q) in r.points().iter().zip(rr.points()) {
            assert!(p.distance(*q) < 1e-9);
        }
        assert!((resample_uniform(&r, 64).unwrap().length() - r.length()).abs() < 1e-9);
    }

    #[test]
    fn resample_closed_curve() {
        let pts: Vec<Point2> = (0..90)
            .map(|j| {
                let t = TAU * (j as f64 / 90.0).powf(1.4);
                Point2::new(2.0 * t.cos(), t.sin())
            })
            .collect();
        let c = CurveSamples::closed(CurveId(0), pts.clone()).unwrap();
        let r = resample_uniform(&c, 120).unwrap();
        assert_eq!(r.points().len(), 120);
        assert_eq!(r.points()[0], pts[0]);
        let chords = r.chord_lengths();
        let mean = chords.iter().sum::<f64>() / 120.0;
        assert!(chords.iter().all(|c| (c / mean - 1.0).abs() < 1e-6));
    }

    #[test]
    fn reversal_flips_curvature_keeps_derivative() {
        let c = arc(1.5, 0.2, 2.2, 60);
        let pts: Vec<Point2> =
            c.points().iter().enumerate().map(|(j, p)| *p + Point2::new(0.0, 0.01 * (j as f64 * 0.1).sin())).collect();
        let c = c.with_points(pts).unwrap();
        let r = c.reversed().unwrap();
        let n = c.points().len();
        let (k, dk) = (c.curvature(), c.curvature_derivative());
        let (kr, dkr) = (r.curvature(), r.curvature_derivative());
        for j in 0..n {
            assert!((k[j] + kr[n - 1 - j]).abs() < 1e-9);
            assert!((dk[j] - dkr[n - 1 - j]).abs() < 1e-7);
        }
    }
}
