use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::curve::{CurveEnd, CurveEnds, CurveId, CurveSamples, VertexId};
use super::domain::ConvexDomain;
use super::point::Point2;
use crate::error::{Error, Result};

/// Tolerance for curve ends meeting their vertex.
pub const ENDPOINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// End pinned on the domain boundary. Valence 1, or 2 right after a
    /// boundary collapse.
    FixedEndpoint,
    TripleJunction,
    /// Transient four-valent vertex left by the collapse of an inner curve.
    QuadruplePoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
    pub position: Point2,
}

impl Vertex {
    pub fn new(id: VertexId, kind: VertexKind, position: Point2) -> Self {
        Self { id, kind, position }
    }
}

/// A curve end attached to a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub curve: CurveId,
    pub end: CurveEnd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    vertices: BTreeMap<VertexId, Vertex>,
    curves: BTreeMap<CurveId, CurveSamples>,
    domain: ConvexDomain,
}

impl Network {
    /// Builds a network, checking its structural invariants.
    ///
    /// Singular states produced by surgery (four-points, two-valent fixed
    /// endpoints) are accepted here; [`Network::validate_regular`] rejects them.
    pub fn new(vertices: Vec<Vertex>, curves: Vec<CurveSamples>, domain: ConvexDomain) -> Result<Self> {
        let mut vmap = BTreeMap::new();
        for v in vertices {
            if vmap.insert(v.id, v).is_some() {
                return Err(Error::InvariantViolation(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut cmap = BTreeMap::new();
        for c in curves {
            let id = c.id();
            if cmap.insert(id, c).is_some() {
                return Err(Error::InvariantViolation(format!("duplicate curve id {id}")));
            }
        }
        let n = Self { vertices: vmap, curves: cmap, domain };
        n.validate_structure()?;
        Ok(n)
    }

    pub(crate) fn from_parts(
        vertices: BTreeMap<VertexId, Vertex>,
        curves: BTreeMap<CurveId, CurveSamples>,
        domain: ConvexDomain,
    ) -> Result<Self> {
        let n = Self { vertices, curves, domain };
        n.validate_structure()?;
        Ok(n)
    }

    pub(crate) fn into_parts(self) -> (BTreeMap<VertexId, Vertex>, BTreeMap<CurveId, CurveSamples>, ConvexDomain) {
        (self.vertices, self.curves, self.domain)
    }

    /// Network made of one closed curve, used for analytic validation.
    pub fn closed_curve(curve: CurveSamples, domain: ConvexDomain) -> Result<Self> {
        if !curve.is_closed() {
            return Err(Error::InvariantViolation("expected a closed curve".into()));
        }
        Self::new(Vec::new(), vec![curve], domain)
    }

    pub fn validate_structure(&self) -> Result<()> {
        self.domain.validate()?;
        if self.curves.is_empty() {
            return Err(Error::InvariantViolation("network has no curves".into()));
        }
        let closed = self.curves.values().filter(|c| c.is_closed()).count();
        if closed > 0 && (self.curves.len() > 1 || !self.vertices.is_empty()) {
            return Err(Error::InvariantViolation("closed curves must form a network on their own".into()));
        }
        for c in self.curves.values() {
            for end in [CurveEnd::Start, CurveEnd::End] {
                let Some(vid) = c.vertex_at(end) else { continue };
                let v = self.vertices.get(&vid).ok_or_else(|| {
                    Error::InvariantViolation(format!("curve {} references missing vertex {vid}", c.id()))
                })?;
                let gap = c.end_point(end).distance(v.position);
                if gap > ENDPOINT_TOL {
                    return Err(Error::InvariantViolation(format!(
                        "curve {} end misses vertex {vid} by {gap:e}",
                        c.id()
                    )));
                }
            }
        }
        for v in self.vertices.values() {
            let valence = self.valence(v.id);
            let ok = match v.kind {
                VertexKind::FixedEndpoint => valence == 1 || valence == 2,
                VertexKind::TripleJunction => valence == 3,
                VertexKind::QuadruplePoint => valence == 4,
            };
            if !ok {
                return Err(Error::InvariantViolation(format!(
                    "vertex {} of kind {:?} has valence {valence}",
                    v.id, v.kind
                )));
            }
        }
        if !self.is_connected() {
            return Err(Error::NotConnected);
        }
        Ok(())
    }

    /// Checks the invariants of a regular network: fixed endpoints of valence
    /// one and triple junctions only.
    pub fn validate_regular(&self) -> Result<()> {
        self.validate_structure()?;
        for v in self.vertices.values() {
            let valence = self.valence(v.id);
            let ok = match v.kind {
                VertexKind::FixedEndpoint => valence == 1,
                VertexKind::TripleJunction => valence == 3,
                VertexKind::QuadruplePoint => false,
            };
            if !ok {
                return Err(Error::InvariantViolation(format!(
                    "vertex {} ({:?}, valence {valence}) is not allowed in a regular network",
                    v.id, v.kind
                )));
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &ConvexDomain {
        &self.domain
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.values()
    }

    pub fn curves(&self) -> impl Iterator<Item = &CurveSamples> {
        self.curves.values()
    }

    pub fn curve_ids(&self) -> Vec<CurveId> {
        self.curves.keys().copied().collect()
    }

    pub fn vertex(&self, id: VertexId) -> Result<&Vertex> {
        self.vertices.get(&id).ok_or(Error::UnknownVertex(id))
    }

    pub fn curve(&self, id: CurveId) -> Result<&CurveSamples> {
        self.curves.get(&id).ok_or(Error::UnknownCurve(id))
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_closed_curve(&self) -> bool {
        self.curves.len() == 1 && self.curves.values().all(|c| c.is_closed())
    }

    /// Curve ends attached to a vertex, in curve-id order.
    pub fn incident(&self, v: VertexId) -> Vec<Incidence> {
        let mut out = Vec::new();
        for c in self.curves.values() {
            for end in [CurveEnd::Start, CurveEnd::End] {
                if c.vertex_at(end) == Some(v) {
                    out.push(Incidence { curve: c.id(), end });
                }
            }
        }
        out
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.incident(v).len()
    }

    pub fn vertices_of_kind(&self, kind: VertexKind) -> Vec<VertexId> {
        self.vertices.values().filter(|v| v.kind == kind).map(|v| v.id).collect()
    }

    pub fn lengths(&self) -> Vec<(CurveId, f64)> {
        self.curves.values().map(|c| (c.id(), c.length())).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.curves.values().map(CurveSamples::length).sum()
    }

    pub fn next_curve_id(&self) -> CurveId {
        CurveId(self.curves.keys().next_back().map_or(0, |c| c.0 + 1))
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.vertices.keys().next_back().map_or(0, |v| v.0 + 1))
    }

    pub fn all_points(&self) -> impl Iterator<Item = Point2> + '_ {
        self.curves.values().flat_map(|c| c.points().iter().copied())
    }

    /// Smallest and mean chord length over all curves.
    pub fn spacing(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut sum = 0.0;
        let mut count = 0usize;
        for c in self.curves.values() {
            for h in c.chord_lengths() {
                min = min.min(h);
                sum += h;
                count += 1;
            }
        }
        (min, sum / count as f64)
    }

    /// Applies `map` to every sample and vertex; the domain is replaced.
    pub fn transformed(&self, map: impl Fn(Point2) -> Point2, domain: ConvexDomain) -> Result<Self> {
        let vertices = self.vertices.iter().map(|(&id, v)| (id, Vertex { position: map(v.position), ..*v })).collect();
        let curves = self.curves.iter().map(|(&id, c)| c.map_points(&map).map(|c| (id, c))).collect::<Result<_>>()?;
        Self::from_parts(vertices, curves, domain)
    }

    /// Image under p ↦ scale · R(rotation) p + shift.
    pub fn similarity(&self, scale: f64, rotation: f64, shift: Point2) -> Result<Self> {
        let domain = self.domain.transformed(scale, rotation, shift);
        self.transformed(|p| p.rotate(rotation) * scale + shift, domain)
    }

    /// Maximum over samples of the distance to the domain (0 when inside).
    pub fn max_domain_excursion(&self) -> f64 {
        self.all_points()
            .map(|p| {
                let mut lo = 0.0;
                let mut hi = 1.0;
                if self.domain.contains(p, 0.0) {
                    return 0.0;
                }
                while !self.domain.contains(p, hi) {
                    hi *= 2.0;
                }
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.domain.contains(p, mid) {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            })
            .fold(0.0, f64::max)
    }

    pub(crate) fn replace_curve(&mut self, curve: CurveSamples) {
        self.curves.insert(curve.id(), curve);
    }

    fn is_connected(&self) -> bool {
        let mut nodes: Vec<VertexId> = self.vertices.keys().copied().collect();
        if nodes.is_empty() {
            return self.curves.len() == 1;
        }
        nodes.sort();
        let index = |v: VertexId| nodes.binary_search(&v).unwrap();
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for c in self.curves.values() {
            if let CurveEnds::Open { start, end } = c.ends() {
                let (a, b) = (find(&mut parent, index(start)), find(&mut parent, index(end)));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..nodes.len()).all(|i| find(&mut parent, i) == root)
    }
}

/// Symmetric Hausdorff distance between the polylines of two networks.
pub fn hausdorff_distance(a: &Network, b: &Network) -> f64 {
    fn one_sided(from: &Network, to: &Network) -> f64 {
        let segs: Vec<(Point2, Point2)> = to
            .curves()
            .flat_map(|c| {
                let p = c.points();
                let n = p.len();
                (0..c.segments()).map(move |j| (p[j], p[(j + 1) % n]))
            })
            .collect();
        from.all_points()
            .map(|q| segs.iter().map(|&(s0, s1)| point_segment_distance(q, s0, s1)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
    one_sided(a, b).max(one_sided(b, a))
}

pub fn point_segment_distance(q: Point2, a: Point2, b: Point2) -> f64 {
    let e = b - a;
    let t = ((q - a).dot(e) / e.norm_sq()).clamp(0.0, 1.0);
    q.distance(a + e * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(id: usize, s: usize, e: usize, a: Point2, b: Point2) -> CurveSamples {
        let pts = (0..=8).map(|j| a.lerp(b, j as f64 / 8.0)).collect();
        CurveSamples::open(CurveId(id), VertexId(s), VertexId(e), pts).unwrap()
    }

    fn disk() -> ConvexDomain {
        ConvexDomain::disk(Point2::ORIGIN, 2.0).unwrap()
    }

    #[test]
    fn four_valent_junction_rejected() {
        let o = Point2::ORIGIN;
        let ends: Vec<Point2> = (0..4).map(|k| Point2::from_angle(k as f64 * 1.5)).collect();
        let mut vs = vec![Vertex::new(VertexId(0), VertexKind::TripleJunction, o)];
        let mut cs = Vec::new();
        for (k, p) in ends.iter().enumerate() {
            vs.push(Vertex::new(VertexId(k + 1), VertexKind::FixedEndpoint, *p));
            cs.push(seg(k, 0, k + 1, o, *p));
        }
        let err = Network::new(vs, cs, disk()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation(ref m) if m.contains("v0")), "{err}");
    }

    #[test]
    fn disconnected_rejected() {
        let vs = vec![
            Vertex::new(VertexId(0), VertexKind::FixedEndpoint, Point2::new(0.0, 0.0)),
            Vertex::new(VertexId(1), VertexKind::FixedEndpoint, Point2::new(1.0, 0.0)),
            Vertex::new(VertexId(2), VertexKind::FixedEndpoint, Point2::new(0.0, 1.0)),
            Vertex::new(VertexId(3), VertexKind::FixedEndpoint, Point2::new(1.0, 1.0)),
        ];
        let cs = vec![
            seg(0, 0, 1, Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)),
            seg(1, 2, 3, Point2::new(0.0, 1.0), Point2::new(1.0, 1.0)),
        ];
        assert_eq!(Network::new(vs, cs, disk()).unwrap_err(), Error::NotConnected);
    }

    #[test]
    fn endpoint_mismatch_rejected() {
        let vs = vec![
            Vertex::new(VertexId(0), VertexKind::FixedEndpoint, Point2::new(0.0, 0.0)),
            Vertex::new(VertexId(1), VertexKind::FixedEndpoint, Point2::new(1.0, 1e-9)),
        ];
        let cs = vec![seg(0, 0, 1, Point2::new(0.0, 0.0), Point2::new(1.0, 0.0))];
        assert!(Network::new(vs, cs, disk()).is_err());
    }

    #[test]
    fn hausdorff_of_parallel_segments() {
        let mk = |y: f64| {
            let vs = vec![
                Vertex::new(VertexId(0), VertexKind::FixedEndpoint, Point2::new(0.0, y)),
                Vertex::new(VertexId(1), VertexKind::FixedEndpoint, Point2::new(1.0, y)),
            ];
            Network::new(vs, vec![seg(0, 0, 1, Point2::new(0.0, y), Point2::new(1.0, y))], disk()).unwrap()
        };
        assert!((hausdorff_distance(&mk(0.0), &mk(0.25)) - 0.25).abs() < 1e-15);
    }
}
