//! Shipped initial networks.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI};

use crate::error::{Error, Result};
use crate::events::impose_end_tangent;
use crate::geometry::{ConvexDomain, CurveEnd, CurveId, CurveSamples, Network, Point2, Vertex, VertexId, VertexKind};

/// `m + 1` equally spaced samples from `a` to `b`, with exact ends.
pub fn straight_samples(a: Point2, b: Point2, m: usize) -> Vec<Point2> {
    let mut pts: Vec<Point2> = (0..=m).map(|j| a.lerp(b, j as f64 / m as f64)).collect();
    pts[0] = a;
    pts[m] = b;
    pts
}

/// Circular arc from `start` with initial direction angle `theta0` through
/// `end`, sampled uniformly in arclength (`m` chords).
pub fn arc_samples(start: Point2, theta0: f64, end: Point2, m: usize) -> Vec<Point2> {
    let chord = end - start;
    let phi = crate::geometry::signed_angle(Point2::from_angle(theta0), chord);
    if phi.abs() < 1e-14 {
        return straight_samples(start, end, m);
    }
    let len_c = chord.norm();
    let kappa = 2.0 * phi.sin() / len_c;
    let total = 2.0 * phi / kappa;
    let mut pts: Vec<Point2> = (0..=m)
        .map(|j| {
            let s = total * j as f64 / m as f64;
            let th = theta0 + kappa * s;
            start + Point2::new(th.sin() - theta0.sin(), theta0.cos() - th.cos()) * (1.0 / kappa)
        })
        .collect();
    pts[0] = start;
    pts[m] = end;
    pts
}

fn vertex(id: usize, kind: VertexKind, p: Point2) -> Vertex {
    Vertex::new(VertexId(id), kind, p)
}

fn open(id: usize, s: usize, e: usize, pts: Vec<Point2>) -> Result<CurveSamples> {
    CurveSamples::open(CurveId(id), VertexId(s), VertexId(e), pts)
}

/// Imposes an exact outward tangent at the start of a curve.
fn aligned_start(c: CurveSamples, angle: f64) -> Result<CurveSamples> {
    impose_end_tangent(&c, CurveEnd::Start, Point2::from_angle(angle))
}

/// Standard triod truncated at `radius`: junction at the origin, arms to the
/// circle at 90°, 210° and 330°. The domain is the disk of that radius.
pub fn standard_triod(radius: f64, m: usize) -> Result<Network> {
    let mut vertices = vec![vertex(0, VertexKind::TripleJunction, Point2::ORIGIN)];
    let mut curves = Vec::new();
    for k in 0..3 {
        let dir = Point2::from_angle(FRAC_PI_2 + 2.0 * PI * k as f64 / 3.0);
        let end = dir * radius;
        vertices.push(vertex(k + 1, VertexKind::FixedEndpoint, end));
        curves.push(open(k, 0, k + 1, straight_samples(Point2::ORIGIN, end, m))?);
    }
    Network::new(vertices, curves, ConvexDomain::disk(Point2::ORIGIN, radius)?)
}

/// Straight segment between (−1, 0) and (1, 0) in the unit disk.
pub fn straight_segment(m: usize) -> Result<Network> {
    let (a, b) = (Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0));
    Network::new(
        vec![vertex(0, VertexKind::FixedEndpoint, a), vertex(1, VertexKind::FixedEndpoint, b)],
        vec![open(0, 0, 1, straight_samples(a, b, m))?],
        ConvexDomain::disk(Point2::ORIGIN, 1.0)?,
    )
}

/// Upper unit semicircle with endpoints (±1, 0) fixed, in the ellipse with
/// semi-axes 1 and 1.5.
pub fn semicircle(m: usize) -> Result<Network> {
    let pts: Vec<Point2> = (0..=m).map(|j| Point2::from_angle(PI * j as f64 / m as f64)).collect();
    let mut pts = pts;
    pts[0] = Point2::new(1.0, 0.0);
    pts[m] = Point2::new(-1.0, 0.0);
    Network::new(
        vec![vertex(0, VertexKind::FixedEndpoint, pts[0]), vertex(1, VertexKind::FixedEndpoint, pts[m])],
        vec![open(0, 0, 1, pts)?],
        ConvexDomain::ellipse(Point2::ORIGIN, 1.0, 1.5)?,
    )
}

/// Counterclockwise circle of `radius` about the origin, for closed-curve
/// validation runs.
pub fn circle_validation(radius: f64, m: usize) -> Result<Network> {
    let pts = (0..m).map(|j| Point2::from_angle(2.0 * PI * j as f64 / m as f64) * radius).collect();
    Network::closed_curve(CurveSamples::closed(CurveId(0), pts)?, ConvexDomain::disk(Point2::ORIGIN, 2.0 * radius)?)
}

/// Triod with curved arms: junction at the origin, a straight stem to (0, −1),
/// a unit-radius arc leaving at 30° to (1, 0) and a tighter arc leaving at 150°
/// to the point of the unit circle at polar angle 160°. All three endpoints
/// lie on the unit circle and no symmetry relates the arms.
pub fn semicircle_triod(m: usize) -> Result<Network> {
    let o = Point2::ORIGIN;
    let left_angle = 160f64.to_radians();
    let (e1, e2, e3) = (Point2::new(1.0, 0.0), Point2::new(left_angle.cos(), left_angle.sin()), Point2::new(0.0, -1.0));
    let right = aligned_start(open(1, 0, 2, arc_samples(o, FRAC_PI_6, e1, m))?, FRAC_PI_6)?;
    let left = aligned_start(open(2, 0, 3, arc_samples(o, PI - FRAC_PI_6, e2, m))?, PI - FRAC_PI_6)?;
    Network::new(
        vec![
            vertex(0, VertexKind::TripleJunction, o),
            vertex(1, VertexKind::FixedEndpoint, e3),
            vertex(2, VertexKind::FixedEndpoint, e1),
            vertex(3, VertexKind::FixedEndpoint, e2),
        ],
        vec![open(0, 0, 1, straight_samples(o, e3, m))?, right, left],
        ConvexDomain::disk(o, 1.0)?,
    )
}

/// The five-curve centrally symmetric network: a vertical inner curve joins
/// junctions at (0, ±bulge), and circular arcs run from the junctions to the
/// endpoints (±a, ±b). The domain is an ellipse through the endpoints:
/// semi-axes √2·a and √2·b when it contains the arcs, otherwise the widest
/// ellipse of the family x²/A² + y²/B² = 1 through (a, b) that does.
///
/// Vertices: 0 lower junction, 1 upper junction, 2..=5 the endpoints
/// (a, b), (−a, b), (−a, −b), (a, −b). Curve 0 is the inner curve.
pub fn build_section6(a: f64, b: f64, bulge: f64, m: usize) -> Result<Network> {
    if !(a > 3f64.sqrt() * b) || !(b > 0.0) {
        return Err(Error::AngleConditionViolated { a, b });
    }
    if !(bulge > 0.0 && bulge < b) {
        return Err(Error::InvalidConfig(format!("bulge must lie in (0, b), got {bulge}")));
    }
    let up = Point2::new(0.0, bulge);
    let central: Vec<Point2> =
        (0..=m).map(|j| Point2::new(0.0, bulge * (2.0 * j as f64 - m as f64) / m as f64)).collect();
    let e_right = Point2::new(a, b);
    let e_left = Point2::new(-a, b);
    let upper_right = aligned_start(open(1, 1, 2, arc_samples(up, FRAC_PI_6, e_right, m))?, FRAC_PI_6)?;
    let upper_left = aligned_start(open(2, 1, 3, arc_samples(up, PI - FRAC_PI_6, e_left, m))?, PI - FRAC_PI_6)?;
    let rotate = |c: &CurveSamples| -> Vec<Point2> { c.points().iter().map(|&p| -p).collect() };
    let curves = vec![
        open(0, 0, 1, central)?,
        open(3, 0, 4, rotate(&upper_right))?,
        open(4, 0, 5, rotate(&upper_left))?,
        upper_right,
        upper_left,
    ];
    let vertices = vec![
        vertex(0, VertexKind::TripleJunction, -up),
        vertex(1, VertexKind::TripleJunction, up),
        vertex(2, VertexKind::FixedEndpoint, e_right),
        vertex(3, VertexKind::FixedEndpoint, e_left),
        vertex(4, VertexKind::FixedEndpoint, -e_right),
        vertex(5, VertexKind::FixedEndpoint, -e_left),
    ];
    let mut n =
        Network::new(vertices, curves, ConvexDomain::ellipse(Point2::ORIGIN, 2f64.sqrt() * a, 2f64.sqrt() * b)?)?;
    let mut ratio = 2f64.sqrt();
    while n.max_domain_excursion() > 0.0 {
        ratio = 1.0 + 0.9 * (ratio - 1.0);
        if ratio < 1.0 + 1e-6 {
            return Err(Error::InvalidConfig(format!(
                "no ellipse through the endpoints contains the arcs (a={a}, b={b})"
            )));
        }
        let big_a = ratio * a;
        let big_b = b / (1.0 - 1.0 / (ratio * ratio)).sqrt();
        let (vertices, curves, _) = n.into_parts();
        n = Network::from_parts(vertices, curves, ConvexDomain::ellipse(Point2::ORIGIN, big_a, big_b)?)?;
    }
    Ok(n)
}

/// Steiner minimal network of the rectangle (±a, ±b) with a horizontal inner
/// edge, and its total length 2a + 2√3·b.
///
/// Vertex and curve numbering follows [`build_section6`]: the inner curve is
/// curve 0 joining junctions 0 (left) and 1 (right).
pub fn steiner4(a: f64, b: f64, m: usize) -> Result<(Network, f64)> {
    if !(a > b / 3f64.sqrt()) || !(b > 0.0) {
        return Err(Error::TopologyNotAdmissible { a, b });
    }
    let s = a - b / 3f64.sqrt();
    let (jl, jr) = (Point2::new(-s, 0.0), Point2::new(s, 0.0));
    let ends = [Point2::new(a, b), Point2::new(-a, b), Point2::new(-a, -b), Point2::new(a, -b)];
    let vertices = vec![
        vertex(0, VertexKind::TripleJunction, jl),
        vertex(1, VertexKind::TripleJunction, jr),
        vertex(2, VertexKind::FixedEndpoint, ends[0]),
        vertex(3, VertexKind::FixedEndpoint, ends[1]),
        vertex(4, VertexKind::FixedEndpoint, ends[2]),
        vertex(5, VertexKind::FixedEndpoint, ends[3]),
    ];
    let curves = vec![
        open(0, 0, 1, straight_samples(jl, jr, m))?,
        open(1, 1, 2, straight_samples(jr, ends[0], m))?,
        open(2, 0, 3, straight_samples(jl, ends[1], m))?,
        open(3, 0, 4, straight_samples(jl, ends[2], m))?,
        open(4, 1, 5, straight_samples(jr, ends[3], m))?,
    ];
    let domain = ConvexDomain::ellipse(Point2::ORIGIN, 2f64.sqrt() * a, 2f64.sqrt() * b)?;
    Ok((Network::new(vertices, curves, domain)?, 2.0 * a + 2.0 * 3f64.sqrt() * b))
}

/// Symmetric H: a straight stub of length `stub` between junctions at
/// (0, ±stub/2) (or (±stub/2, 0) when `horizontal`), and four straight arms
/// of length `arm` leaving at 120° from the stub.
///
/// Vertices 0 and 1 are the junctions (negative and positive side); curve 0
/// is the stub.
pub fn h_network(stub: f64, arm: f64, horizontal: bool, m: usize) -> Result<Network> {
    let axis = if horizontal { 0.0 } else { FRAC_PI_2 };
    let e = Point2::from_angle(axis);
    let (j0, j1) = (-e * (stub / 2.0), e * (stub / 2.0));
    let dirs1 = [axis + FRAC_PI_3, axis - FRAC_PI_3];
    let dirs0 = [axis + PI - FRAC_PI_3, axis + PI + FRAC_PI_3];
    let mut vertices = vec![vertex(0, VertexKind::TripleJunction, j0), vertex(1, VertexKind::TripleJunction, j1)];
    let mut curves = vec![open(0, 0, 1, straight_samples(j0, j1, m.clamp(4, 8)))?];
    let mut next = 2;
    for (j, p, dirs) in [(1usize, j1, dirs1), (0usize, j0, dirs0)] {
        for d in dirs {
            let end = p + Point2::from_angle(d) * arm;
            vertices.push(vertex(next, VertexKind::FixedEndpoint, end));
            curves.push(open(next - 1, j, next, straight_samples(p, end, m))?);
            next += 1;
        }
    }
    let r = stub / 2.0 + arm;
    Network::new(vertices, curves, ConvexDomain::disk(Point2::ORIGIN, r)?)
}

/// Symmetric Y standing on the flat bottom edge of a polygonal domain: the
/// stem runs from the fixed endpoint (0, 0) up to a junction at (0, `stem`),
/// and two straight arms of length `arm` leave it at 30° and 150°.
///
/// Vertex 0 is the bottom endpoint, vertex 1 the junction; curve 0 is the stem.
pub fn symmetric_y(stem: f64, arm: f64, m: usize) -> Result<Network> {
    let p = Point2::ORIGIN;
    let j = Point2::new(0.0, stem);
    let er = j + Point2::from_angle(FRAC_PI_6) * arm;
    let el = j + Point2::from_angle(PI - FRAC_PI_6) * arm;
    let domain = ConvexDomain::polygon(vec![
        Point2::new(el.x, 0.0),
        Point2::new(er.x, 0.0),
        er,
        Point2::new(0.0, er.y + arm),
        el,
    ])?;
    Network::new(
        vec![
            vertex(0, VertexKind::FixedEndpoint, p),
            vertex(1, VertexKind::TripleJunction, j),
            vertex(2, VertexKind::FixedEndpoint, er),
            vertex(3, VertexKind::FixedEndpoint, el),
        ],
        vec![
            open(0, 0, 1, straight_samples(p, j, m.clamp(4, 8)))?,
            open(1, 1, 2, straight_samples(j, er, m))?,
            open(2, 1, 3, straight_samples(j, el, m))?,
        ],
        domain,
    )
}

/// Named scenarios selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Section6,
    Triod,
    Semicircle,
    CircleValidation,
    SemicircleTriod,
}

impl Scenario {
    pub const ALL: [Scenario; 5] =
        [Self::Section6, Self::Triod, Self::Semicircle, Self::CircleValidation, Self::SemicircleTriod];

    pub fn name(self) -> &'static str {
        match self {
            Self::Section6 => "section6",
            Self::Triod => "triod",
            Self::Semicircle => "semicircle",
            Self::CircleValidation => "circle-validation",
            Self::SemicircleTriod => "semicircle-triod",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Parameters of [`build_section6`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section6Params {
    pub a: f64,
    pub b: f64,
    pub bulge: f64,
}

impl Default for Section6Params {
    fn default() -> Self {
        Self { a: 2.0, b: 1.0, bulge: 0.3 }
    }
}

pub fn build(s: Scenario, p: Section6Params, m: usize) -> Result<Network> {
    match s {
        Scenario::Section6 => build_section6(p.a, p.b, p.bulge, m),
        Scenario::Triod => standard_triod(1.0, m),
        Scenario::Semicircle => semicircle(m),
        Scenario::CircleValidation => circle_validation(1.0, m),
        Scenario::SemicircleTriod => semicircle_triod(m),
    }
}
