#![allow(dead_code)]

use netflow::scenarios::straight_samples;
use netflow::{ConvexDomain, CurveId, CurveSamples, Network, Point2, Vertex, VertexId, VertexKind};

pub fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

pub fn vertex(id: usize, kind: VertexKind, at: Point2) -> Vertex {
    Vertex::new(VertexId(id), kind, at)
}

pub fn endpoint(id: usize, at: Point2) -> Vertex {
    vertex(id, VertexKind::FixedEndpoint, at)
}

pub fn junction(id: usize, at: Point2) -> Vertex {
    vertex(id, VertexKind::TripleJunction, at)
}

pub fn curve(id: usize, start: usize, end: usize, pts: Vec<Point2>) -> CurveSamples {
    CurveSamples::open(CurveId(id), VertexId(start), VertexId(end), pts).unwrap()
}

pub fn line(id: usize, start: usize, end: usize, a: Point2, b: Point2, m: usize) -> CurveSamples {
    curve(id, start, end, straight_samples(a, b, m))
}

pub fn big_disk() -> ConvexDomain {
    ConvexDomain::disk(Point2::ORIGIN, 100.0).unwrap()
}

/// Single straight curve between two fixed endpoints.
pub fn segment_network(a: Point2, b: Point2, m: usize) -> Network {
    Network::new(vec![endpoint(0, a), endpoint(1, b)], vec![line(0, 0, 1, a, b, m)], big_disk()).unwrap()
}

/// Straight arms from a junction at the origin to the given directions.
pub fn star(dirs: &[Point2], m: usize) -> Network {
    let mut vertices = vec![junction(0, Point2::ORIGIN)];
    let mut curves = Vec::new();
    for (k, d) in dirs.iter().enumerate() {
        vertices.push(endpoint(k + 1, *d));
        curves.push(line(k, 0, k + 1, Point2::ORIGIN, *d, m));
    }
    Network::new(vertices, curves, big_disk()).unwrap()
}

/// Two junctions joined by two distinct curves, each junction with one arm
/// to a fixed endpoint.
pub fn loop_network(m: usize) -> Network {
    let (a, b) = (p(-1.0, 0.0), p(1.0, 0.0));
    let upper: Vec<Point2> = netflow::scenarios::arc_samples(a, 60f64.to_radians(), b, m);
    let lower: Vec<Point2> = netflow::scenarios::arc_samples(a, -60f64.to_radians(), b, m);
    Network::new(
        vec![junction(0, a), junction(1, b), endpoint(2, p(-3.0, 0.0)), endpoint(3, p(3.0, 0.0))],
        vec![
            curve(0, 0, 1, upper),
            curve(1, 0, 1, lower),
            line(2, 0, 2, a, p(-3.0, 0.0), m),
            line(3, 1, 3, b, p(3.0, 0.0), m),
        ],
        big_disk(),
    )
    .unwrap()
}

pub fn max_displacement(a: &Network, b: &Network) -> f64 {
    a.all_points().zip(b.all_points()).map(|(x, y)| x.distance(y)).fold(0.0, f64::max)
}

/// Least-squares slope of log(err) against log(h) over refinement levels.
pub fn observed_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
