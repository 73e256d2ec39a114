//! One semi-implicit step of the special flow ∂tγ = ∂x²γ / |∂xγ|².
//!
//! Each curve's interior solves (I − dt·D2/|Δγ_old|²) γ_new = γ_old with the
//! metric frozen at the old state. Curve ends are either pinned (fixed
//! endpoints) or tied to a shared junction unknown. Interior solutions are
//! affine in the junction positions, so the coupled problem reduces to a dense
//! system with one unknown point per junction: the angle condition
//! Σ τ_i = 0, with τ_i the second-order one-sided tangent, linearized by
//! freezing 1/|τ_i| and the stencil weights at the old state, then refined
//! by Newton corrections on the exact condition.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use super::config::FlowConfig;
use crate::error::{Error, Result};
use crate::geometry::{end_derivative_weights, CurveEnd, CurveId, CurveSamples, Network, Point2, VertexId, VertexKind};
use crate::linalg::{CyclicTridiagonal, Tridiagonal};

/// Newton corrections of the angle condition after the linearized solve.
pub const MAX_ANGLE_CORRECTIONS: usize = 3;

/// Newton stops below this residual. A step fails only if the residual stays
/// above the configured tolerance; solving to the tolerance alone leaves
/// step-to-step noise in the end curvature of order tol/h.
const ANGLE_TARGET: f64 = 1e-12;

pub fn step(n: &Network, cfg: &FlowConfig) -> Result<Network> {
    step_with_dt(n, cfg.dt, cfg.angle_tol)
}

pub fn step_with_dt(n: &Network, dt: f64, angle_tol: f64) -> Result<Network> {
    if n.is_closed_curve() {
        return step_closed(n, dt);
    }
    for v in n.vertices() {
        let ok = match v.kind {
            VertexKind::FixedEndpoint => n.valence(v.id) == 1,
            VertexKind::TripleJunction => true,
            VertexKind::QuadruplePoint => false,
        };
        if !ok {
            return Err(Error::InvariantViolation(format!("cannot flow a network with singular vertex {}", v.id)));
        }
    }
    let junctions = n.vertices_of_kind(VertexKind::TripleJunction);
    let jindex: BTreeMap<VertexId, usize> = junctions.iter().enumerate().map(|(k, &v)| (v, k)).collect();

    let systems = n.curves().map(|c| CurveSystem::assemble(n, c, dt, &jindex)).collect::<Result<Vec<_>>>()?;
    let by_id: BTreeMap<CurveId, usize> = systems.iter().enumerate().map(|(k, s)| (s.id, k)).collect();

    let mut jpos: Vec<Point2> = junctions.iter().map(|&v| n.vertex(v).unwrap().position).collect();
    let old: Vec<Vec<Point2>> = n.curves().map(|c| c.points().to_vec()).collect();
    let incidences: Vec<Vec<(usize, CurveEnd)>> =
        junctions.iter().map(|&v| n.incident(v).into_iter().map(|i| (by_id[&i.curve], i.end)).collect()).collect();

    if !junctions.is_empty() {
        jpos = solve_junctions(&systems, &incidences, &jpos, &old)?;
        let mut residual = angle_residual(&systems, &incidences, &jpos);
        for _ in 0..MAX_ANGLE_CORRECTIONS {
            if residual < ANGLE_TARGET {
                break;
            }
            jpos = newton_correction(&systems, &incidences, &jpos)?;
            residual = angle_residual(&systems, &incidences, &jpos);
        }
        if !(residual < angle_tol) {
            return Err(Error::AngleIterationDiverged { residual });
        }
    }
    let iterate: Vec<Vec<Point2>> = systems.iter().map(|s| s.positions(&jpos)).collect();

    let (mut vertices, mut curves, domain) = n.clone().into_parts();
    for (k, v) in junctions.iter().enumerate() {
        vertices.get_mut(v).unwrap().position = jpos[k];
    }
    for (s, new) in systems.iter().zip(iterate) {
        let old = curves[&s.id].points().to_vec();
        let c = finish_curve(&curves[&s.id], &old, new, dt)?;
        curves.insert(s.id, c);
    }
    Network::from_parts(vertices, curves, domain)
}

#[derive(Debug, Clone, Copy)]
enum EndValue {
    Fixed,
    Junction(usize),
}

struct CurveSystem {
    id: CurveId,
    start: EndValue,
    end: EndValue,
    /// Interior solution with junction ends set to zero (fixed ends folded in).
    base: Vec<Point2>,
    phi_start: Vec<f64>,
    phi_end: Vec<f64>,
    first: Point2,
    last: Point2,
}

impl CurveSystem {
    fn assemble(n: &Network, c: &CurveSamples, dt: f64, jindex: &BTreeMap<VertexId, usize>) -> Result<Self> {
        let q = c.points();
        let m = q.len() - 1;
        let interior = m - 1;
        let h = c.chord_lengths();
        let a: Vec<f64> = (1..m)
            .map(|j| {
                let mean = 0.5 * (h[j - 1] + h[j]);
                dt / (mean * mean)
            })
            .collect();
        let lower: Vec<f64> = a.iter().map(|x| -x).collect();
        let diag: Vec<f64> = a.iter().map(|x| 1.0 + 2.0 * x).collect();
        let tri = Tridiagonal::factor(&lower, &diag, &lower).ok_or(Error::SingularSystem)?;

        let mut bx: Vec<f64> = q[1..m].iter().map(|p| p.x).collect();
        let mut by: Vec<f64> = q[1..m].iter().map(|p| p.y).collect();
        tri.solve_in_place(&mut bx);
        tri.solve_in_place(&mut by);
        let mut phi_start = vec![0.0; interior];
        phi_start[0] = a[0];
        tri.solve_in_place(&mut phi_start);
        let mut phi_end = vec![0.0; interior];
        phi_end[interior - 1] = a[interior - 1];
        tri.solve_in_place(&mut phi_end);

        let mut base: Vec<Point2> = bx.into_iter().zip(by).map(|(x, y)| Point2::new(x, y)).collect();
        let classify = |end: CurveEnd| -> Result<EndValue> {
            let v = c.vertex_at(end).expect("open curve");
            Ok(match n.vertex(v)?.kind {
                VertexKind::TripleJunction => EndValue::Junction(jindex[&v]),
                _ => EndValue::Fixed,
            })
        };
        let start = classify(CurveEnd::Start)?;
        let end = classify(CurveEnd::End)?;
        if let EndValue::Fixed = start {
            for (b, p) in base.iter_mut().zip(&phi_start) {
                *b += q[0] * *p;
            }
        }
        if let EndValue::Fixed = end {
            for (b, p) in base.iter_mut().zip(&phi_end) {
                *b += q[m] * *p;
            }
        }
        if base.iter().any(|p| !p.is_finite()) {
            return Err(Error::SingularSystem);
        }
        Ok(Self { id: c.id(), start, end, base, phi_start, phi_end, first: q[0], last: q[m] })
    }

    fn end_value(&self, end: CurveEnd, jpos: &[Point2]) -> Point2 {
        match (end, end_of(self, end)) {
            (_, EndValue::Junction(k)) => jpos[k],
            (CurveEnd::Start, EndValue::Fixed) => self.first,
            (CurveEnd::End, EndValue::Fixed) => self.last,
        }
    }

    /// Sample `i` of the new curve (0 and the last index are the ends).
    fn node(&self, i: usize, jpos: &[Point2]) -> Point2 {
        let last = self.base.len() + 1;
        if i == 0 {
            return self.end_value(CurveEnd::Start, jpos);
        }
        if i == last {
            return self.end_value(CurveEnd::End, jpos);
        }
        let mut p = self.base[i - 1];
        if let EndValue::Junction(k) = self.start {
            p += jpos[k] * self.phi_start[i - 1];
        }
        if let EndValue::Junction(k) = self.end {
            p += jpos[k] * self.phi_end[i - 1];
        }
        p
    }

    fn positions(&self, jpos: &[Point2]) -> Vec<Point2> {
        let mut out = Vec::with_capacity(self.base.len() + 2);
        out.push(self.end_value(CurveEnd::Start, jpos));
        let js = match self.start {
            EndValue::Junction(k) => Some(jpos[k]),
            EndValue::Fixed => None,
        };
        let je = match self.end {
            EndValue::Junction(k) => Some(jpos[k]),
            EndValue::Fixed => None,
        };
        for (i, b) in self.base.iter().enumerate() {
            let mut p = *b;
            if let Some(j) = js {
                p += j * self.phi_start[i];
            }
            if let Some(j) = je {
                p += j * self.phi_end[i];
            }
            out.push(p);
        }
        out.push(self.end_value(CurveEnd::End, jpos));
        out
    }
}

fn end_of(s: &CurveSystem, end: CurveEnd) -> EndValue {
    match end {
        CurveEnd::Start => s.start,
        CurveEnd::End => s.end,
    }
}

/// Node indices of the first two samples moving into the curve from `end`.
fn near_nodes(len: usize, end: CurveEnd) -> [usize; 3] {
    match end {
        CurveEnd::Start => [0, 1, 2],
        CurveEnd::End => [len - 1, len - 2, len - 3],
    }
}

fn solve_junctions(
    systems: &[CurveSystem],
    incidences: &[Vec<(usize, CurveEnd)>],
    jpos: &[Point2],
    iterate: &[Vec<Point2>],
) -> Result<Vec<Point2>> {
    let nj = incidences.len();
    let mut a = DMatrix::<f64>::zeros(nj, nj);
    let mut rhs = DMatrix::<f64>::zeros(nj, 2);
    for (k, ends) in incidences.iter().enumerate() {
        for &(ci, end) in ends {
            let s = &systems[ci];
            let cur = &iterate[ci];
            let [_, i1, i2] = near_nodes(cur.len(), end);
            let (p0, p1, p2) = (jpos[k], cur[i1], cur[i2]);
            let w = end_derivative_weights(p0, p1, p2);
            let t = p0 * w[0] + p1 * w[1] + p2 * w[2];
            let mu = 1.0 / t.norm();
            a[(k, k)] += mu * w[0];
            for (wj, node) in [(w[1], i1), (w[2], i2)] {
                let b = s.base[node - 1];
                rhs[(k, 0)] -= mu * wj * b.x;
                rhs[(k, 1)] -= mu * wj * b.y;
                if let EndValue::Junction(js) = s.start {
                    a[(k, js)] += mu * wj * s.phi_start[node - 1];
                }
                if let EndValue::Junction(je) = s.end {
                    a[(k, je)] += mu * wj * s.phi_end[node - 1];
                }
            }
        }
    }
    let sol = a.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let out: Vec<Point2> = (0..nj).map(|k| Point2::new(sol[(k, 0)], sol[(k, 1)])).collect();
    if out.iter().any(|p| !p.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(out)
}

/// Σ τ_i at every junction, with the curve interiors solved for `jpos`.
fn junction_sums(systems: &[CurveSystem], incidences: &[Vec<(usize, CurveEnd)>], jpos: &[Point2]) -> Vec<Point2> {
    incidences
        .iter()
        .enumerate()
        .map(|(k, ends)| {
            ends.iter()
                .map(|&(ci, end)| {
                    let s = &systems[ci];
                    let [_, i1, i2] = near_nodes(s.base.len() + 2, end);
                    let (p1, p2) = (s.node(i1, jpos), s.node(i2, jpos));
                    let w = end_derivative_weights(jpos[k], p1, p2);
                    (jpos[k] * w[0] + p1 * w[1] + p2 * w[2]).normalized()
                })
                .sum::<Point2>()
        })
        .collect()
}

fn angle_residual(systems: &[CurveSystem], incidences: &[Vec<(usize, CurveEnd)>], jpos: &[Point2]) -> f64 {
    junction_sums(systems, incidences, jpos).iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// One Newton step on Σ τ_i = 0 with a central-difference Jacobian.
fn newton_correction(
    systems: &[CurveSystem],
    incidences: &[Vec<(usize, CurveEnd)>],
    jpos: &[Point2],
) -> Result<Vec<Point2>> {
    let nj = jpos.len();
    let f0 = junction_sums(systems, incidences, jpos);
    let mut jac = DMatrix::<f64>::zeros(2 * nj, 2 * nj);
    let mut probe = jpos.to_vec();
    for col in 0..2 * nj {
        let (k, axis) = (col / 2, col % 2);
        let scale = 1e-7 * (1.0 + jpos[k].norm());
        let shift = if axis == 0 { Point2::new(scale, 0.0) } else { Point2::new(0.0, scale) };
        probe[k] = jpos[k] + shift;
        let fp = junction_sums(systems, incidences, &probe);
        probe[k] = jpos[k] - shift;
        let fm = junction_sums(systems, incidences, &probe);
        probe[k] = jpos[k];
        for row in 0..nj {
            let d = (fp[row] - fm[row]) * (0.5 / scale);
            jac[(2 * row, col)] = d.x;
            jac[(2 * row + 1, col)] = d.y;
        }
    }
    let rhs = nalgebra::DVector::from_iterator(2 * nj, f0.iter().flat_map(|r| [-r.x, -r.y]));
    let dx = jac.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    let out: Vec<Point2> = (0..nj).map(|k| jpos[k] + Point2::new(dx[2 * k], dx[2 * k + 1])).collect();
    if out.iter().any(|p| !p.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(out)
}

fn finish_curve(c: &CurveSamples, old: &[Point2], new: Vec<Point2>, dt: f64) -> Result<CurveSamples> {
    let len = new.len();
    let chords = c.segments();
    for j in 0..chords {
        let e_old = old[(j + 1) % len] - old[j];
        let e_new = new[(j + 1) % len] - new[j];
        if !(e_old.dot(e_new) > 0.0) {
            return Err(Error::StepRejected { curve: c.id() });
        }
    }
    let out = c.with_points(new).map_err(|e| match e {
        Error::DegenerateCurve { curve, .. } => Error::StepRejected { curve },
        other => other,
    })?;
    let zeta =
        out.points().iter().zip(old).zip(out.tangents()).map(|((p, q), t)| ((*p - *q) * (1.0 / dt)).dot(*t)).collect();
    Ok(out.with_zeta(zeta))
}

/// Periodic validation mode: a single closed curve.
fn step_closed(n: &Network, dt: f64) -> Result<Network> {
    let c = n.curves().next().expect("one curve");
    let q = c.points();
    let m = q.len();
    let h = c.chord_lengths();
    let a: Vec<f64> = (0..m)
        .map(|j| {
            let mean = 0.5 * (h[(j + m - 1) % m] + h[j]);
            dt / (mean * mean)
        })
        .collect();
    let off: Vec<f64> = a.iter().map(|x| -x).collect();
    let diag: Vec<f64> = a.iter().map(|x| 1.0 + 2.0 * x).collect();
    let cyc = CyclicTridiagonal::factor(&off, &diag, &off).ok_or(Error::SingularSystem)?;
    let mut x: Vec<f64> = q.iter().map(|p| p.x).collect();
    let mut y: Vec<f64> = q.iter().map(|p| p.y).collect();
    cyc.solve_in_place(&mut x);
    cyc.solve_in_place(&mut y);
    let new: Vec<Point2> = x.into_iter().zip(y).map(|(x, y)| Point2::new(x, y)).collect();
    if new.iter().any(|p| !p.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let out = finish_curve(c, q, new, dt)?;
    let (vertices, mut curves, domain) = n.clone().into_parts();
    curves.insert(out.id(), out);
    Network::from_parts(vertices, curves, domain)
}

/// Tangential velocity ⟨D2γ/|Δγ|², τ⟩ of the special flow for the current sampling.
pub fn special_flow_tangential_velocity(c: &CurveSamples) -> Vec<f64> {
    let p = c.points();
    let n = p.len();
    let t = c.tangents();
    let closed = c.is_closed();
    (0..n)
        .map(|j| {
            let (d2, spacing) = if closed || (j > 0 && j + 1 < n) {
                let prev = p[(j + n - 1) % n];
                let next = p[(j + 1) % n];
                let mean = 0.5 * (prev.distance(p[j]) + p[j].distance(next));
                (next - p[j] * 2.0 + prev, mean)
            } else {
                let [i0, i1, i2] = if j == 0 { [0, 1, 2] } else { [n - 1, n - 2, n - 3] };
                let i3 = if j == 0 { 3 } else { n - 4 };
                (p[i0] * 2.0 - p[i1] * 5.0 + p[i2] * 4.0 - p[i3], p[i0].distance(p[i1]))
            };
            (d2 * (1.0 / (spacing * spacing))).dot(t[j])
        })
        .collect()
}
