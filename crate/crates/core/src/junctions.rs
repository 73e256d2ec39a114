//! Identities at triple junctions and the shrinker residual.
//!
//! All quantities at a junction are taken with the curves oriented away from
//! the junction. Reversing a curve flips τ, ν, κ and ζ; ∂sκ is unchanged.

use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, CurveEnd, CurveId, CurveSamples, Network, Point2, VertexId, VertexKind};

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Data of one curve end at a junction, in outward orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionEnd {
    pub curve: CurveId,
    pub tangent: Point2,
    pub kappa: f64,
    pub ds_kappa: f64,
    pub zeta: f64,
}

impl JunctionEnd {
    pub fn normal(&self) -> Point2 {
        self.tangent.perp()
    }

    /// Velocity ζτ + κν implied by this end.
    pub fn velocity(&self) -> Point2 {
        self.tangent * self.zeta + self.normal() * self.kappa
    }
}

/// The three curve ends at a triple junction, ordered counterclockwise by
/// outward tangent angle. Index arithmetic is modulo 3.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionTriple {
    pub vertex: VertexId,
    pub ends: [JunctionEnd; 3],
}

impl JunctionTriple {
    /// Orders the ends counterclockwise starting from the smallest angle.
    pub fn new(vertex: VertexId, mut ends: [JunctionEnd; 3]) -> Self {
        ends.sort_by(|a, b| wrap_angle(a.tangent.angle()).total_cmp(&wrap_angle(b.tangent.angle())));
        Self { vertex, ends }
    }

    /// Reads the junction data from a solver-produced snapshot.
    pub fn from_network(n: &Network, vertex: VertexId) -> Result<Self> {
        let v = n.vertex(vertex)?;
        let inc = n.incident(vertex);
        if v.kind != VertexKind::TripleJunction || inc.len() != 3 {
            return Err(Error::InvariantViolation(format!("{vertex} is not a triple junction")));
        }
        let mut ends =
            [JunctionEnd { curve: CurveId(0), tangent: Point2::ORIGIN, kappa: 0.0, ds_kappa: 0.0, zeta: 0.0 }; 3];
        for (slot, i) in ends.iter_mut().zip(inc) {
            let c = n.curve(i.curve)?;
            *slot = outward_end(c, i.end)?;
        }
        Ok(Self::new(vertex, ends))
    }

    pub fn kappas(&self) -> [f64; 3] {
        self.ends.map(|e| e.kappa)
    }

    pub fn zetas(&self) -> [f64; 3] {
        self.ends.map(|e| e.zeta)
    }
}

fn outward_end(c: &CurveSamples, end: CurveEnd) -> Result<JunctionEnd> {
    let j = c.end_index(end);
    let zeta = c.zeta().ok_or(Error::MissingVelocity(c.id()))?[j];
    let ds_kappa = c.curvature_derivative()[j];
    let sign = match end {
        CurveEnd::Start => 1.0,
        CurveEnd::End => -1.0,
    };
    Ok(JunctionEnd {
        curve: c.id(),
        tangent: c.tangents()[j] * sign,
        kappa: c.curvature()[j] * sign,
        ds_kappa,
        zeta: zeta * sign,
    })
}

/// Tangential velocities forced by the curvatures: √3 ζ^i = κ^{i−1} − κ^{i+1}.
pub fn zeta_from_kappa(kappa: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (kappa[(i + 2) % 3] - kappa[(i + 1) % 3]) / SQRT_3)
}

/// Inverse relation κ^i = (ζ^{i+1} − ζ^{i−1})/√3.
pub fn kappa_from_zeta(zeta: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| (zeta[(i + 1) % 3] - zeta[(i + 2) % 3]) / SQRT_3)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    /// |Σκ^i|
    pub r1: f64,
    /// |Σζ^i|
    pub r2: f64,
    /// max over pairs of |(∂sκ^i + ζ^iκ^i) − (∂sκ^j + ζ^jκ^j)|
    pub r3: f64,
    /// |Σ κ^i ∂sκ^i + ζ^i (κ^i)²|
    pub r4: f64,
}

impl IdentityResiduals {
    pub fn as_array(&self) -> [f64; 4] {
        [self.r1, self.r2, self.r3, self.r4]
    }
}

pub fn junction_identity_residuals(j: &JunctionTriple) -> IdentityResiduals {
    let e = &j.ends;
    let r1 = e.iter().map(|x| x.kappa).sum::<f64>().abs();
    let r2 = e.iter().map(|x| x.zeta).sum::<f64>().abs();
    let q: Vec<f64> = e.iter().map(|x| x.ds_kappa + x.zeta * x.kappa).collect();
    let r3 = [(0, 1), (1, 2), (0, 2)].iter().map(|&(a, b)| (q[a] - q[b]).abs()).fold(0.0, f64::max);
    let r4 = e.iter().map(|x| x.kappa * x.ds_kappa + x.zeta * x.kappa * x.kappa).sum::<f64>().abs();
    IdentityResiduals { r1, r2, r3, r4 }
}

/// Junction velocity from the first end, cross-checked against the others.
pub fn junction_velocity(j: &JunctionTriple, tol: f64) -> Result<Point2> {
    let v = j.ends[0].velocity();
    let mismatch = j.ends[1..].iter().map(|e| (e.velocity() - v).norm()).fold(0.0, f64::max);
    if mismatch > tol {
        return Err(Error::InconsistentJunction { mismatch });
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkerResidual {
    pub per_node: Vec<f64>,
    pub max_abs: f64,
    /// Arclength L² norm (trapezoid).
    pub l2: f64,
}

/// Residual κ + ⟨p, ν⟩ of the shrinker equation about the origin.
pub fn shrinker_residual(c: &CurveSamples) -> ShrinkerResidual {
    let per_node: Vec<f64> =
        c.points().iter().zip(c.normals()).zip(c.curvature()).map(|((p, nu), k)| k + p.dot(*nu)).collect();
    let max_abs = per_node.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let n = per_node.len();
    let l2 = c
        .chord_lengths()
        .iter()
        .enumerate()
        .map(|(j, h)| 0.5 * h * (per_node[j].powi(2) + per_node[(j + 1) % n].powi(2)))
        .sum::<f64>()
        .sqrt();
    ShrinkerResidual { per_node, max_abs, l2 }
}
