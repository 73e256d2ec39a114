use serde::{Deserialize, Serialize};

use super::norms::curvature_norms;
use crate::error::Result;
use crate::geometry::{path_depth, Network, VertexKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationMargin {
    pub depth: usize,
    /// 4^{n−1} C + D(n) ‖κ‖₂ ‖∂sκ‖₂
    pub bound: f64,
    pub kappa_linf_sq: f64,
    /// bound − ‖κ‖∞²; expected nonnegative along a flow.
    pub margin: f64,
}

/// Default interior constant D(n): 10 for five-curve trees, 10·4^{n−2} otherwise.
pub fn default_interpolation_constant(depth: usize) -> f64 {
    10.0 * 4f64.powi(depth as i32 - 2)
}

/// max κ² over the fixed endpoints.
pub fn endpoint_curvature_bound(n: &Network) -> f64 {
    let mut c = 0.0f64;
    for v in n.vertices().filter(|v| v.kind == VertexKind::FixedEndpoint) {
        for inc in n.incident(v.id) {
            let curve = n.curve(inc.curve).expect("incident curve exists");
            let k = curve.curvature()[curve.end_index(inc.end)];
            c = c.max(k * k);
        }
    }
    c
}

/// Margin of the L∞ interpolation estimate of the curvature.
///
/// `c_end` bounds κ² at the fixed endpoints; `d_override` replaces D(n).
pub fn interpolation_monitor(n: &Network, c_end: f64, d_override: Option<f64>) -> Result<InterpolationMargin> {
    let depth = path_depth(n)?;
    let norms = curvature_norms(n);
    let d = d_override.unwrap_or_else(|| default_interpolation_constant(depth));
    let bound = 4f64.powi(depth as i32 - 1) * c_end + d * norms.l2 * norms.ds_l2;
    let kappa_linf_sq = norms.linf * norms.linf;
    Ok(InterpolationMargin { depth, bound, kappa_linf_sq, margin: bound - kappa_linf_sq })
}

/// Time horizon 1/[8C(‖κ(·,0)‖²_{L²}+1)²] of the L² curvature bound.
pub fn l2_bound_horizon(n0: &Network, c_global: f64) -> f64 {
    let k2 = curvature_norms(n0).l2.powi(2);
    l2_bound_horizon_from_norm(k2, c_global)
}

pub fn l2_bound_horizon_from_norm(kappa_l2_sq: f64, c_global: f64) -> f64 {
    1.0 / (8.0 * c_global * (kappa_l2_sq + 1.0).powi(2))
}
