use serde::{Deserialize, Serialize};

use crate::geometry::{CurveSamples, Network};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureNorms {
    /// ‖κ‖_{L²}
    pub l2: f64,
    /// ‖κ‖_{L∞}
    pub linf: f64,
    /// ‖∂sκ‖_{L²}
    pub ds_l2: f64,
}

/// Trapezoid rule in arclength for ∫ f² ds over one curve.
pub(crate) fn integral_of_square(c: &CurveSamples, f: &[f64]) -> f64 {
    let n = f.len();
    c.chord_lengths().iter().enumerate().map(|(j, h)| 0.5 * h * (f[j] * f[j] + f[(j + 1) % n] * f[(j + 1) % n])).sum()
}

pub fn curvature_norms(n: &Network) -> CurvatureNorms {
    let mut k2 = 0.0;
    let mut dk2 = 0.0;
    let mut linf = 0.0f64;
    for c in n.curves() {
        let k = c.curvature();
        k2 += integral_of_square(c, k);
        dk2 += integral_of_square(c, &c.curvature_derivative());
        linf = k.iter().fold(linf, |m, v| m.max(v.abs()));
    }
    CurvatureNorms { l2: k2.sqrt(), linf, ds_l2: dk2.sqrt() }
}
