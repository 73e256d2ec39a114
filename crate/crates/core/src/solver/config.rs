use serde::{Deserialize, Serialize};

use crate::diagnostics::curvature_norms;
use crate::error::{Error, Result};
use crate::geometry::Network;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub dt: f64,
    /// Chords per curve, M.
    pub samples: usize,
    pub t_end: f64,
    pub angle_tol: f64,
    pub resample_every: usize,
    /// Collapse threshold; default 2·h with h the mean initial spacing.
    pub min_length_eps: Option<f64>,
    /// Blow-up threshold; default 10·max(‖κ₀‖∞, 1).
    pub curvature_blowup_k: Option<f64>,
    pub surgery_enabled: bool,
    /// Opening length at surgery; default 5·h.
    pub surgery_delta: Option<f64>,
    pub steady_tol: f64,
    pub stop_on_steady_state: bool,
    /// Detection window W, in steps.
    pub window: usize,
    /// Snapshot cadence, in steps.
    pub record_every: usize,
    pub max_halvings: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            samples: 100,
            t_end: 1.0,
            angle_tol: 1e-6,
            resample_every: 50,
            min_length_eps: None,
            curvature_blowup_k: None,
            surgery_enabled: false,
            surgery_delta: None,
            steady_tol: 1e-3,
            stop_on_steady_state: true,
            window: 50,
            record_every: 10,
            max_halvings: 10,
        }
    }
}

impl FlowConfig {
    /// Sets `resample_every` so resampling happens once per `interval` of
    /// flow time at the configured step size.
    pub fn with_resample_interval(mut self, interval: f64) -> Self {
        self.resample_every = ((interval / self.dt).round() as usize).max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.samples < 4 {
            return bad("samples per curve must be at least 4");
        }
        if !(self.t_end >= 0.0) {
            return bad("t_end must be nonnegative");
        }
        if !(self.angle_tol > 0.0) {
            return bad("angle_tol must be positive");
        }
        if self.resample_every == 0 || self.record_every == 0 || self.window == 0 {
            return bad("resample_every, record_every and window must be positive");
        }
        for (name, v) in [
            ("min_length_eps", self.min_length_eps),
            ("curvature_blowup_k", self.curvature_blowup_k),
            ("surgery_delta", self.surgery_delta),
        ] {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(Error::InvalidConfig(format!("{name} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Thresholds with defaults filled in from the initial network.
    pub fn thresholds(&self, n0: &Network) -> Thresholds {
        let (_, mean_h) = n0.spacing();
        let k0 = curvature_norms(n0).linf;
        Thresholds {
            spacing: mean_h,
            min_length_eps: self.min_length_eps.unwrap_or(2.0 * mean_h),
            blowup_k: self.curvature_blowup_k.unwrap_or(10.0 * k0.max(1.0)),
            surgery_delta: self.surgery_delta.unwrap_or(5.0 * mean_h),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub spacing: f64,
    pub min_length_eps: f64,
    pub blowup_k: f64,
    pub surgery_delta: f64,
}
