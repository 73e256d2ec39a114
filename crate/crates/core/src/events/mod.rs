//! Singularity detection and surgery.

mod detect;
mod surgery;

use serde::{Deserialize, Serialize};

use crate::geometry::{CurveId, Point2};

pub use detect::{detect, fit_blowup, BlowupFit};
pub use surgery::{
    collapse_boundary, collapse_interior, impose_end_tangent, reopen_boundary, reopen_cross, reproject_four_point,
    SurgeryOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// An inner curve (two triple-junction ends) vanishes with bounded curvature.
    Type0Interior,
    /// A curve ending at a fixed endpoint vanishes.
    BoundaryCollapse,
    CurvatureBlowup,
    /// Closed-curve validation mode only.
    Extinction,
    SteadyState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventStats {
    pub kappa_linf: f64,
    pub kappa_linf_window_min: f64,
    pub kappa_linf_window_max: f64,
    /// Length of the collapsing curve, when there is one.
    pub length: Option<f64>,
    pub blowup: Option<BlowupFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowEvent {
    pub kind: EventKind,
    pub time: f64,
    pub location: Point2,
    pub curve: Option<CurveId>,
    pub stats: EventStats,
}
