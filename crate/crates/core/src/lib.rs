//! Curvature flow of regular planar networks.
//!
//! A network is a tree of curves meeting at 120° triple junctions, with its
//! remaining ends pinned on the boundary of a convex domain. The crate
//! integrates the flow on sampled polylines, measures the Gaussian density
//! and related diagnostics along a run, detects the collapse of curves with
//! bounded curvature, and can perform surgery to restart the flow.
//!
//! Modules follow the pipeline:
//!
//! - [`geometry`]: points, sampled curves, networks, discrete curvature.
//! - [`junctions`]: identities at triple junctions and shrinker residuals.
//! - [`solver`]: the semi-implicit time stepper and run loop.
//! - [`diagnostics`]: curvature norms, density, rescaling, classification.
//! - [`events`]: singularity detection and surgery.
//! - [`scenarios`] and [`io`]: shipped initial networks and file formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod events;
pub mod geometry;
pub mod io;
pub mod junctions;
pub mod linalg;
pub mod scenarios;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{ConvexDomain, CurveEnds, CurveId, CurveSamples, Network, Point2, Vertex, VertexId, VertexKind};
