//! Sampled curves, networks and their discrete differential geometry.

mod curve;
mod domain;
mod network;
mod point;
mod regular;
pub mod stencil;
mod topology;

pub use curve::{curvature_profile, length, resample_uniform, CurveEnd, CurveEnds, CurveId, CurveSamples, VertexId};
pub use domain::ConvexDomain;
pub use network::{hausdorff_distance, point_segment_distance, Incidence, Network, Vertex, VertexKind, ENDPOINT_TOL};
pub use point::{signed_angle, wrap_angle, Point2};
pub use regular::{angular_gaps, check_regular, outward_tangents, JunctionCheck, RegularityReport};
pub use topology::{graph_is_tree, is_tree, path_depth};

pub(crate) use curve::end_derivative_weights;
