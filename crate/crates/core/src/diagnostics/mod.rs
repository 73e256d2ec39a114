//! Curvature norms, Gaussian density, parabolic rescaling, tangent-flow
//! classification and the estimate monitors.

mod classify;
mod density;
mod monitors;
mod norms;
mod rescale;

pub use classify::{classify_tangent_flow, classify_with, ClassifyOptions, TangentFlowClass, TangentFlowKind};
pub use density::{
    density_at_sigma, gaussian_density, monotonicity_check, monotonicity_check_with, report_from_series, DensityProbe,
    DensityReport, ModelNetwork, ModelPiece, MonotonicityOptions,
};
pub use monitors::{
    default_interpolation_constant, endpoint_curvature_bound, interpolation_monitor, l2_bound_horizon,
    l2_bound_horizon_from_norm, InterpolationMargin,
};
pub use norms::curvature_norms;
pub(crate) use norms::integral_of_square;
pub use rescale::{parabolic_rescale, RescaledSnapshot};
