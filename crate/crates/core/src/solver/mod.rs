//! Time integration of the network flow.

mod config;
mod run;
mod step;
mod trajectory;

pub use config::{FlowConfig, Thresholds};
pub use run::{resample_network, run, run_observed};
pub use step::{special_flow_tangential_velocity, step, step_with_dt, MAX_ANGLE_CORRECTIONS};
pub use trajectory::{length_evolution_residual, SeriesRow, Snapshot, StopReason, SurgeryRecord, Trajectory};
