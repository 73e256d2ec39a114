use thiserror::Error;

use crate::geometry::{CurveId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curve {curve}: samples {index} and {} coincide", index + 1)]
    DegenerateCurve { curve: CurveId, index: usize },
    #[error("curve {curve}: {count} samples is too few (need at least {min})")]
    TooFewSamples { curve: CurveId, count: usize, min: usize },
    #[error("network is not connected")]
    NotConnected,
    #[error("network has no fixed endpoint")]
    NoEndpoint,
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown curve {0}")]
    UnknownCurve(CurveId),

    #[error("linear solve failed")]
    SingularSystem,
    #[error("angle condition not met after correction (residual {residual:e})")]
    AngleIterationDiverged { residual: f64 },
    #[error("step rejected: curve {curve} would degenerate")]
    StepRejected { curve: CurveId },
    #[error("invalid flow configuration: {0}")]
    InvalidConfig(String),

    #[error("junction velocities disagree by {mismatch:e}")]
    InconsistentJunction { mismatch: f64 },
    #[error("curve {0} carries no tangential velocity (not produced by a solver step)")]
    MissingVelocity(CurveId),

    #[error("probe time {t0} is not after snapshot time {t}")]
    ProbeNotInFuture { t: f64, t0: f64 },
    #[error("no snapshots in the requested window")]
    WindowEmpty,

    #[error("curve {0} does not join two triple junctions")]
    NotInnerCurve(CurveId),
    #[error("curve {curve} has length {length:e}, not below {eps:e}")]
    NotShortEnough { curve: CurveId, length: f64, eps: f64 },
    #[error("vertex {0} is not a four-point")]
    NotFourPoint(VertexId),
    #[error("arms at vertex {0} are not in 60/120 position")]
    NoAdmissibleOpening(VertexId),
    #[error("curve {0} does not join a fixed endpoint to a triple junction")]
    NotBoundaryCurve(CurveId),
    #[error("vertex {0} is not a two-valent fixed endpoint at 120 degrees")]
    NotCollapsedEndpoint(VertexId),
    #[error("opening length {delta:e} exceeds the admissible {limit:e}")]
    DeltaTooLarge { delta: f64, limit: f64 },

    #[error("origin angle condition violated: need a > sqrt(3) b (a = {a}, b = {b})")]
    AngleConditionViolated { a: f64, b: f64 },
    #[error("Steiner topology not admissible: need a > b / sqrt(3) (a = {a}, b = {b})")]
    TopologyNotAdmissible { a: f64, b: f64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
