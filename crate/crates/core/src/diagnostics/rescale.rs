use crate::error::{Error, Result};
use crate::geometry::{Network, Point2};
use crate::solver::{Snapshot, Trajectory};

/// A snapshot mapped by p ↦ λ(p − p0), at rescaled time τ = λ²(t − t0).
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledSnapshot {
    pub lambda: f64,
    pub tau: f64,
    pub network: Network,
}

impl RescaledSnapshot {
    pub fn from_snapshot(s: &Snapshot, p0: Point2, t0: f64, lambda: f64) -> Result<Self> {
        Self::from_network(&s.network, s.t, p0, t0, lambda)
    }

    pub fn from_network(n: &Network, t: f64, p0: Point2, t0: f64, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("rescaling factor must be positive, got {lambda}")));
        }
        let network = n.similarity(lambda, 0.0, -(p0 * lambda))?;
        Ok(Self { lambda, tau: lambda * lambda * (t - t0), network })
    }

    /// Rescales again about the origin at τ = 0; composes the factors.
    pub fn rescale(&self, lambda: f64) -> Result<Self> {
        let inner = Self::from_network(&self.network, self.tau, Point2::ORIGIN, 0.0, lambda)?;
        Ok(Self { lambda: self.lambda * lambda, ..inner })
    }

    /// σ = −τ, the kernel width matching the density at the origin.
    pub fn sigma(&self) -> f64 {
        -self.tau
    }
}

/// Rescales every snapshot whose τ lies in `window` (all snapshots when `None`).
pub fn parabolic_rescale(
    traj: &Trajectory,
    p0: Point2,
    t0: f64,
    lambda: f64,
    window: Option<(f64, f64)>,
) -> Result<Vec<RescaledSnapshot>> {
    let mut out = Vec::new();
    for s in &traj.snapshots {
        let tau = lambda * lambda * (s.t - t0);
        if window.is_none_or(|(lo, hi)| tau >= lo && tau <= hi) {
            out.push(RescaledSnapshot::from_snapshot(s, p0, t0, lambda)?);
        }
    }
    if out.is_empty() {
        return Err(Error::WindowEmpty);
    }
    Ok(out)
}
