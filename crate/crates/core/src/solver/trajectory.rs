use serde::{Deserialize, Serialize};

use super::config::Thresholds;
use crate::events::{EventKind, FlowEvent};
use crate::geometry::{CurveId, Network};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub network: Network,
}

/// Scalar diagnostics recorded after every step (and at t = 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub step: usize,
    pub t: f64,
    /// Step size that produced this row (0 at the initial row).
    pub dt: f64,
    pub lengths: Vec<(CurveId, f64)>,
    pub total_length: f64,
    pub kappa_l2: f64,
    pub kappa_linf: f64,
    pub ds_kappa_l2: f64,
    pub angle_residual: f64,
    pub interpolation_margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "kind")]
pub enum StopReason {
    EndTime,
    Event(EventKind),
    /// Every halving of dt failed the chord-reversal check.
    StepRejected,
}

/// A surgery applied during a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurgeryRecord {
    pub t: f64,
    pub event: EventKind,
    pub removed: CurveId,
    pub added: Option<CurveId>,
    pub length_before: f64,
    pub length_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub events: Vec<FlowEvent>,
    pub surgeries: Vec<SurgeryRecord>,
    pub series: Vec<SeriesRow>,
    pub thresholds: Thresholds,
    pub stop: StopReason,
}

impl Trajectory {
    pub fn final_network(&self) -> &Network {
        &self.snapshots.last().expect("trajectory has an initial snapshot").network
    }

    pub fn final_time(&self) -> f64 {
        self.series.last().map_or(0.0, |r| r.t)
    }

    /// Latest snapshot taken at or before `t`.
    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().rev().find(|s| s.t <= t)
    }
}

/// Residual of dL/dt = [ζ] − ∫κ² for one curve along the recorded snapshots.
///
/// Returns (t, residual) pairs at interior snapshots, using centered
/// differences of the length. Pairs straddling a surgery or a change of the
/// curve's end vertices are skipped.
pub fn length_evolution_residual(traj: &Trajectory, curve: CurveId) -> Vec<(f64, f64)> {
    let snaps = &traj.snapshots;
    let mut out = Vec::new();
    for k in 1..snaps.len().saturating_sub(1) {
        let (a, b, c) = (&snaps[k - 1], &snaps[k], &snaps[k + 1]);
        let (Ok(ca), Ok(cb), Ok(cc)) = (a.network.curve(curve), b.network.curve(curve), c.network.curve(curve)) else {
            continue;
        };
        if ca.ends() != cb.ends() || cb.ends() != cc.ends() {
            continue;
        }
        if traj.surgeries.iter().any(|s| s.t > a.t && s.t <= c.t) || c.t <= a.t {
            continue;
        }
        let Some(zeta) = cb.zeta() else { continue };
        let dl = (cc.length() - ca.length()) / (c.t - a.t);
        let boundary = if cb.is_closed() { 0.0 } else { zeta[zeta.len() - 1] - zeta[0] };
        let k2 = crate::diagnostics::integral_of_square(cb, cb.curvature());
        out.push((b.t, dl - (boundary - k2)));
    }
    out
}
