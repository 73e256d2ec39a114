use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::geometry::{Network, Point2};
use crate::solver::Trajectory;

/// Space-time point of the backward heat kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityProbe {
    pub p0: Point2,
    pub t0: f64,
}

impl DensityProbe {
    pub fn new(p0: Point2, t0: f64) -> Self {
        Self { p0, t0 }
    }
}

/// ∫ e^{−|p−p0|²/4σ}/√(4πσ) ds over the segment [a, b].
fn segment_kernel(a: Point2, b: Point2, p0: Point2, sigma: f64) -> f64 {
    let len = a.distance(b);
    if len == 0.0 {
        return 0.0;
    }
    let d = (b - a) * (1.0 / len);
    let rel = a - p0;
    let along = rel.dot(d);
    let perp = rel.cross(d);
    let scale = 2.0 * sigma.sqrt();
    0.5 * (-perp * perp / (4.0 * sigma)).exp() * (erfc(along / scale) - erfc((along + len) / scale))
}

pub(crate) fn density_at_sigma_segment(a: Point2, b: Point2, sigma: f64) -> f64 {
    segment_kernel(a, b, Point2::ORIGIN, sigma)
}

fn ray_kernel(origin: Point2, dir: Point2, p0: Point2, sigma: f64) -> f64 {
    let d = dir.normalized();
    let rel = origin - p0;
    let along = rel.dot(d);
    let perp = rel.cross(d);
    0.5 * (-perp * perp / (4.0 * sigma)).exp() * erfc(along / (2.0 * sigma.sqrt()))
}

/// Θ with σ = t0 − t > 0 given directly. Every polyline chord is integrated
/// exactly, so the value is exact for the sampled polygonal network.
pub fn density_at_sigma(n: &Network, p0: Point2, sigma: f64) -> f64 {
    let mut total = 0.0;
    for c in n.curves() {
        let p = c.points();
        for w in p.windows(2) {
            total += segment_kernel(w[0], w[1], p0, sigma);
        }
        if c.is_closed() {
            total += segment_kernel(p[p.len() - 1], p[0], p0, sigma);
        }
    }
    total
}

/// Θ_{p0,t0}(t) of the network `n` observed at time `t`.
pub fn gaussian_density(n: &Network, t: f64, probe: &DensityProbe) -> Result<f64> {
    if t >= probe.t0 {
        return Err(Error::ProbeNotInFuture { t, t0: probe.t0 });
    }
    Ok(density_at_sigma(n, probe.p0, probe.t0 - t))
}

/// Piece of an unbounded model network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModelPiece {
    Ray { origin: Point2, dir: Point2 },
    Line { point: Point2, dir: Point2 },
    Segment { a: Point2, b: Point2 },
}

/// Static network of rays, lines and segments, evaluated in closed form.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelNetwork {
    pub pieces: Vec<ModelPiece>,
}

impl ModelNetwork {
    pub fn halfline(origin: Point2, dir: Point2) -> Self {
        Self { pieces: vec![ModelPiece::Ray { origin, dir }] }
    }

    pub fn line(point: Point2, dir: Point2) -> Self {
        Self { pieces: vec![ModelPiece::Line { point, dir }] }
    }

    /// Three halflines at 120° from `center`, the first at angle `rotation`.
    pub fn standard_triod(center: Point2, rotation: f64) -> Self {
        let pieces = (0..3)
            .map(|k| ModelPiece::Ray { origin: center, dir: Point2::from_angle(rotation + 2.0 * PI * k as f64 / 3.0) })
            .collect();
        Self { pieces }
    }

    /// Two lines through `center` meeting at 60° and 120°.
    pub fn standard_cross(center: Point2, rotation: f64) -> Self {
        Self {
            pieces: vec![
                ModelPiece::Line { point: center, dir: Point2::from_angle(rotation) },
                ModelPiece::Line { point: center, dir: Point2::from_angle(rotation + PI / 3.0) },
            ],
        }
    }

    /// Two halflines from `origin` at 120°, the limit at a boundary point.
    pub fn two_halflines(origin: Point2, rotation: f64) -> Self {
        Self {
            pieces: vec![
                ModelPiece::Ray { origin, dir: Point2::from_angle(rotation) },
                ModelPiece::Ray { origin, dir: Point2::from_angle(rotation + 2.0 * PI / 3.0) },
            ],
        }
    }

    pub fn density(&self, p0: Point2, sigma: f64) -> f64 {
        self.pieces
            .iter()
            .map(|piece| match *piece {
                ModelPiece::Ray { origin, dir } => ray_kernel(origin, dir, p0, sigma),
                ModelPiece::Line { point, dir } => {
                    ray_kernel(point, dir, p0, sigma) + ray_kernel(point, -dir, p0, sigma)
                }
                ModelPiece::Segment { a, b } => segment_kernel(a, b, p0, sigma),
            })
            .sum()
    }

    pub fn gaussian_density(&self, t: f64, probe: &DensityProbe) -> Result<f64> {
        if t >= probe.t0 {
            return Err(Error::ProbeNotInFuture { t, t0: probe.t0 });
        }
        Ok(self.density(probe.p0, probe.t0 - t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityOptions {
    pub tol_mono: f64,
    /// Snapshots with t0 − t above this are ignored.
    pub sigma_max: Option<f64>,
    /// Largest σ of the Richardson triple; default 4·(t0 − t_last).
    pub sigma0: Option<f64>,
}

impl Default for MonotonicityOptions {
    fn default() -> Self {
        Self { tol_mono: 1e-3, sigma_max: None, sigma0: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub probe: DensityProbe,
    /// (t, Θ(t)) over the snapshots used.
    pub series: Vec<(f64, f64)>,
    /// Richardson estimate of lim_{t→t0} Θ(t).
    pub limit: Option<f64>,
    /// Largest increase between consecutive values (0 if nonincreasing).
    pub max_increment: f64,
    pub tol_mono: f64,
    pub violation: bool,
}

pub fn monotonicity_check(traj: &Trajectory, probe: &DensityProbe) -> DensityReport {
    monotonicity_check_with(traj, probe, &MonotonicityOptions::default())
}

pub fn monotonicity_check_with(traj: &Trajectory, probe: &DensityProbe, opts: &MonotonicityOptions) -> DensityReport {
    let series: Vec<(f64, f64)> = traj
        .snapshots
        .iter()
        .filter(|s| s.t < probe.t0)
        .filter(|s| opts.sigma_max.is_none_or(|m| probe.t0 - s.t <= m))
        .map(|s| (s.t, density_at_sigma(&s.network, probe.p0, probe.t0 - s.t)))
        .collect();
    report_from_series(*probe, series, opts)
}

/// Builds a report from an already evaluated (t, Θ) series, increasing in t.
pub fn report_from_series(probe: DensityProbe, series: Vec<(f64, f64)>, opts: &MonotonicityOptions) -> DensityReport {
    let max_increment = series.windows(2).map(|w| w[1].1 - w[0].1).fold(0.0, f64::max);
    let limit = richardson_limit(&series, probe.t0, opts.sigma0);
    DensityReport {
        probe,
        series,
        limit,
        max_increment,
        tol_mono: opts.tol_mono,
        violation: max_increment > opts.tol_mono,
    }
}

/// Eliminates the O(σ) and O(σ²) terms from Θ at σ0, σ0/2, σ0/4, interpolating
/// the series linearly in t.
fn richardson_limit(series: &[(f64, f64)], t0: f64, sigma0: Option<f64>) -> Option<f64> {
    let &(t_last, last) = series.last()?;
    let s_min = t0 - t_last;
    let sigma0 = sigma0.unwrap_or(4.0 * s_min);
    let at = |sigma: f64| -> Option<f64> {
        let t = t0 - sigma;
        if t > t_last + 1e-12 * t0.abs().max(1.0) {
            return None;
        }
        if t >= t_last {
            return Some(last);
        }
        let k = series.partition_point(|r| r.0 <= t);
        if k == 0 {
            return None;
        }
        let (ta, va) = series[k - 1];
        let (tb, vb) = series[k.min(series.len() - 1)];
        Some(if tb > ta { va + (vb - va) * (t - ta) / (tb - ta) } else { va })
    };
    let (v1, v2, v4) = (at(sigma0 / 4.0)?, at(sigma0 / 2.0)?, at(sigma0)?);
    Some((8.0 * v1 - 6.0 * v2 + v4) / 3.0)
}
