use serde::{Deserialize, Serialize};

use super::{EventKind, EventStats, FlowEvent};
use crate::geometry::{CurveEnd, Network, Point2, VertexKind};
use crate::solver::{FlowConfig, SeriesRow, Thresholds};

/// Power-law fit ‖κ‖∞ ≈ A (T̂ − t)^{−exponent}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupFit {
    pub t_hat: f64,
    pub exponent: f64,
    /// min over the fitted rows of ‖κ‖∞² √(T̂ − t).
    pub rate_lower_bound: f64,
}

/// Inspects the tail of a run (rows since the last surgery, latest last).
pub fn detect(tail: &[SeriesRow], network: &Network, th: &Thresholds, cfg: &FlowConfig) -> Option<FlowEvent> {
    let last = tail.last()?;
    let window = &tail[tail.len().saturating_sub(cfg.window)..];
    let (wmin, wmax) =
        window.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r.kappa_linf), hi.max(r.kappa_linf)));
    let stats = |length: Option<f64>, blowup: Option<BlowupFit>| EventStats {
        kappa_linf: last.kappa_linf,
        kappa_linf_window_min: wmin,
        kappa_linf_window_max: wmax,
        length,
        blowup,
    };
    let centroid = || {
        let (sum, count) = network.all_points().fold((Point2::ORIGIN, 0usize), |(s, k), p| (s + p, k + 1));
        sum * (1.0 / count as f64)
    };

    if network.is_closed_curve() {
        let length = last.total_length;
        if last.kappa_linf > th.blowup_k || length < th.min_length_eps {
            let fit = fit_blowup(&blowup_rows(tail, th.blowup_k));
            return Some(FlowEvent {
                kind: EventKind::Extinction,
                time: last.t,
                location: centroid(),
                curve: network.curve_ids().first().copied(),
                stats: stats(Some(length), fit),
            });
        }
        return None;
    }

    if last.kappa_linf > th.blowup_k {
        let fit = fit_blowup(&blowup_rows(tail, th.blowup_k));
        let location = network
            .curves()
            .flat_map(|c| c.points().iter().zip(c.curvature()))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(p, _)| *p)
            .unwrap_or_default();
        return Some(FlowEvent {
            kind: EventKind::CurvatureBlowup,
            time: last.t,
            location,
            curve: None,
            stats: stats(None, fit),
        });
    }

    let mut short: Vec<(f64, crate::geometry::CurveId)> =
        last.lengths.iter().filter(|(_, l)| *l < th.min_length_eps).map(|&(id, l)| (l, id)).collect();
    short.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (length, id) in short {
        let Ok(c) = network.curve(id) else { continue };
        let kinds: Vec<VertexKind> = [CurveEnd::Start, CurveEnd::End]
            .iter()
            .filter_map(|&e| c.vertex_at(e))
            .filter_map(|v| network.vertex(v).ok().map(|v| v.kind))
            .collect();
        let junction_ends = kinds.iter().filter(|k| **k == VertexKind::TripleJunction).count();
        let fixed_ends = kinds.iter().filter(|k| **k == VertexKind::FixedEndpoint).count();
        let kind = match (junction_ends, fixed_ends) {
            (2, 0) => EventKind::Type0Interior,
            (1, 1) => EventKind::BoundaryCollapse,
            _ => continue,
        };
        let s = c.arclength();
        let half = s[s.len() - 1] / 2.0;
        let k = s.partition_point(|v| *v < half).clamp(1, s.len() - 1);
        let p = c.points();
        let location = p[k - 1].lerp(p[k], (half - s[k - 1]) / (s[k] - s[k - 1]));
        return Some(FlowEvent { kind, time: last.t, location, curve: Some(id), stats: stats(Some(length), None) });
    }

    if cfg.stop_on_steady_state
        && tail.len() >= cfg.window
        && window.iter().all(|r| r.kappa_linf < cfg.steady_tol && r.angle_residual < cfg.angle_tol)
    {
        return Some(FlowEvent {
            kind: EventKind::SteadyState,
            time: last.t,
            location: centroid(),
            curve: None,
            stats: stats(None, None),
        });
    }
    None
}

fn blowup_rows(tail: &[SeriesRow], k: f64) -> Vec<(f64, f64)> {
    let rows: Vec<(f64, f64)> = tail.iter().filter(|r| r.kappa_linf >= 0.25 * k).map(|r| (r.t, r.kappa_linf)).collect();
    if rows.len() >= 4 {
        rows
    } else {
        tail.iter().rev().take(8).rev().map(|r| (r.t, r.kappa_linf)).collect()
    }
}

fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (slope, icpt, sse)
}

/// Fits ‖κ‖∞(t) ≈ A (T̂ − t)^{−α} by profiling the log-log residual over T̂.
///
/// Rows are (t, ‖κ‖∞) with increasing t.
pub fn fit_blowup(rows: &[(f64, f64)]) -> Option<BlowupFit> {
    if rows.len() < 4 {
        return None;
    }
    let t_last = rows.last()?.0;
    let span = (t_last - rows[0].0).max(f64::EPSILON);
    let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let logk: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
    let cost = |gap: f64| {
        let x: Vec<f64> = ts.iter().map(|t| (t_last + gap - t).ln()).collect();
        let (slope, _, sse) = linear_fit(&x, &logk);
        (sse, -slope)
    };
    // Golden-section search in log(gap) over [1e-6, 1e3] × span.
    let (mut lo, mut hi) = ((1e-6 * span).ln(), (1e3 * span).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (cost(a.exp()).0, cost(b.exp()).0);
    for _ in 0..200 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = cost(a.exp()).0;
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = cost(b.exp()).0;
        }
    }
    let gap = (0.5 * (lo + hi)).exp();
    let (_, exponent) = cost(gap);
    let t_hat = t_last + gap;
    let rate_lower_bound = rows.iter().map(|(t, k)| k * k * (t_hat - t).sqrt()).fold(f64::INFINITY, f64::min);
    Some(BlowupFit { t_hat, exponent, rate_lower_bound })
}
