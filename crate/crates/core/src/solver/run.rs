use super::config::{FlowConfig, Thresholds};
use super::step::step_with_dt;
use super::trajectory::{SeriesRow, Snapshot, StopReason, SurgeryRecord, Trajectory};
use crate::diagnostics::{curvature_norms, endpoint_curvature_bound, interpolation_monitor};
use crate::error::{Error, Result};
use crate::events::{
    collapse_boundary, collapse_interior, detect, reopen_boundary, reopen_cross, EventKind, FlowEvent, SurgeryOptions,
};
use crate::geometry::{check_regular, is_tree, resample_uniform, Network};

/// Integrates the flow from `n0` until `cfg.t_end` or a stopping event.
pub fn run(n0: &Network, cfg: &FlowConfig) -> Result<Trajectory> {
    run_observed(n0, cfg, |_, _| {})
}

/// Like [`run`], calling `observer(t, network)` after every accepted step.
pub fn run_observed(n0: &Network, cfg: &FlowConfig, mut observer: impl FnMut(f64, &Network)) -> Result<Trajectory> {
    cfg.validate()?;
    if !n0.is_closed_curve() {
        n0.validate_regular()?;
        if !is_tree(n0)? {
            return Err(Error::InvariantViolation("network contains a loop; the flow requires a tree".into()));
        }
        let report = check_regular(n0, cfg.angle_tol);
        if !report.pass {
            return Err(Error::InvariantViolation(format!(
                "initial network violates the angle condition (residual {:e})",
                report.max_residual()
            )));
        }
    }
    let mut th = cfg.thresholds(n0);
    let base_k = th.blowup_k;
    let mut net = n0.clone();
    let mut t = 0.0;
    let mut step = 0usize;
    let mut segment_start = 0usize;
    let mut series = vec![series_row(&net, 0, t, 0.0)];
    let mut snapshots = vec![Snapshot { t, network: net.clone() }];
    let mut events = Vec::new();
    let mut surgeries = Vec::new();
    let end_tol = 1e-12 * cfg.t_end.max(1.0);
    let mut stop = StopReason::EndTime;

    while t < cfg.t_end - end_tol {
        if step.is_multiple_of(cfg.resample_every) {
            net = resample_network(&net, cfg.samples)?;
        }
        let mut dt = cfg.dt.min(cfg.t_end - t);
        let mut next = None;
        let mut last_err = None;
        for _ in 0..=cfg.max_halvings {
            match step_with_dt(&net, dt, cfg.angle_tol) {
                Ok(n) => {
                    next = Some(n);
                    break;
                }
                Err(
                    e @ (Error::StepRejected { .. } | Error::AngleIterationDiverged { .. } | Error::SingularSystem),
                ) => {
                    last_err = Some(e);
                    dt /= 2.0;
                }
                Err(e) => return Err(e),
            }
        }
        let Some(n) = next else {
            match last_err {
                Some(Error::StepRejected { .. }) => {
                    stop = StopReason::StepRejected;
                    break;
                }
                Some(e) => return Err(e),
                None => unreachable!("a failed step records its error"),
            }
        };
        net = n;
        t += dt;
        step += 1;
        series.push(series_row(&net, step, t, dt));
        observer(t, &net);
        if step.is_multiple_of(cfg.record_every) {
            snapshots.push(Snapshot { t, network: net.clone() });
        }

        let Some(event) = detect(&series[segment_start..], &net, &th, cfg) else { continue };
        if snapshots.last().map(|s| s.t) != Some(t) {
            snapshots.push(Snapshot { t, network: net.clone() });
        }
        let kind = event.kind;
        let surgical = matches!(kind, EventKind::Type0Interior | EventKind::BoundaryCollapse);
        if surgical && cfg.surgery_enabled {
            let (after, record) = apply_surgery(&net, &event, &th, cfg)?;
            events.push(event);
            surgeries.push(record);
            net = after;
            segment_start = series.len();
            th = Thresholds { blowup_k: base_k.max(10.0 * curvature_norms(&net).linf), ..th };
            continue;
        }
        events.push(event);
        stop = StopReason::Event(kind);
        break;
    }
    if snapshots.last().map(|s| s.t) != Some(t) || snapshots.last().map(|s| &s.network) != Some(&net) {
        snapshots.push(Snapshot { t, network: net.clone() });
    }
    Ok(Trajectory { snapshots, events, surgeries, series, thresholds: th, stop })
}

fn apply_surgery(
    net: &Network,
    event: &FlowEvent,
    th: &Thresholds,
    cfg: &FlowConfig,
) -> Result<(Network, SurgeryRecord)> {
    let curve = event.curve.ok_or_else(|| Error::InvariantViolation("collapse event without a curve".into()))?;
    // The detector fires strictly below the threshold; allow the collapse itself.
    let opts = SurgeryOptions::new(th.min_length_eps * (1.0 + 1e-12));
    let added = net.next_curve_id();
    let length_before = net.total_length();
    let mut delta = th.surgery_delta;
    let after = loop {
        let attempt = match event.kind {
            EventKind::Type0Interior => {
                let (merged, v) = collapse_interior(net, curve, &opts)?;
                reopen_cross(&merged, v, delta, &opts)
            }
            _ => {
                let (merged, v) = collapse_boundary(net, curve, &opts)?;
                reopen_boundary(&merged, v, delta, &opts)
            }
        };
        match attempt {
            Err(Error::DeltaTooLarge { limit, .. }) if limit > 0.0 => delta = 0.5 * limit,
            other => break other?,
        }
    };
    let after = resample_network(&after, cfg.samples)?;
    let record = SurgeryRecord {
        t: event.time,
        event: event.kind,
        removed: curve,
        added: Some(added),
        length_before,
        length_after: after.total_length(),
    };
    Ok((after, record))
}

/// Resamples every curve to `m` equal chords.
pub fn resample_network(n: &Network, m: usize) -> Result<Network> {
    let (vertices, curves, domain) = n.clone().into_parts();
    let curves = curves.into_iter().map(|(id, c)| resample_uniform(&c, m).map(|r| (id, r))).collect::<Result<_>>()?;
    Network::from_parts(vertices, curves, domain)
}

fn series_row(n: &Network, step: usize, t: f64, dt: f64) -> SeriesRow {
    let norms = curvature_norms(n);
    let angle_residual = if n.is_closed_curve() { 0.0 } else { check_regular(n, f64::INFINITY).max_residual() };
    let interpolation_margin = if n.is_closed_curve() {
        None
    } else {
        interpolation_monitor(n, endpoint_curvature_bound(n), None).ok().map(|m| m.margin)
    };
    SeriesRow {
        step,
        t,
        dt,
        lengths: n.lengths(),
        total_length: n.total_length(),
        kappa_l2: norms.l2,
        kappa_linf: norms.linf,
        ds_kappa_l2: norms.ds_l2,
        angle_residual,
        interpolation_margin,
    }
}
