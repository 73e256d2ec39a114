mod common;

use common::*;
use netflow::diagnostics::curvature_norms;
use netflow::events::{
    collapse_boundary, collapse_interior, detect, fit_blowup, reopen_boundary, reopen_cross, reproject_four_point,
    EventKind, SurgeryOptions,
};
use netflow::geometry::{check_regular, hausdorff_distance, is_tree, CurveEnd};
use netflow::scenarios::{
    build_section6, circle_validation, h_network, semicircle, semicircle_triod, standard_triod, straight_segment,
    symmetric_y,
};
use netflow::solver::{run, FlowConfig, SeriesRow, StopReason};
use netflow::{CurveId, Error, Network, Point2, VertexId, VertexKind};

fn opts() -> SurgeryOptions {
    SurgeryOptions::new(1e-3)
}

/// Outward tangent angles (degrees in [0, 360)) of the arms at `v`, sorted.
fn arm_angles(n: &Network, v: VertexId) -> Vec<f64> {
    let mut a: Vec<f64> = n
        .incident(v)
        .iter()
        .map(|i| n.curve(i.curve).unwrap().outward_tangent(i.end).angle().to_degrees().rem_euclid(360.0))
        .collect();
    a.sort_by(f64::total_cmp);
    a
}

fn assert_angles(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < tol, "{got:?} vs {want:?}");
    }
}

fn assert_valid(n: &Network) {
    assert!(check_regular(n, 1e-6).pass, "residual {}", check_regular(n, 1e-6).max_residual());
    assert!(is_tree(n).unwrap());
}

#[test]
fn static_triod_run_ends_in_steady_state() {
    let traj = run(&standard_triod(1.0, 40).unwrap(), &FlowConfig { t_end: 0.1, samples: 40, ..FlowConfig::default() })
        .unwrap();
    assert_eq!(traj.stop, StopReason::Event(EventKind::SteadyState));
    assert_eq!(traj.events.len(), 1);
    assert_eq!(traj.series.len(), 50);
}

#[test]
fn steady_state_needs_a_full_window() {
    let n = straight_segment(20).unwrap();
    let cfg = FlowConfig::default();
    let th = cfg.thresholds(&n);
    let row = |step: usize| SeriesRow {
        step,
        t: step as f64 * 1e-4,
        dt: 1e-4,
        lengths: n.lengths(),
        total_length: 1.0,
        kappa_l2: 0.0,
        kappa_linf: 0.0,
        ds_kappa_l2: 0.0,
        angle_residual: 0.0,
        interpolation_margin: Some(0.0),
    };
    let short: Vec<SeriesRow> = (0..10).map(row).collect();
    assert!(detect(&short, &n, &th, &cfg).is_none());
    let full: Vec<SeriesRow> = (0..50).map(row).collect();
    assert_eq!(detect(&full, &n, &th, &cfg).unwrap().kind, EventKind::SteadyState);
    let off = FlowConfig { stop_on_steady_state: false, ..cfg.clone() };
    assert!(detect(&full, &n, &th, &off).is_none());
}

#[test]
fn shrinking_circle_ends_in_extinction_with_square_root_rate() {
    let traj =
        run(&circle_validation(1.0, 100).unwrap(), &FlowConfig { t_end: 0.6, samples: 100, ..FlowConfig::default() })
            .unwrap();
    let e = traj.events.last().unwrap();
    assert_eq!(e.kind, EventKind::Extinction);
    assert!((e.time - 0.5).abs() < 0.01, "{}", e.time);
    assert!(e.location.norm() < 1e-6);
    let fit = e.stats.blowup.unwrap();
    assert!((fit.exponent - 0.5).abs() < 0.05, "{fit:?}");
    assert!((fit.t_hat - 0.5).abs() < 0.01);
    assert!(fit.rate_lower_bound > 0.0);
}

#[test]
fn blowup_fit_recovers_exact_rate() {
    let rows: Vec<(f64, f64)> = (0..40).map(|k| 0.01 * k as f64).map(|t| (t, 3.0 * (0.5 - t).powf(-0.5))).collect();
    let fit = fit_blowup(&rows).unwrap();
    assert!((fit.t_hat - 0.5).abs() < 1e-6 && (fit.exponent - 0.5).abs() < 1e-6, "{fit:?}");
    assert!(fit_blowup(&rows[..3]).is_none());
}

#[test]
fn section6_flags_the_central_curve() {
    let n = build_section6(2.0, 1.0, 0.3, 30).unwrap();
    let k0 = curvature_norms(&n).linf;
    let traj = run(&n, &FlowConfig { samples: 30, t_end: 2.0, ..FlowConfig::default() }).unwrap();
    let e = &traj.events[0];
    assert_eq!(e.kind, EventKind::Type0Interior);
    assert_eq!(e.curve, Some(CurveId(0)));
    assert!(e.time > 0.0 && e.time < 2.0);
    assert!(e.location.norm() < 1e-8);
    assert!(traj.series.iter().all(|r| r.kappa_linf <= 10.0 * k0.max(1.0)));
}

#[test]
fn symmetric_h_collapses_to_a_regular_four_point() {
    let h = h_network(1e-6, 1.0, false, 20).unwrap();
    let (c, v) = collapse_interior(&h, CurveId(0), &opts()).unwrap();
    assert_eq!(v, VertexId(0));
    assert_eq!(c.vertex(v).unwrap().kind, VertexKind::QuadruplePoint);
    assert!(c.vertex(v).unwrap().position.norm() < 1e-15);
    assert_angles(&arm_angles(&c, v), &[30.0, 150.0, 210.0, 330.0], 1e-9);
    assert!(c.curve(CurveId(0)).is_err());
    assert!(is_tree(&c).unwrap());

    let flat = h_network(1e-6, 1.0, true, 20).unwrap();
    let (c, v) = collapse_interior(&flat, CurveId(0), &opts()).unwrap();
    assert!(c.vertex(v).unwrap().position.norm() < 1e-15);
    assert_angles(&arm_angles(&c, v), &[60.0, 120.0, 240.0, 300.0], 1e-9);
}

#[test]
fn reprojection_is_idempotent() {
    let h = h_network(1e-6, 1.0, false, 20).unwrap();
    let (c, v) = collapse_interior(&h, CurveId(0), &opts()).unwrap();
    let again = reproject_four_point(&c, v).unwrap();
    assert_eq!(again, c);
    // A skewed four-point is reprojected to opposite pairs in one application.
    let skew = radial_four(&[55.0, 122.0, 243.0, 298.0]);
    let once = reproject_four_point(&skew, VertexId(0)).unwrap();
    let a = arm_angles(&once, VertexId(0));
    assert!(((a[2] - a[0]) - 180.0).abs() < 1e-9 && ((a[3] - a[1]) - 180.0).abs() < 1e-9, "{a:?}");
    assert_eq!(reproject_four_point(&once, VertexId(0)).unwrap(), once);
}

fn radial_four(deg: &[f64]) -> Network {
    let mut vertices = vec![vertex(0, VertexKind::QuadruplePoint, Point2::ORIGIN)];
    let mut curves = Vec::new();
    for (k, d) in deg.iter().enumerate() {
        let end = Point2::from_angle(d.to_radians());
        vertices.push(endpoint(k + 1, end));
        curves.push(line(k, 0, k + 1, Point2::ORIGIN, end, 20));
    }
    Network::new(vertices, curves, big_disk()).unwrap()
}

#[test]
fn collapse_interior_rejects_other_curves() {
    let h = h_network(1e-6, 1.0, false, 20).unwrap();
    assert!(matches!(collapse_interior(&h, CurveId(1), &opts()), Err(Error::NotInnerCurve(CurveId(1)))));
    let long = h_network(0.5, 1.0, false, 20).unwrap();
    assert!(matches!(collapse_interior(&long, CurveId(0), &opts()), Err(Error::NotShortEnough { .. })));
}

#[test]
fn reopen_cross_inserts_a_transverse_stub() {
    let h = h_network(1e-6, 1.0, false, 20).unwrap();
    let (c, v) = collapse_interior(&h, CurveId(0), &opts()).unwrap();
    let delta = 0.05;
    let r = reopen_cross(&c, v, delta, &opts()).unwrap();
    let stub = r.curve(c.next_curve_id()).unwrap();
    let (a, b) = (stub.end_point(CurveEnd::Start), stub.end_point(CurveEnd::End));
    let mut xs = [a.x, b.x];
    xs.sort_by(f64::total_cmp);
    assert!((xs[0] + delta / 2.0).abs() < 1e-12 && (xs[1] - delta / 2.0).abs() < 1e-12, "{a:?} {b:?}");
    assert!(a.y.abs() < 1e-12 && b.y.abs() < 1e-12);
    assert!((stub.length() - delta).abs() < 1e-12);
    assert_valid(&r);
    assert_eq!(r.vertices_of_kind(VertexKind::TripleJunction).len(), 2);
}

#[test]
fn reopen_with_zero_length_is_a_no_op() {
    let h = h_network(1e-6, 1.0, false, 20).unwrap();
    let (c, v) = collapse_interior(&h, CurveId(0), &opts()).unwrap();
    assert_eq!(reopen_cross(&c, v, 0.0, &opts()).unwrap(), c);
}

#[test]
fn reopen_cross_rejects_right_angles_and_non_four_points() {
    let plus = radial_four(&[0.0, 90.0, 180.0, 270.0]);
    assert!(matches!(reopen_cross(&plus, VertexId(0), 0.05, &opts()), Err(Error::NoAdmissibleOpening(VertexId(0)))));
    let h = h_network(0.5, 1.0, false, 20).unwrap();
    assert!(matches!(reopen_cross(&h, VertexId(0), 0.05, &opts()), Err(Error::NotFourPoint(_))));
}

#[test]
fn collapse_and_reopen_bound_the_length_change() {
    for stub in [1e-6, 1e-4, 5e-4] {
        let h = h_network(stub, 1.0, false, 40).unwrap();
        let removed = h.curve(CurveId(0)).unwrap().length();
        let (c, v) = collapse_interior(&h, CurveId(0), &opts()).unwrap();
        let delta = 0.02;
        let r = reopen_cross(&c, v, delta, &opts()).unwrap();
        let change = (r.total_length() - h.total_length()).abs();
        assert!(change <= removed + delta * (1.0 + 1e-6), "{change} {removed}");
    }
}

#[test]
fn symmetric_y_boundary_collapse_gives_120_degrees() {
    let y = symmetric_y(1e-6, 1.0, 20).unwrap();
    let (c, p) = collapse_boundary(&y, CurveId(0), &opts()).unwrap();
    assert_eq!(p, VertexId(0));
    assert_eq!(c.valence(p), 2);
    assert_angles(&arm_angles(&c, p), &[30.0, 150.0], 1e-9);
    assert!(c.vertex(VertexId(1)).is_err());
    assert!(is_tree(&c).unwrap());
}

#[test]
fn boundary_collapse_matches_the_doubled_interior_collapse() {
    let (c, p) = collapse_boundary(&symmetric_y(1e-6, 1.0, 20).unwrap(), CurveId(0), &opts()).unwrap();
    let (d, v) = collapse_interior(&h_network(2e-6, 1.0, false, 20).unwrap(), CurveId(0), &opts()).unwrap();
    let upper: Vec<f64> = arm_angles(&d, v).into_iter().filter(|a| *a < 180.0).collect();
    assert_angles(&upper, &arm_angles(&c, p), 1e-9);
}

#[test]
fn collapse_boundary_rejects_inner_curves() {
    let h = h_network(1e-6, 1.0, false, 20).unwrap();
    assert!(matches!(collapse_boundary(&h, CurveId(0), &opts()), Err(Error::NotBoundaryCurve(CurveId(0)))));
}

#[test]
fn reopen_boundary_symmetric_case() {
    let y = symmetric_y(1e-6, 1.0, 20).unwrap();
    let (c, p) = collapse_boundary(&y, CurveId(0), &opts()).unwrap();
    let delta = 0.05;
    let r = reopen_boundary(&c, p, delta, &opts()).unwrap();
    assert_valid(&r);
    let j = r.vertices_of_kind(VertexKind::TripleJunction)[0];
    let at = r.vertex(j).unwrap().position;
    assert!(at.x.abs() < 1e-12 && (at.y - delta).abs() < 1e-12, "{at:?}");
    assert_angles(&arm_angles(&r, j), &[30.0, 150.0, 270.0], 1e-9);
    assert!(hausdorff_distance(&r, &y) <= 2.0 * delta);
}

#[test]
fn reopen_boundary_errors() {
    let y = symmetric_y(1e-6, 1.0, 20).unwrap();
    let (c, p) = collapse_boundary(&y, CurveId(0), &opts()).unwrap();
    assert!(matches!(reopen_boundary(&c, p, 0.9, &opts()), Err(Error::DeltaTooLarge { .. })));
    assert!(matches!(reopen_boundary(&y, VertexId(0), 0.05, &opts()), Err(Error::NotCollapsedEndpoint(_))));
}

#[test]
fn section6_surgery_outputs_are_regular_trees() {
    let n = build_section6(2.0, 1.0, 0.3, 30).unwrap();
    let traj = run(
        &n,
        &FlowConfig {
            samples: 30,
            surgery_enabled: true,
            t_end: 2.5,
            stop_on_steady_state: false,
            ..FlowConfig::default()
        },
    )
    .unwrap();
    assert_eq!(traj.surgeries.len(), 1);
    let s = &traj.surgeries[0];
    assert_eq!(s.event, EventKind::Type0Interior);
    assert_eq!(s.removed, CurveId(0));
    let after = traj.snapshots.iter().find(|x| x.t > s.t).unwrap();
    assert!(is_tree(&after.network).unwrap());
    assert!(traj.series.iter().all(|r| r.angle_residual < 1e-6));
    assert_eq!(traj.events.len(), 1);
}

#[test]
fn tree_scenarios_never_blow_up() {
    let cases: Vec<(Network, f64)> = vec![
        (build_section6(2.0, 1.0, 0.3, 30).unwrap(), 0.5),
        (semicircle(30).unwrap(), 0.5),
        (semicircle_triod(30).unwrap(), 0.5),
        (standard_triod(1.0, 30).unwrap(), 0.05),
    ];
    for (n, t_end) in cases {
        let traj = run(&n, &FlowConfig { samples: 30, t_end, ..FlowConfig::default() }).unwrap();
        assert!(traj.events.iter().all(|e| e.kind != EventKind::CurvatureBlowup), "{:?}", traj.events);
    }
}
