//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::{E, TAU};
use std::fs;
use std::time::{Duration, Instant};

use common::{max_displacement, observed_order, segment_network};
use netflow::diagnostics::{
    gaussian_density, monotonicity_check, monotonicity_check_with, DensityProbe, ModelNetwork, MonotonicityOptions,
};
use netflow::events::EventKind;
use netflow::geometry::hausdorff_distance;
use netflow::io::{network_to_string, parse_network, write_run_report, RunReport};
use netflow::junctions::{junction_identity_residuals, JunctionTriple};
use netflow::scenarios::{
    build, build_section6, circle_validation, semicircle, semicircle_triod, standard_triod, steiner4, Scenario,
    Section6Params,
};
use netflow::solver::{run, FlowConfig, SeriesRow, StopReason, Trajectory};
use netflow::{ConvexDomain, CurveId, CurveSamples, Network, Point2, Vertex, VertexId, VertexKind};
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Straight arms of length 12 from the origin in the given directions (degrees).
fn radial(kind: VertexKind, degrees: &[f64]) -> Network {
    let mut vertices = vec![Vertex::new(VertexId(0), kind, Point2::ORIGIN)];
    let mut curves = Vec::new();
    for (k, d) in degrees.iter().enumerate() {
        let end = Point2::from_angle(d.to_radians()) * 12.0;
        vertices.push(Vertex::new(VertexId(k + 1), VertexKind::FixedEndpoint, end));
        let pts = netflow::scenarios::straight_samples(Point2::ORIGIN, end, 400);
        curves.push(CurveSamples::open(CurveId(k), VertexId(0), VertexId(k + 1), pts).unwrap());
    }
    Network::new(vertices, curves, ConvexDomain::disk(Point2::ORIGIN, 24.0).unwrap()).unwrap()
}

fn criterion_1() -> Outcome {
    let probe = DensityProbe::new(Point2::ORIGIN, 1.0);
    let sampled = [
        ("halfline", segment_network(Point2::ORIGIN, Point2::new(12.0, 0.0), 400), 0.5),
        ("line", segment_network(Point2::new(-12.0, 0.0), Point2::new(12.0, 0.0), 800), 1.0),
        ("triod", radial(VertexKind::TripleJunction, &[90.0, 210.0, 330.0]), 1.5),
        ("cross", radial(VertexKind::QuadruplePoint, &[30.0, 150.0, 210.0, 330.0]), 2.0),
    ];
    let models = [
        ModelNetwork::halfline(Point2::ORIGIN, Point2::new(1.0, 0.0)),
        ModelNetwork::line(Point2::ORIGIN, Point2::new(1.0, 0.0)),
        ModelNetwork::standard_triod(Point2::ORIGIN, 0.0),
        ModelNetwork::standard_cross(Point2::ORIGIN, 0.0),
    ];
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for ((name, n, want), model) in sampled.iter().zip(&models) {
        let got = gaussian_density(n, 0.0, &probe).unwrap();
        let exact = model.gaussian_density(0.0, &probe).unwrap();
        worst = worst.max((got - want).abs()).max((exact - want).abs());
        parts.push(format!("{name} {got:.9}"));
    }
    outcome(worst < 1e-6, format!("{}; max error {worst:.1e}", parts.join(", ")))
}

fn criterion_2() -> Outcome {
    let cfg = FlowConfig { t_end: 0.6, dt: 1e-5, samples: 200, record_every: 100, ..FlowConfig::default() };
    let traj = run(&circle_validation(1.0, 200).unwrap(), &cfg).unwrap();
    let worst = traj
        .snapshots
        .iter()
        .filter(|s| s.t <= 0.45)
        .map(|s| (s.network.total_length() / TAU / (1.0 - 2.0 * s.t).sqrt() - 1.0).abs())
        .fold(0.0, f64::max);
    let Some(event) = traj.events.last().filter(|e| e.kind == EventKind::Extinction) else {
        return outcome(false, "no extinction event".into());
    };
    let t_hat = event.stats.blowup.map_or(event.time, |f| f.t_hat);
    let report = monotonicity_check(&traj, &DensityProbe::new(event.location, t_hat));
    let want = (TAU / E).sqrt();
    let limit = report.limit.unwrap_or(f64::NAN);
    let rel = (limit / want - 1.0).abs();
    outcome(
        worst < 0.01 && rel < 0.02,
        format!("max radius error {worst:.2e} up to t=0.45; extinction at {t_hat:.5}; density limit {limit:.6} vs {want:.6} ({:.2}%)", 100.0 * rel),
    )
}

fn criterion_3() -> Outcome {
    let cfg = FlowConfig {
        t_end: 1.0,
        dt: 1e-4,
        samples: 100,
        stop_on_steady_state: false,
        record_every: 10_000,
        ..FlowConfig::default()
    };
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, n) in
        [("triod", standard_triod(1.0, 100).unwrap()), ("segment", netflow::scenarios::straight_segment(100).unwrap())]
    {
        let traj = run(&n, &cfg).unwrap();
        let steps = traj.series.last().unwrap().step;
        let d = max_displacement(&n, traj.final_network());
        pass &= steps >= 10_000 && d < 1e-10 && traj.events.is_empty();
        parts.push(format!("{name} {steps} steps, max displacement {d:.1e}"));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let levels = [100usize, 200, 400];
    let mut rows = Vec::new();
    for &m in &levels {
        let dt = 1e-4 * (100.0 / m as f64).powi(2);
        let cfg = FlowConfig {
            dt,
            samples: m,
            t_end: 0.05,
            stop_on_steady_state: false,
            record_every: 100_000,
            ..FlowConfig::default()
        }
        .with_resample_interval(0.005);
        let traj = run(&semicircle_triod(m).unwrap(), &cfg).unwrap();
        let t = JunctionTriple::from_network(traj.final_network(), VertexId(0)).unwrap();
        rows.push(junction_identity_residuals(&t).as_array());
    }
    let hs: Vec<f64> = levels.iter().map(|m| 1.0 / *m as f64).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 0..4 {
        let errs: Vec<f64> = rows.iter().map(|r| r[k]).collect();
        if errs.iter().all(|e| *e < 1e-12) {
            parts.push(format!("r{} {:.1e}/{:.1e}/{:.1e} (roundoff)", k + 1, errs[0], errs[1], errs[2]));
            continue;
        }
        let order = observed_order(&hs, &errs);
        pass &= errs.windows(2).all(|w| w[1] < w[0]) && order >= 1.0;
        parts.push(format!("r{} {:.1e}/{:.1e}/{:.1e} order {order:.2}", k + 1, errs[0], errs[1], errs[2]));
    }
    outcome(pass, parts.join("; "))
}

/// Runs of every shipped scenario, shared by the monotonicity and
/// interpolation criteria.
fn scenario_runs() -> Vec<(&'static str, Trajectory, Vec<DensityProbe>)> {
    let cfg =
        |t_end: f64, m: usize| FlowConfig { t_end, samples: m, stop_on_steady_state: false, ..FlowConfig::default() };
    let probes = |pts: &[(f64, f64)], t0: f64| {
        pts.iter().map(|&(x, y)| DensityProbe::new(Point2::new(x, y), t0)).collect::<Vec<_>>()
    };
    vec![
        (
            "section6",
            run(&build_section6(2.0, 1.0, 0.3, 50).unwrap(), &cfg(0.5, 50)).unwrap(),
            probes(&[(0.0, 0.0), (0.0, 0.3), (0.5, 0.4), (-1.0, -0.5), (1.0, 0.0)], 0.51),
        ),
        (
            "triod",
            run(&standard_triod(1.0, 50).unwrap(), &cfg(0.05, 50)).unwrap(),
            probes(&[(0.0, 0.0), (0.2, 0.1), (-0.3, 0.3)], 0.06),
        ),
        (
            "semicircle",
            run(&semicircle(50).unwrap(), &cfg(0.3, 50)).unwrap(),
            probes(&[(0.0, 0.5), (0.3, 0.3), (-0.5, 0.6), (0.0, 0.9)], 0.31),
        ),
        (
            "circle-validation",
            run(&circle_validation(1.0, 100).unwrap(), &cfg(0.45, 100)).unwrap(),
            probes(&[(0.0, 0.0), (0.2, 0.1), (0.5, -0.3)], 0.5),
        ),
        (
            "semicircle-triod",
            run(&semicircle_triod(50).unwrap(), &cfg(0.3, 50)).unwrap(),
            probes(&[(0.0, -0.3), (0.3, 0.3), (-0.3, 0.2), (0.0, 0.5)], 0.31),
        ),
    ]
}

/// Largest window σ = t0 − t at which the backward heat kernel centred at
/// `p0` is below `1e-2` of its peak at every fixed endpoint of `n`.
fn interior_sigma_max(n: &Network, p0: Point2) -> Option<f64> {
    n.vertices_of_kind(VertexKind::FixedEndpoint)
        .into_iter()
        .map(|v| n.vertex(v).unwrap().position.distance(p0))
        .reduce(f64::min)
        .map(|d| d * d / (4.0 * 100f64.ln()))
}

fn criterion_5(runs: &[(&str, Trajectory, Vec<DensityProbe>)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut short = 0;
    let mut parts = Vec::new();
    for (name, traj, probes) in runs {
        let n0 = &traj.snapshots[0].network;
        let (mut inc, mut full) = (0.0f64, 0.0f64);
        for p in probes {
            let opts =
                MonotonicityOptions { sigma_max: interior_sigma_max(n0, p.p0), ..MonotonicityOptions::default() };
            let r = monotonicity_check_with(traj, p, &opts);
            if r.series.len() < 10 {
                short += 1;
            }
            inc = inc.max(r.max_increment);
            full = full.max(monotonicity_check(traj, p).max_increment);
        }
        worst = worst.max(inc);
        parts.push(format!("{name} {inc:.1e} (whole run {full:.1e})"));
    }
    outcome(
        worst < 1e-3 && short == 0,
        format!(
            "max increment while endpoints are outside the kernel: {}; probes with fewer than 10 samples: {short}",
            parts.join(", ")
        ),
    )
}

fn min_margin(series: &[SeriesRow]) -> Option<f64> {
    series.iter().filter_map(|r| r.interpolation_margin).reduce(f64::min)
}

fn criterion_6() -> (Outcome, Trajectory) {
    let n0 = build_section6(2.0, 1.0, 0.3, 100).unwrap();
    let k0 = netflow::diagnostics::curvature_norms(&n0).linf;
    let plain = run(&n0, &FlowConfig { samples: 100, t_end: 20.0, ..FlowConfig::default() }).unwrap();
    let event = plain.events.first();
    let type0 = matches!(event, Some(e) if e.kind == EventKind::Type0Interior && e.curve == Some(CurveId(0)))
        && plain.stop == StopReason::Event(EventKind::Type0Interior);
    let k_max = plain.series.iter().map(|r| r.kappa_linf).fold(0.0, f64::max);
    let bounded = k_max <= 10.0 * k0;

    let with =
        run(&n0, &FlowConfig { samples: 100, t_end: 20.0, surgery_enabled: true, ..FlowConfig::default() }).unwrap();
    let steady = with.stop == StopReason::Event(EventKind::SteadyState)
        && with.events.iter().map(|e| e.kind).collect::<Vec<_>>() == [EventKind::Type0Interior, EventKind::SteadyState];
    let (m, l_star) = steiner4(2.0, 1.0, 100).unwrap();
    let d = hausdorff_distance(with.final_network(), &m);
    (
        outcome(
            type0 && bounded && steady && d < 1e-2,
            format!(
                "Type0Interior on curve 0 at t={:.4}; max |k| {k_max:.3} vs initial {k0:.3}; with surgery stop {:?} at t={:.3}, Hausdorff {d:.2e}, length {:.8} vs {:.8}",
                event.map_or(f64::NAN, |e| e.time),
                with.stop,
                with.final_time(),
                with.final_network().total_length(),
                l_star
            ),
        ),
        with,
    )
}

/// Sum of distances for the horizontal-edge topology, minimized by
/// alternating Weiszfeld updates of the two junctions.
fn brute_force_steiner(a: f64, b: f64) -> f64 {
    let e = [Point2::new(a, b), Point2::new(-a, b), Point2::new(-a, -b), Point2::new(a, -b)];
    let fermat = |q: [Point2; 3], mut x: Point2| {
        for _ in 0..200 {
            let (mut num, mut den) = (Point2::ORIGIN, 0.0);
            for p in q {
                let d = p.distance(x).max(1e-300);
                num += p * (1.0 / d);
                den += 1.0 / d;
            }
            let next = num * (1.0 / den);
            if next.distance(x) < 1e-16 {
                return next;
            }
            x = next;
        }
        x
    };
    let (mut jl, mut jr) = (Point2::new(-a / 2.0, 0.1), Point2::new(a / 3.0, -0.2));
    let length = |jl: Point2, jr: Point2| {
        jl.distance(jr) + jl.distance(e[1]) + jl.distance(e[2]) + jr.distance(e[0]) + jr.distance(e[3])
    };
    let mut prev = f64::INFINITY;
    for _ in 0..100_000 {
        jl = fermat([jr, e[1], e[2]], jl);
        jr = fermat([jl, e[0], e[3]], jr);
        let l = length(jl, jr);
        if (prev - l).abs() < 1e-15 {
            break;
        }
        prev = l;
    }
    length(jl, jr)
}

fn criterion_7() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let b: f64 = rng.gen_range(0.2..2.0);
        let a = b / 3f64.sqrt() * rng.gen_range(1.2..5.0);
        let (_, l) = steiner4(a, b, 10).unwrap();
        worst = worst.max((l - brute_force_steiner(a, b)).abs());
    }
    outcome(worst < 1e-6, format!("20 random (a, b): max |closed form - optimizer| {worst:.1e}"))
}

fn criterion_8(runs: &[(&str, Trajectory, Vec<DensityProbe>)], s6: &Trajectory) -> Outcome {
    let mut parts = Vec::new();
    let mut worst = f64::INFINITY;
    let trees = runs.iter().filter(|(name, ..)| *name != "circle-validation").map(|(name, t, _)| (*name, t));
    for (name, traj) in trees.chain(std::iter::once(("section6 with surgery", s6))) {
        let m = min_margin(&traj.series).unwrap_or(f64::NAN);
        worst = worst.min(m);
        parts.push(format!("{name} {m:.3e}"));
    }
    outcome(worst >= 0.0, format!("min margin over all steps: {}", parts.join(", ")))
}

fn criterion_9() -> Outcome {
    let n = build_section6(2.0, 1.0, 0.3, 30).unwrap();
    let cfg = FlowConfig { samples: 30, t_end: 0.1, ..FlowConfig::default() };
    let probe = DensityProbe::new(Point2::new(0.0, 0.2), 0.12);
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let traj = run(&n, &cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = RunReport {
            source: "acceptance".into(),
            config: &cfg,
            trajectory: &traj,
            densities: vec![monotonicity_check(&traj, &probe)],
            l2_horizon: None,
        };
        write_run_report(dir.path(), &report).unwrap();
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
            .collect();
        files.sort();
        outputs.push(files);
    }
    let identical = outputs[0] == outputs[1];
    let mut round_trips = 0;
    let scenarios = [
        Scenario::Section6,
        Scenario::Triod,
        Scenario::Semicircle,
        Scenario::CircleValidation,
        Scenario::SemicircleTriod,
    ];
    for s in scenarios {
        let text = network_to_string(&build(s, Section6Params::default(), 40).unwrap()).unwrap();
        if network_to_string(&parse_network(&text).unwrap()).unwrap() == text {
            round_trips += 1;
        }
    }
    outcome(
        identical && round_trips == scenarios.len(),
        format!(
            "{} report files byte-identical: {identical}; {round_trips}/{} network files round-trip",
            outputs[0].len(),
            scenarios.len()
        ),
    )
}

/// Runs the criteria named on the command line (all of them by default).
fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let on = |k: usize| wanted.is_empty() || wanted.contains(&k);
    let mut all = true;
    let mut report = |k: usize, limit: Option<Duration>, start: Instant, o: Outcome| {
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = o.pass && in_time;
        all &= pass;
        let budget = limit.map_or(String::new(), |l| format!(" / {} s", l.as_secs()));
        println!(
            "criterion {k}: {} ({:.1} s{budget}) {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            o.detail
        );
    };
    let second = Duration::from_secs;
    type Criterion = (usize, u64, fn() -> Outcome);
    let simple: [Criterion; 3] = [(1, 1, criterion_1), (2, 30, criterion_2), (3, 10, criterion_3)];
    for (k, limit, f) in simple {
        if on(k) {
            let t = Instant::now();
            report(k, Some(second(limit)), t, f());
        }
    }
    if on(4) {
        let t = Instant::now();
        report(4, Some(second(120)), t, criterion_4());
    }
    let runs = (on(5) || on(8)).then(|| {
        let t = Instant::now();
        let runs = scenario_runs();
        (runs, t)
    });
    if let (true, Some((runs, t))) = (on(5), &runs) {
        let c5 = criterion_5(runs);
        report(5, Some(second(60)), *t, c5);
    }
    let s6 = (on(6) || on(8)).then(|| {
        let t = Instant::now();
        let (c6, s6) = criterion_6();
        (c6, s6, t)
    });
    let s6 = s6.map(|(c6, s6, t)| {
        if on(6) {
            report(6, Some(second(300)), t, c6);
        }
        s6
    });
    if on(7) {
        let t = Instant::now();
        report(7, Some(second(30)), t, criterion_7());
    }
    if let (true, Some((runs, _)), Some(s6)) = (on(8), &runs, &s6) {
        let t = Instant::now();
        report(8, None, t, criterion_8(runs, s6));
    }
    if on(9) {
        let t = Instant::now();
        report(9, Some(second(5)), t, criterion_9());
    }
    if !all {
        std::process::exit(1);
    }
}
