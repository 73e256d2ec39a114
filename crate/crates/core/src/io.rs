//! Network files and run reports.
//!
//! Network files are JSON with a fixed layout: sorted ids, one sample per
//! line, and floats printed with 17 significant digits in the style of C's
//! `%.17g`. Writing a file read from canonical text reproduces it byte for
//! byte.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DensityReport;
use crate::error::{Error, Result};
use crate::events::FlowEvent;
use crate::geometry::{ConvexDomain, CurveEnds, CurveId, CurveSamples, Network, Point2, Vertex, VertexId, VertexKind};
use crate::solver::{FlowConfig, StopReason, SurgeryRecord, Thresholds, Trajectory};

pub const SCHEMA_VERSION: u32 = 1;

/// Formats like C's `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    const PREC: i32 = 17;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", (PREC - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PREC).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PREC - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn kind_name(k: VertexKind) -> &'static str {
    match k {
        VertexKind::FixedEndpoint => "fixed_endpoint",
        VertexKind::TripleJunction => "triple_junction",
        VertexKind::QuadruplePoint => "quadruple_point",
    }
}

fn pair(p: Point2) -> String {
    format!("[{}, {}]", format_g17(p.x), format_g17(p.y))
}

/// Canonical text of a network file.
pub fn network_to_string(n: &Network) -> Result<String> {
    for p in n.all_points() {
        if !p.is_finite() {
            return Err(Error::InvariantViolation("cannot write non-finite samples".into()));
        }
    }
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"schema\": {SCHEMA_VERSION},");
    match n.domain() {
        ConvexDomain::Polygon { vertices } => {
            let vs: Vec<String> = vertices.iter().map(|&p| pair(p)).collect();
            let _ = writeln!(s, "  \"domain\": {{\"type\": \"polygon\", \"vertices\": [{}]}},", vs.join(", "));
        }
        ConvexDomain::Ellipse { center, a, b, rotation } => {
            let _ = writeln!(
                s,
                "  \"domain\": {{\"type\": \"ellipse\", \"center\": {}, \"a\": {}, \"b\": {}, \"rotation\": {}}},",
                pair(*center),
                format_g17(*a),
                format_g17(*b),
                format_g17(*rotation)
            );
        }
    }
    let vertices: Vec<&Vertex> = n.vertices().collect();
    s.push_str("  \"vertices\": [");
    for (k, v) in vertices.iter().enumerate() {
        let _ = write!(
            s,
            "\n    {{\"id\": {}, \"kind\": \"{}\", \"x\": {}, \"y\": {}}}{}",
            v.id.0,
            kind_name(v.kind),
            format_g17(v.position.x),
            format_g17(v.position.y),
            if k + 1 < vertices.len() { "," } else { "" }
        );
    }
    s.push_str(if vertices.is_empty() { "],\n" } else { "\n  ],\n" });
    s.push_str("  \"curves\": [");
    let curves: Vec<&CurveSamples> = n.curves().collect();
    for (k, c) in curves.iter().enumerate() {
        let ends = match c.ends() {
            CurveEnds::Open { start, end } => format!("\"start\": {}, \"end\": {}, \"closed\": false", start.0, end.0),
            CurveEnds::Closed => "\"start\": null, \"end\": null, \"closed\": true".to_string(),
        };
        let _ = write!(s, "\n    {{\"id\": {}, {ends}, \"samples\": [", c.id().0);
        let pts = c.points();
        for (j, &p) in pts.iter().enumerate() {
            let _ = write!(s, "\n      {}{}", pair(p), if j + 1 < pts.len() { "," } else { "" });
        }
        let _ = write!(s, "\n    ]}}{}", if k + 1 < curves.len() { "," } else { "" });
    }
    s.push_str("\n  ]\n}\n");
    Ok(s)
}

pub fn write_network(n: &Network, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, network_to_string(n)?)?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileNetwork {
    schema: u32,
    domain: FileDomain,
    vertices: Vec<FileVertex>,
    curves: Vec<FileCurve>,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum FileDomain {
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
        #[serde(default)]
        rotation: f64,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileVertex {
    id: usize,
    kind: VertexKind,
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileCurve {
    id: usize,
    start: Option<usize>,
    end: Option<usize>,
    #[serde(default)]
    closed: bool,
    samples: Vec<[f64; 2]>,
}

/// Line and column (1-based) of the first `"id": <id>` after `section`.
fn locate(text: &str, section: &str, id: usize) -> (usize, usize) {
    let Some(start) = text.find(&format!("\"{section}\"")) else { return (0, 0) };
    let rest = &text[start..];
    let needle = format!("\"id\": {id}");
    let Some(off) = rest
        .match_indices(&needle)
        .map(|(i, _)| i)
        .find(|&i| !rest[i + needle.len()..].starts_with(|c: char| c.is_ascii_digit()))
    else {
        return (0, 0);
    };
    let before = &text[..start + off];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

/// Parses network text, checking structural invariants only: four-points
/// and two-valent endpoints left by surgery are accepted.
pub fn parse_network(text: &str) -> Result<Network> {
    let file: FileNetwork = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.schema != SCHEMA_VERSION {
        return Err(Error::Parse {
            line: locate(text, "schema", 0).0.max(1),
            column: 1,
            message: format!("unsupported schema version {}", file.schema),
        });
    }
    let pt = |p: [f64; 2]| Point2::new(p[0], p[1]);
    let domain = match file.domain {
        FileDomain::Polygon { vertices } => ConvexDomain::polygon(vertices.into_iter().map(pt).collect())?,
        FileDomain::Ellipse { center, a, b, rotation } => ConvexDomain::Ellipse { center: pt(center), a, b, rotation },
    };
    let ids: std::collections::BTreeSet<usize> = file.vertices.iter().map(|v| v.id).collect();
    let vertices: Vec<Vertex> =
        file.vertices.iter().map(|v| Vertex::new(VertexId(v.id), v.kind, Point2::new(v.x, v.y))).collect();
    let mut curves = Vec::with_capacity(file.curves.len());
    for c in file.curves {
        let pts: Vec<Point2> = c.samples.into_iter().map(pt).collect();
        let parse_err = |message: String| {
            let (line, column) = locate(text, "curves", c.id);
            Error::Parse { line, column, message }
        };
        let curve = if c.closed {
            if c.start.is_some() || c.end.is_some() {
                return Err(parse_err(format!("closed curve {} must not name end vertices", c.id)));
            }
            CurveSamples::closed(CurveId(c.id), pts)?
        } else {
            let (Some(s), Some(e)) = (c.start, c.end) else {
                return Err(parse_err(format!("curve {} is missing an end vertex id", c.id)));
            };
            for v in [s, e] {
                if !ids.contains(&v) {
                    return Err(parse_err(format!("curve {} references unknown vertex {v}", c.id)));
                }
            }
            CurveSamples::open(CurveId(c.id), VertexId(s), VertexId(e), pts)?
        };
        curves.push(curve);
    }
    Network::new(vertices, curves, domain)
}

/// Reads a network file and requires a regular network.
pub fn read_network(path: impl AsRef<Path>) -> Result<Network> {
    let text = fs::read_to_string(path)?;
    let n = parse_network(&text)?;
    n.validate_regular()?;
    Ok(n)
}

/// Everything a run writes to its output directory.
#[derive(Debug, Clone)]
pub struct RunReport<'a> {
    pub source: String,
    pub config: &'a FlowConfig,
    pub trajectory: &'a Trajectory,
    pub densities: Vec<DensityReport>,
    pub l2_horizon: Option<f64>,
}

#[derive(Serialize)]
struct ReportSummary<'a> {
    schema: u32,
    source: &'a str,
    config: &'a FlowConfig,
    thresholds: &'a Thresholds,
    stop: StopReason,
    steps: usize,
    final_time: f64,
    events: usize,
    surgeries: &'a [SurgeryRecord],
    l2_horizon: Option<f64>,
    densities: Vec<DensitySummary>,
}

#[derive(Serialize)]
struct DensitySummary {
    file: String,
    p0: Point2,
    t0: f64,
    samples: usize,
    limit: Option<f64>,
    max_increment: f64,
    tol_mono: f64,
    violation: bool,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One JSON record per line.
pub fn event_lines(events: &[FlowEvent]) -> Result<String> {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).map_err(|e| Error::Io(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

/// Appends event records to a log file, creating it if needed.
pub fn append_events(path: impl AsRef<Path>, events: &[FlowEvent]) -> Result<()> {
    let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(event_lines(events)?.as_bytes())?;
    Ok(())
}

pub fn write_run_report(dir: impl AsRef<Path>, report: &RunReport) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let traj = report.trajectory;
    let g = |x: f64| format_g17(x);

    let mut w = csv::Writer::from_path(dir.join("series.csv")).map_err(csv_err)?;
    w.write_record([
        "step",
        "t",
        "dt",
        "total_length",
        "kappa_l2",
        "kappa_linf",
        "ds_kappa_l2",
        "angle_residual",
        "interpolation_margin",
    ])
    .map_err(csv_err)?;
    for r in &traj.series {
        w.write_record([
            r.step.to_string(),
            g(r.t),
            g(r.dt),
            g(r.total_length),
            g(r.kappa_l2),
            g(r.kappa_linf),
            g(r.ds_kappa_l2),
            g(r.angle_residual),
            r.interpolation_margin.map(g).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("lengths.csv")).map_err(csv_err)?;
    w.write_record(["step", "t", "curve", "length"]).map_err(csv_err)?;
    for r in &traj.series {
        for (id, l) in &r.lengths {
            w.write_record([r.step.to_string(), g(r.t), id.0.to_string(), g(*l)]).map_err(csv_err)?;
        }
    }
    w.flush()?;

    fs::write(dir.join("events.jsonl"), event_lines(&traj.events)?)?;

    let mut summaries = Vec::new();
    for (k, d) in report.densities.iter().enumerate() {
        let file = format!("density_{k}.csv");
        let mut w = csv::Writer::from_path(dir.join(&file)).map_err(csv_err)?;
        w.write_record(["t", "theta"]).map_err(csv_err)?;
        for (t, v) in &d.series {
            w.write_record([g(*t), g(*v)]).map_err(csv_err)?;
        }
        w.flush()?;
        summaries.push(DensitySummary {
            file,
            p0: d.probe.p0,
            t0: d.probe.t0,
            samples: d.series.len(),
            limit: d.limit,
            max_increment: d.max_increment,
            tol_mono: d.tol_mono,
            violation: d.violation,
        });
    }

    write_network(traj.final_network(), dir.join("final_network.json"))?;

    let summary = ReportSummary {
        schema: SCHEMA_VERSION,
        source: &report.source,
        config: report.config,
        thresholds: &traj.thresholds,
        stop: traj.stop,
        steps: traj.series.last().map_or(0, |r| r.step),
        final_time: traj.final_time(),
        events: traj.events.len(),
        surgeries: &traj.surgeries,
        l2_horizon: report.l2_horizon,
        densities: summaries,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    Ok(())
}
