//! Command-line driver: builds or reads a network, runs the flow, evaluates
//! density probes and writes a run report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, ValueEnum};
use netflow::diagnostics::{l2_bound_horizon, monotonicity_check, DensityProbe, DensityReport};
use netflow::io::{append_events, read_network, write_run_report, RunReport};
use netflow::scenarios::{build, Scenario, Section6Params};
use netflow::solver::{run, FlowConfig, StopReason};
use netflow::{CurveSamples, Error, Network, Point2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Section6,
    Triod,
    Semicircle,
    CircleValidation,
    SemicircleTriod,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::Section6 => Scenario::Section6,
            ScenarioArg::Triod => Scenario::Triod,
            ScenarioArg::Semicircle => Scenario::Semicircle,
            ScenarioArg::CircleValidation => Scenario::CircleValidation,
            ScenarioArg::SemicircleTriod => Scenario::SemicircleTriod,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "netflow", version, about = "Curvature flow of planar triple-junction networks")]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "scenario"]))]
struct Args {
    /// Network file to evolve.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Built-in initial network.
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Half-width of the section6 endpoint rectangle.
    #[arg(long, default_value_t = 2.0)]
    a: f64,
    /// Half-height of the section6 endpoint rectangle.
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// Half-length of the section6 inner curve.
    #[arg(long, default_value_t = 0.3)]
    bulge: f64,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    /// Chords per curve.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    surgery: Switch,
    /// Opening length used when restarting after a collapse.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    min_length_eps: Option<f64>,
    #[arg(long)]
    curvature_blowup_k: Option<f64>,
    #[arg(long)]
    resample_every: Option<usize>,
    /// Snapshot cadence in steps.
    #[arg(long, default_value_t = 10)]
    record_every: usize,
    /// Keep running after the flow becomes stationary.
    #[arg(long)]
    no_steady_stop: bool,
    /// Density probe "x,y,t0"; repeatable.
    #[arg(long = "probe", value_parser = parse_probe)]
    probes: Vec<DensityProbe>,
    #[arg(long, env = "NETFLOW_OUTPUT_DIR", default_value = "netflow-out")]
    output_dir: PathBuf,
    /// Append event records to this file.
    #[arg(long)]
    log_events: Option<PathBuf>,
    /// Normal displacement amplitude applied to interior samples, in units of the mean spacing.
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant C of the L² curvature bound; enables the horizon in the report.
    #[arg(long)]
    l2_constant: Option<f64>,
}

fn parse_probe(s: &str) -> Result<DensityProbe, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected \"x,y,t0\", got {s:?}"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(DensityProbe::new(Point2::new(v[0], v[1]), v[2]))
}

fn is_numerical(e: &Error) -> bool {
    matches!(
        e,
        Error::SingularSystem
            | Error::AngleIterationDiverged { .. }
            | Error::StepRejected { .. }
            | Error::InconsistentJunction { .. }
            | Error::DeltaTooLarge { .. }
            | Error::NoAdmissibleOpening(_)
    )
}

fn jitter_curve(c: &CurveSamples, amp: f64, rng: &mut StdRng) -> netflow::Result<CurveSamples> {
    let n = c.points().len();
    let keep = if c.is_closed() { 0 } else { 3 };
    let pts = c
        .points()
        .iter()
        .zip(c.normals())
        .enumerate()
        .map(|(j, (&p, &nu))| if j < keep || j + keep >= n { p } else { p + nu * (amp * rng.gen_range(-1.0..1.0)) })
        .collect();
    c.with_points(pts)
}

fn jitter(n: &Network, amp: f64, seed: u64) -> netflow::Result<Network> {
    let (_, h) = n.spacing();
    let mut rng = StdRng::seed_from_u64(seed);
    let curves = n.curves().map(|c| jitter_curve(c, amp * h, &mut rng)).collect::<netflow::Result<Vec<_>>>()?;
    if n.is_closed_curve() {
        let c = curves.into_iter().next().expect("closed network has one curve");
        Network::closed_curve(c, n.domain().clone())
    } else {
        Network::new(n.vertices().cloned().collect(), curves, n.domain().clone())
    }
}

fn densities(traj: &netflow::solver::Trajectory, probes: &[DensityProbe]) -> Vec<DensityReport> {
    std::thread::scope(|s| {
        let handles: Vec<_> = probes.iter().map(|p| s.spawn(move || monotonicity_check(traj, p))).collect();
        handles.into_iter().map(|h| h.join().expect("density worker panicked")).collect()
    })
}

fn execute(args: &Args) -> netflow::Result<StopReason> {
    let (n0, source) = match (&args.input, args.scenario) {
        (Some(path), _) => (read_network(path)?, path.display().to_string()),
        (None, Some(s)) => {
            let p = Section6Params { a: args.a, b: args.b, bulge: args.bulge };
            let s: Scenario = s.into();
            (build(s, p, args.samples)?, format!("scenario:{}", s.name()))
        }
        (None, None) => unreachable!("clap requires --input or --scenario"),
    };
    let n0 = if args.jitter > 0.0 { jitter(&n0, args.jitter, args.seed)? } else { n0 };

    let mut cfg = FlowConfig {
        dt: args.dt,
        samples: args.samples,
        t_end: args.t_end,
        min_length_eps: args.min_length_eps,
        curvature_blowup_k: args.curvature_blowup_k,
        surgery_enabled: args.surgery == Switch::On,
        surgery_delta: args.delta,
        stop_on_steady_state: !args.no_steady_stop,
        record_every: args.record_every,
        ..FlowConfig::default()
    };
    if let Some(r) = args.resample_every {
        cfg.resample_every = r;
    }
    let traj = run(&n0, &cfg)?;
    let reports = densities(&traj, &args.probes);
    let report = RunReport {
        source,
        config: &cfg,
        trajectory: &traj,
        densities: reports,
        l2_horizon: args.l2_constant.map(|c| l2_bound_horizon(&n0, c)),
    };
    write_run_report(&args.output_dir, &report)?;
    if let Some(path) = &args.log_events {
        append_events(path, &traj.events)?;
    }
    for e in &traj.events {
        eprintln!("event {:?} at t = {:.6} ({:.6}, {:.6})", e.kind, e.time, e.location.x, e.location.y);
    }
    eprintln!("stopped: {:?} at t = {:.6}", traj.stop, traj.final_time());
    Ok(traj.stop)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::SUCCESS;
            }
            if !e.render().to_string().contains("Usage:") {
                eprintln!("\n{}", Args::command().render_usage());
            }
            return ExitCode::from(1);
        }
    };
    match execute(&args) {
        Ok(StopReason::StepRejected) => {
            eprintln!("error: step rejected at the minimal step size");
            ExitCode::from(2)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_numerical(&e) { 2 } else { 1 })
        }
    }
}
