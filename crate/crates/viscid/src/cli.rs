//! Scenario runner: parses run configurations, dispatches the four
//! subcommands, and writes CSV/JSON result files.
//!
//! Exit codes: 0 = ran (including `Unreachable`/`MaxIterations` statuses),
//! 1 = I/O error, 2 = validation error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::extremal::projection_boundary;
use crate::model::{AxisAlignment, ModelParams, Vector};
use crate::solver::{
    newton_polish, solve_intercept, verify_solution, EstimatorKind, InterceptSolution,
    TerminationStatus, VerifyReport, DEFAULT_EPS, DEFAULT_MAX_ITER,
};
use crate::targets::{Problem, Scenario, Trajectory};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "viscid", version, about = "Reachable sets and minimum-time interception for a point mass in a viscous medium")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample reachable-set projection boundaries at given times.
    ReachBoundary(ReachBoundaryArgs),
    /// Solve a minimum-time interception scenario.
    Intercept(InterceptArgs),
    /// Run both estimators side by side (requires v0 = 0).
    CompareEstimators(InterceptArgs),
    /// Re-verify a solution file produced by `intercept`.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Position,
    Velocity,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Problem {
        match p {
            ProblemArg::Position => Problem::Position,
            ProblemArg::Velocity => Problem::Velocity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Simple,
    Best,
}

impl From<EstimatorArg> for EstimatorKind {
    fn from(e: EstimatorArg) -> EstimatorKind {
        match e {
            EstimatorArg::Simple => EstimatorKind::Simple,
            EstimatorArg::Best => EstimatorKind::Best,
        }
    }
}

#[derive(Debug, Args)]
pub struct ReachBoundaryArgs {
    /// Position-space dimension.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Initial speed in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub v0: f64,
    /// Comma-separated list of times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    /// Comma-separated subspace labels, e.g. r1r2,r1v1,v1v2,r1v2.
    #[arg(long, value_delimiter = ',', required = true)]
    pub subspaces: Vec<String>,
    /// Samples per subspace boundary.
    #[arg(long, default_value_t = 360)]
    pub samples: usize,
    /// Output path; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct InterceptArgs {
    /// JSON scenario file; individual flags override its fields.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub problem: Option<ProblemArg>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub v0: Option<f64>,
    /// Initial velocity as a world-frame vector `x,y,...`; the scenario is
    /// reflected into the frame where it lies along the first axis and
    /// outputs are reflected back.
    #[arg(long, value_delimiter = ',', conflicts_with = "v0")]
    pub v0_vec: Option<Vec<f64>>,
    /// Capture radius.
    #[arg(long)]
    pub ell: Option<f64>,
    /// Target Lipschitz constant.
    #[arg(long)]
    pub lip: Option<f64>,
    /// Relative stopping error.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Override of the component-speed bound; values below the problem's
    /// true bound void the convergence guarantee.
    #[arg(long)]
    pub vmax: Option<f64>,
    /// lissajous | rotating-velocity | constant:<x,y,...> | file:<path>
    #[arg(long)]
    pub target: Option<String>,
    /// Sampling step for the verification trajectory in the output.
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    /// Polish the converged time with Newton iteration before output.
    #[arg(long, default_value_t = false)]
    pub polish: bool,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Solution file produced by `intercept --format json`.
    #[arg(long)]
    pub solution: PathBuf,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

/// Target description inside a JSON scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSpec {
    Lissajous,
    RotatingVelocity,
    Constant { point: Vec<f64> },
    File { path: PathBuf, lip: f64 },
}

/// On-disk scenario description (all fields optional; flags override).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub problem: Option<ProblemName>,
    pub n: Option<usize>,
    pub v0: Option<f64>,
    pub ell: Option<f64>,
    pub lip: Option<f64>,
    pub eps: Option<f64>,
    pub estimator: Option<EstimatorKind>,
    pub max_iter: Option<usize>,
    pub vmax: Option<f64>,
    pub target: Option<TargetSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemName {
    Position,
    Velocity,
}

impl From<ProblemName> for Problem {
    fn from(p: ProblemName) -> Problem {
        match p {
            ProblemName::Position => Problem::Position,
            ProblemName::Velocity => Problem::Velocity,
        }
    }
}

/// Full solution document written by `intercept` and read back by `verify`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub schema_version: u32,
    pub scenario: Scenario,
    pub eps: f64,
    pub estimator: EstimatorKind,
    pub solution: InterceptSolution,
    pub polished_t: Option<f64>,
    pub verification: Option<VerifyReport>,
    /// Forward trajectory under the synthesized control, sampled at `dt`.
    pub path: Vec<PathSample>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub r: Vec<f64>,
    pub v: Vec<f64>,
}

/// Maps library errors to the CLI exit-code contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn parse_target(spec: &str) -> Result<TargetSpec, Error> {
    match spec {
        "lissajous" => Ok(TargetSpec::Lissajous),
        "rotating-velocity" => Ok(TargetSpec::RotatingVelocity),
        other => {
            if let Some(rest) = other.strip_prefix("constant:") {
                let point: Result<Vec<f64>, _> =
                    rest.split(',').map(|x| x.trim().parse::<f64>()).collect();
                let point = point.map_err(|_| {
                    Error::InvalidScenario(format!("bad constant target `{rest}`"))
                })?;
                Ok(TargetSpec::Constant { point })
            } else if let Some(rest) = other.strip_prefix("file:") {
                Ok(TargetSpec::File {
                    path: PathBuf::from(rest),
                    lip: f64::NAN, // filled from --lip / scenario file
                })
            } else {
                Err(Error::InvalidScenario(format!(
                    "unknown target `{other}`; expected lissajous, rotating-velocity, constant:<vec>, or file:<path>"
                )))
            }
        }
    }
}

fn build_trajectory(spec: &TargetSpec, lip: Option<f64>) -> Result<Trajectory, Error> {
    match spec {
        TargetSpec::Lissajous => Ok(Trajectory::lissajous()),
        TargetSpec::RotatingVelocity => Ok(Trajectory::rotating_velocity()),
        TargetSpec::Constant { point } => Ok(Trajectory::constant(Vector(point.clone()))),
        TargetSpec::File { path, lip: file_lip } => {
            let lip = lip.or(if file_lip.is_nan() { None } else { Some(*file_lip) });
            let lip = lip.ok_or_else(|| {
                Error::InvalidScenario("file targets need --lip (or lip in the scenario file)".into())
            })?;
            Trajectory::load_csv(path, lip)
        }
    }
}

/// A fully resolved interception run.
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub eps: f64,
    pub estimator: EstimatorKind,
    pub max_iter: usize,
    /// World-frame reflection for `--v0-vec` scenarios; applied to the
    /// target before solving and to vector outputs after.
    pub frame: Option<AxisAlignment>,
    pub warn_vmax: bool,
}

/// Merges scenario file and flags (flags win) into a validated run.
pub fn resolve_run(args: &InterceptArgs) -> Result<ResolvedRun, Error> {
    let file: ScenarioFile = match &args.scenario {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?
        }
        None => ScenarioFile::default(),
    };
    let problem: Problem = match (args.problem, file.problem) {
        (Some(p), _) => p.into(),
        (None, Some(p)) => p.into(),
        (None, None) => {
            return Err(Error::InvalidScenario("missing --problem".into()));
        }
    };
    let mut frame = None;
    let v0 = if let Some(vec) = &args.v0_vec {
        let v = Vector(vec.clone());
        if v.norm() > 0.0 {
            frame = Some(AxisAlignment::to_first_axis(&v)?);
        }
        v.norm()
    } else {
        args.v0.or(file.v0).unwrap_or(0.0)
    };
    let target_spec = match &args.target {
        Some(s) => parse_target(s)?,
        None => file
            .target
            .clone()
            .ok_or_else(|| Error::InvalidScenario("missing --target".into()))?,
    };
    let lip_flag = args.lip.or(file.lip);
    let mut trajectory = build_trajectory(&target_spec, lip_flag)?;
    if let Some(lip) = lip_flag {
        // explicit lip overrides a built-in declaration only upward
        if lip > trajectory.lip {
            trajectory.lip = lip;
        }
    }
    // world-frame targets are reflected into the aligned frame
    if let Some(f) = &frame {
        trajectory = reflect_trajectory(&trajectory, f)?;
    }
    let vmax = args.vmax.or(file.vmax).unwrap_or(problem.vmax());
    let warn_vmax = vmax < problem.vmax();
    let params = ModelParams {
        n: args.n.or(file.n).unwrap_or(trajectory.dim().max(1)),
        v0,
        ell: args.ell.or(file.ell).unwrap_or(0.1),
        lip: trajectory.lip,
        vmax,
    };
    let scenario = Scenario {
        problem,
        params,
        trajectory,
    };
    scenario.validate()?;
    let estimator = args
        .estimator
        .map(EstimatorKind::from)
        .or(file.estimator)
        .unwrap_or(EstimatorKind::Simple);
    Ok(ResolvedRun {
        scenario,
        eps: args.eps.or(file.eps).unwrap_or(DEFAULT_EPS),
        estimator,
        max_iter: args.max_iter.or(file.max_iter).unwrap_or(DEFAULT_MAX_ITER),
        frame,
        warn_vmax,
    })
}

fn reflect_trajectory(tr: &Trajectory, frame: &AxisAlignment) -> Result<Trajectory, Error> {
    use crate::targets::{SampledData, TrajectoryKind};
    let kind = match &tr.kind {
        TrajectoryKind::ConstantPoint(p) => TrajectoryKind::ConstantPoint(frame.apply(p)),
        TrajectoryKind::PiecewiseLinear(d) => TrajectoryKind::PiecewiseLinear(SampledData {
            times: d.times.clone(),
            points: d.points.iter().map(|p| frame.apply(p)).collect(),
        }),
        TrajectoryKind::Sampled(d) => TrajectoryKind::Sampled(SampledData {
            times: d.times.clone(),
            points: d.points.iter().map(|p| frame.apply(p)).collect(),
        }),
        TrajectoryKind::Lissajous | TrajectoryKind::RotatingVelocity => {
            return Err(Error::InvalidScenario(
                "--v0-vec supports constant and sampled targets only; built-ins are defined in the aligned frame".into(),
            ));
        }
    };
    Ok(Trajectory {
        kind,
        lip: tr.lip,
    })
}

fn subspace_coords(label: &str, n: usize) -> Result<Vec<usize>, Error> {
    let bytes = label.as_bytes();
    let mut coords = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let kind = bytes[i] as char;
        i += 1;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let idx: usize = label[start..i].parse().map_err(|_| {
            Error::InvalidScenario(format!("bad subspace label `{label}`"))
        })?;
        if idx == 0 || idx > n {
            return Err(Error::InvalidCoordinate {
                index: idx,
                state_dim: 2 * n,
            });
        }
        let coord = match kind {
            'r' => idx - 1,
            'v' => n + idx - 1,
            _ => {
                return Err(Error::InvalidScenario(format!(
                    "bad subspace label `{label}`: coordinates are r<i> or v<i>"
                )))
            }
        };
        coords.push(coord);
    }
    if coords.is_empty() {
        return Err(Error::InvalidScenario(format!("empty subspace label `{label}`")));
    }
    Ok(coords)
}

fn open_out(path: &Path) -> Result<Box<dyn Write>, Error> {
    if path.as_os_str() == "-" {
        Ok(Box::new(std::io::stdout().lock()))
    } else {
        Ok(Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)))
    }
}

#[derive(Debug, Serialize)]
struct BoundaryRecord {
    time: f64,
    subspace: String,
    index: usize,
    point: Vec<f64>,
}

pub fn cmd_reach_boundary(args: &ReachBoundaryArgs) -> Result<(), Error> {
    let params = ModelParams {
        n: args.n,
        v0: args.v0,
        ell: 0.0,
        lip: 0.0,
        vmax: 1.0,
    };
    params.validate()?;
    if args.samples < 3 {
        return Err(Error::InvalidScenario("--samples must be ≥ 3".into()));
    }
    for &t in &args.times {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidScenario(format!("invalid time {t} in --times")));
        }
    }
    let mut records = Vec::new();
    for &t in &args.times {
        for label in &args.subspaces {
            let coords = subspace_coords(label, args.n)?;
            let m = if t == 0.0 { 3 } else { args.samples.max(3) };
            let pts = projection_boundary(t, &params, &coords, m)?;
            let pts: Vec<Vec<f64>> = if t == 0.0 {
                pts.into_iter().take(1).collect()
            } else {
                pts
            };
            for (index, point) in pts.into_iter().enumerate() {
                records.push(BoundaryRecord {
                    time: t,
                    subspace: label.clone(),
                    index,
                    point,
                });
            }
        }
    }
    let mut out = open_out(&args.out)?;
    match args.format {
        FormatArg::Json => {
            let doc = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "records": records,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
        }
        FormatArg::Csv => {
            let width = records.iter().map(|r| r.point.len()).max().unwrap_or(0);
            write!(out, "time,subspace,index")?;
            for i in 1..=width {
                write!(out, ",c{i}")?;
            }
            writeln!(out)?;
            for r in &records {
                write!(out, "{},{},{}", r.time, r.subspace, r.index)?;
                for c in &r.point {
                    write!(out, ",{c}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Solves a scenario and writes the solution document.
pub fn cmd_intercept(args: &InterceptArgs) -> Result<(), Error> {
    let run = resolve_run(args)?;
    if run.warn_vmax {
        eprintln!(
            "warning: vmax = {} is below the problem's bound {}; the convergence guarantee is void",
            run.scenario.params.vmax,
            run.scenario.problem.vmax()
        );
    }
    let sol = solve_intercept(&run.scenario, run.estimator, run.eps, run.max_iter)?;
    let doc = build_document(&run, sol, args)?;
    write_document(&doc, &run, args)
}

fn build_document(
    run: &ResolvedRun,
    sol: InterceptSolution,
    args: &InterceptArgs,
) -> Result<SolutionDocument, Error> {
    let converged = sol.trace.status == TerminationStatus::Converged;
    let polished_t = if args.polish && converged {
        Some(newton_polish(sol.t_star, &run.scenario, 1e-10)?)
    } else {
        None
    };
    let verification = if converged {
        Some(verify_solution(&sol, &run.scenario, run.eps)?)
    } else {
        None
    };
    let mut path = Vec::new();
    if converged && args.dt > 0.0 {
        let start = crate::model::State::initial(run.scenario.params.v0, run.scenario.params.n);
        let mut t = 0.0f64;
        loop {
            let t_clamped = t.min(sol.t_star);
            let s = crate::model::propagate_const(&start, &sol.control_dir, t_clamped)?;
            let (r, v) = match &run.frame {
                Some(f) => (f.apply(&s.r), f.apply(&s.v)),
                None => (s.r, s.v),
            };
            path.push(PathSample {
                t: t_clamped,
                r: r.0,
                v: v.0,
            });
            if t >= sol.t_star {
                break;
            }
            t += args.dt;
        }
    }
    Ok(SolutionDocument {
        schema_version: SCHEMA_VERSION,
        scenario: run.scenario.clone(),
        eps: run.eps,
        estimator: run.estimator,
        solution: sol,
        polished_t,
        verification,
        path,
    })
}

fn write_document(
    doc: &SolutionDocument,
    run: &ResolvedRun,
    args: &InterceptArgs,
) -> Result<(), Error> {
    let mut out = open_out(&args.out)?;
    match args.format {
        FormatArg::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(doc).expect("serializable"))?;
        }
        FormatArg::Csv => {
            let _ = run;
            writeln!(out, "i,t,dist,step")?;
            for s in &doc.solution.trace.steps {
                writeln!(out, "{},{},{},{}", s.i, s.t, s.dist, s.step)?;
            }
        }
    }
    Ok(())
}

/// Runs both estimators side by side; requires `v0 = 0`.
pub fn cmd_compare_estimators(args: &InterceptArgs) -> Result<(), Error> {
    let run = resolve_run(args)?;
    if run.scenario.params.v0 != 0.0 {
        return Err(Error::InvalidScenario(
            "compare-estimators requires v0 = 0: the best estimator's closed form assumes a resting start".into(),
        ));
    }
    let simple = solve_intercept(&run.scenario, EstimatorKind::Simple, run.eps, run.max_iter)?;
    let best = solve_intercept(&run.scenario, EstimatorKind::Best, run.eps, run.max_iter)?;
    let mut out = open_out(&args.out)?;
    match args.format {
        FormatArg::Json => {
            let doc = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "scenario": run.scenario,
                "eps": run.eps,
                "simple": simple,
                "best": best,
                "iterations": {
                    "simple": simple.trace.k,
                    "best": best.trace.k,
                },
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
        }
        FormatArg::Csv => {
            writeln!(out, "i,t_simple,dist_simple,step_simple,t_best,dist_best,step_best,step_delta")?;
            let rows = simple.trace.steps.len().max(best.trace.steps.len());
            for i in 0..rows {
                let s = simple.trace.steps.get(i);
                let b = best.trace.steps.get(i);
                let field = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
                let delta = match (s, b) {
                    (Some(s), Some(b)) => (b.step - s.step).to_string(),
                    _ => String::new(),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    i,
                    field(s.map(|x| x.t)),
                    field(s.map(|x| x.dist)),
                    field(s.map(|x| x.step)),
                    field(b.map(|x| x.t)),
                    field(b.map(|x| x.dist)),
                    field(b.map(|x| x.step)),
                    delta,
                )?;
            }
        }
    }
    Ok(())
}

/// Re-runs forward verification on a stored solution document.
pub fn cmd_verify(args: &VerifyArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.solution)?;
    let doc: SolutionDocument =
        serde_json::from_str(&text).map_err(|e| Error::Malformed(e.to_string()))?;
    let report = verify_solution(&doc.solution, &doc.scenario, doc.eps)?;
    let mut out = open_out(&args.out)?;
    match args.format {
        FormatArg::Json => {
            let body = serde_json::json!({
                "schema_version": SCHEMA_VERSION,
                "report": report,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&body).expect("serializable"))?;
        }
        FormatArg::Csv => {
            writeln!(out, "t_star,miss,threshold,pass")?;
            writeln!(
                out,
                "{},{},{},{}",
                report.t_star, report.miss, report.threshold, report.pass
            )?;
        }
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::ReachBoundary(args) => cmd_reach_boundary(args),
        Command::Intercept(args) => cmd_intercept(args),
        Command::CompareEstimators(args) => cmd_compare_estimators(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
