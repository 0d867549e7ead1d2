//! Command-line front end.
//!
//! `bregproj <subcommand> <problem.json> [-o out.trace] [flags]` runs one
//! solver and writes a trace file. Exit codes: 0 converged, 1 input or
//! solver error, 2 budget exhausted or stalled, 3 unbounded step, 4 failed
//! verification.

pub mod problem;
pub mod tracefile;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::legendre::{FamilyRegistry, LegendreFamily};
use crate::matcore::{inner, HermitianMatrix};
use crate::oracle::{golden, golden_thompson_check, strong_convexity_sampler};
use crate::solvers::{
    adaboost_embed, check_density_matrix, maxent_with_sink, partition_problem, solve, Algorithm, ConstraintSystem,
    SolverConfig, Status, TraceRecord,
};

pub use problem::{Problem, ProblemFile, Reference, Start};
pub use tracefile::{emit_summary, TraceFile, TraceFooter, TraceHeader};

use problem::matrix_rows;
use tracefile::{COLUMNS, TRACE_FORMAT};

/// Exit code for a failed `verify`.
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bregproj", version, about = "Matrix Bregman projections and iterative scaling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project onto a linear family with the exact, approximate or KL solvers.
    Project(RunArgs),
    /// Maximum-entropy state with the given moments (quantum iterative scaling).
    Maxent(RunArgs),
    /// Minimize tr exp(λ·F).
    Partition(RunArgs),
    /// AdaBoost through the partition-function embedding.
    Boost(RunArgs),
    /// Check the solvers against the golden values and inequality samplers.
    Verify(VerifyArgs),
    /// Summarize a trace file.
    Summary {
        trace: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    pub problem: PathBuf,
    /// Trace output path [default: the problem path with extension .trace]
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub solver: Option<Algorithm>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub violation_tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub delta_max: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Golden-values file [default: $BREGPROJ_GOLDEN, else the bundled file]
    #[arg(long)]
    pub golden: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub convexity_trials: usize,
    #[arg(long, default_value_t = 500)]
    pub golden_thompson_trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

/// Result of one solver subcommand.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: Status,
    pub trace_path: PathBuf,
    pub trace: TraceFile,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Project,
    Maxent,
    Partition,
    Boost,
}

impl Mode {
    fn as_str(self) -> &'static str {
        match self {
            Mode::Project => "project",
            Mode::Maxent => "maxent",
            Mode::Partition => "partition",
            Mode::Boost => "boost",
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Messages go to stdout, errors to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli.command) {
        Ok((code, text)) => {
            print!("{text}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs one command, returning the exit code and the text for stdout.
pub fn run(command: &Command) -> Result<(i32, String)> {
    let (mode, args) = match command {
        Command::Project(a) => (Mode::Project, a),
        Command::Maxent(a) => (Mode::Maxent, a),
        Command::Partition(a) => (Mode::Partition, a),
        Command::Boost(a) => (Mode::Boost, a),
        Command::Verify(v) => return verify(v),
        Command::Summary { trace } => return Ok((0, emit_summary(trace)?)),
    };
    let outcome = run_problem(mode, args)?;
    let text = emit_summary(&outcome.trace_path)?;
    Ok((
        outcome.exit_code(),
        format!("{text}trace: {}\n", outcome.trace_path.display()),
    ))
}

fn default_output(problem: &Path) -> PathBuf {
    problem.with_extension("trace")
}

fn config(problem: &Problem, args: &RunArgs) -> Result<SolverConfig> {
    let mut cfg = SolverConfig {
        stopping: problem.stopping,
        delta_max: problem.delta_max,
    };
    if let Some(n) = args.max_iters {
        cfg.stopping.max_iterations = n;
    }
    if let Some(t) = args.violation_tol {
        cfg.stopping.violation_tol = t;
    }
    if let Some(d) = args.delta_max {
        cfg.delta_max = d;
    }
    cfg.stopping.validate()?;
    if !(cfg.delta_max > 0.0) {
        return Err(Error::InvalidInput("--delta-max must be positive".into()));
    }
    Ok(cfg)
}

fn constraint_system(problem: &Problem, solver: Algorithm) -> Result<ConstraintSystem> {
    let n = problem.normalization.unwrap_or(solver.required_normalization());
    let ops = problem.operators.clone();
    match &problem.reference {
        Reference::Matrix(x0) => ConstraintSystem::new(ops, x0.clone(), n),
        Reference::Targets(t) => ConstraintSystem::from_targets(ops, t.clone(), n),
        Reference::None => Err(Error::InvalidInput("problem needs X0 or targets".into())),
    }
}

/// What a solver run produced before the trace is assembled.
struct Finished {
    status: Status,
    lambda: Vec<f64>,
    final_violation: f64,
    flags: crate::solvers::TraceFlags,
    state: Option<HermitianMatrix>,
    entropy: Option<f64>,
    message: Option<String>,
}

/// Runs a solver subcommand on a problem file and writes the trace.
pub fn run_problem(mode: Mode, args: &RunArgs) -> Result<RunOutcome> {
    let problem = Problem::load(&args.problem)?;
    let cfg = config(&problem, args)?;
    let family_name = args.family.clone().unwrap_or_else(|| problem.family.clone());
    let fam = FamilyRegistry::with_builtins().get(&family_name)?;
    let solver = match mode {
        Mode::Project => args.solver.or(problem.solver).unwrap_or(Algorithm::Exact),
        Mode::Maxent => Algorithm::Qis,
        Mode::Partition | Mode::Boost => Algorithm::PartitionMin,
    };
    if mode != Mode::Project {
        if let Some(s) = args.solver.filter(|s| *s != solver) {
            return Err(Error::InvalidInput(format!("{} always uses the {solver} solver, not {s}", mode.as_str())));
        }
    }

    let mut rows: Vec<TraceRecord> = Vec::new();
    let result = {
        let mut sink = |r: &TraceRecord| rows.push(r.clone());
        execute(mode, solver, &fam, &problem, &cfg, &mut sink)
    };
    let finished = match result {
        Ok(f) => f,
        Err(e) if rows.is_empty() => return Err(e),
        Err(e) => Finished {
            status: Status::Error,
            lambda: Vec::new(),
            final_violation: rows.last().map(|r| r.max_violation).unwrap_or(f64::NAN),
            flags: Default::default(),
            state: None,
            entropy: None,
            message: Some(e.to_string()),
        },
    };

    let trace = TraceFile {
        header: TraceHeader {
            format: TRACE_FORMAT.into(),
            problem_hash: problem.hash.clone(),
            subcommand: mode.as_str().into(),
            solver: solver.as_str().into(),
            family: fam.name().into(),
            max_iterations: cfg.stopping.max_iterations,
            violation_tol: cfg.stopping.violation_tol,
            divergence_delta_tol: cfg.stopping.divergence_delta_tol,
            delta_max: cfg.delta_max,
            columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
        },
        footer: Some(TraceFooter {
            status: finished.status,
            iterations: rows.len(),
            lambda: finished.lambda,
            final_violation: finished.final_violation,
            flags: finished.flags,
            state: finished.state.as_ref().map(matrix_rows),
            entropy: finished.entropy,
            message: finished.message,
        }),
        rows,
    };
    let trace_path = args.output.clone().unwrap_or_else(|| default_output(&args.problem));
    trace.write_atomic(&trace_path)?;
    Ok(RunOutcome {
        status: finished.status,
        trace_path,
        trace,
    })
}

fn execute(
    mode: Mode,
    solver: Algorithm,
    fam: &LegendreFamily,
    problem: &Problem,
    cfg: &SolverConfig,
    sink: &mut dyn crate::solvers::TraceSink,
) -> Result<Finished> {
    let from_solution = |s: crate::solvers::Solution| Finished {
        status: s.trace.status,
        final_violation: s.state.max_violation(),
        lambda: s.state.lambda,
        flags: s.trace.flags,
        state: Some(s.state.y),
        entropy: None,
        message: None,
    };
    match mode {
        Mode::Project => {
            let cs = constraint_system(problem, solver)?;
            let default_start = if solver == Algorithm::Qis {
                Start::IdentityNormalized
            } else {
                Start::Identity
            };
            let y0 = problem.start.clone().unwrap_or(default_start).resolve(problem.dim);
            if solver == Algorithm::Qis {
                check_density_matrix(&y0, "Y0")?;
                if let Some(x0) = cs.x0() {
                    check_density_matrix(x0, "X0")?;
                }
            }
            solve(solver, fam, &y0, &cs, cfg, sink).map(from_solution)
        }
        Mode::Maxent => {
            let targets = match &problem.reference {
                Reference::Targets(t) => t.clone(),
                Reference::Matrix(x0) => problem
                    .operators
                    .iter()
                    .map(|f| inner(f, x0))
                    .collect::<Result<Vec<_>>>()?,
                Reference::None => return Err(Error::InvalidInput("maxent needs targets or X0".into())),
            };
            let r = maxent_with_sink(&targets, &problem.operators, problem.dim, cfg, sink)?;
            let entropy = r.entropy;
            let mut f = from_solution(r.solution);
            f.entropy = Some(entropy);
            Ok(f)
        }
        Mode::Partition => {
            let (y0, cs) = partition_problem(problem.operators.clone())?;
            solve(solver, &LegendreFamily::shannon(), &y0, &cs, cfg, sink).map(from_solution)
        }
        Mode::Boost => {
            let (labels, outputs) = match (&problem.labels, &problem.hypotheses) {
                (Some(l), Some(h)) => (l, h),
                _ => return Err(Error::InvalidInput("boost needs 'labels' and 'hypotheses'".into())),
            };
            let ops = adaboost_embed(labels, outputs)?;
            let (y0, cs) = partition_problem(ops)?;
            solve(solver, &LegendreFamily::shannon(), &y0, &cs, cfg, sink).map(from_solution)
        }
    }
}

fn verify(args: &VerifyArgs) -> Result<(i32, String)> {
    let path = args.golden.clone().unwrap_or_else(golden::default_path);
    let file = golden::GoldenFile::load(&path)?;
    let mut reports = golden::verify(&file)?;
    reports.push(strong_convexity_sampler(
        &LegendreFamily::shannon(),
        args.convexity_trials,
        6,
        4,
        args.seed,
    ));
    reports.push(golden_thompson_check(args.golden_thompson_trials, 4, args.seed));
    let mut text = format!("golden values: {}\n", path.display());
    for r in &reports {
        text.push_str(&format!("{r}\n"));
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    text.push_str(&format!("{} checks, {failed} failed\n", reports.len()));
    Ok((if failed == 0 { 0 } else { EXIT_VERIFY_FAILED }, text))
}
