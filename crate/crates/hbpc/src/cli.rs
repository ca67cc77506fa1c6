//! Command-line driver: `solve`, `mln` and `check`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hbpc_core::lp::LpTolerances;
use hbpc_core::mln::compile;
use hbpc_core::problem::Problem;
use hbpc_core::separation::{check_model, Cut};
use hbpc_core::solver::{solve, LoadMode, Monitor, SolveOptions, SolveResult, SolveStatus};
use hbpc_core::{AtomTable, MlnError};

use crate::fol::{parse_problem, print_problem};
use crate::mln_file::parse_mln;
use crate::model::read_model;
use crate::report::{Report, Stats, ViolationReport, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "hbpc", version, about = "Minimum-cost Herbrand models by branch-price-and-cut")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a .fol problem to optimality.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
    },
    /// Compile a Markov logic network and find a MAP state.
    Mln {
        file: PathBuf,
        /// Emit the reverse (iff) clauses that tie penalty atoms to their groundings.
        #[arg(long, overrides_with = "no_iff")]
        iff: bool,
        #[arg(long)]
        no_iff: bool,
        /// Also write the compiled problem in .fol syntax to this path.
        #[arg(long, value_name = "PATH")]
        emit_fol: Option<PathBuf>,
        #[command(flatten)]
        opts: SolveArgs,
    },
    /// Check that a model satisfies every clause of a problem.
    Check {
        file: PathBuf,
        /// Model file: one ground atom per line.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Wall-clock limit in seconds.
    #[arg(long, default_value_t = 1800.0, value_parser = positive_f64)]
    time_limit: f64,
    /// Most branch-and-bound nodes to process.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    node_limit: Option<u64>,
    /// Most separation rounds over the whole solve.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    cut_rounds: Option<u64>,
    /// Absolute optimality gap.
    #[arg(long, default_value_t = 1e-6, value_parser = nonnegative_f64)]
    gap: f64,
    /// Load every variable-free clause before the first LP solve.
    #[arg(long, conflicts_with = "lazy")]
    eager: bool,
    /// Generate every row by separation, even for ground problems.
    #[arg(long)]
    lazy: bool,
    /// Remove rows slack for K consecutive LP solves [default K: 10].
    #[arg(long, value_name = "K", num_args = 0..=1, default_missing_value = "10",
          value_parser = clap::value_parser!(u32).range(1..))]
    row_aging: Option<u32>,
    /// Print every cut to stderr.
    #[arg(long)]
    trace_separation: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Separation tolerance: a cut needs LP activity below 1 - epsilon.
    #[arg(long, default_value_t = 1e-6, value_parser = nonnegative_f64)]
    epsilon: f64,
    /// Distance from 0/1 under which an LP value counts as integral.
    #[arg(long, default_value_t = 1e-6, value_parser = nonnegative_f64)]
    integrality: f64,
    /// Most cuts taken from one clause per separation round.
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    cuts_per_clause: u64,
    /// Separation rounds at a node before branching early; 0 waits for the cut loop to converge.
    #[arg(long, default_value_t = 1)]
    branch_after_rounds: u64,
    /// Disable the simple rounding heuristic.
    #[arg(long)]
    no_rounding: bool,
    /// Enable the minimal-model primal heuristic.
    #[arg(long)]
    minimal_model: bool,
    /// LP primal feasibility tolerance.
    #[arg(long, default_value_t = LpTolerances::default().feasibility, value_parser = positive_f64)]
    feasibility_tol: f64,
    /// LP dual feasibility tolerance.
    #[arg(long, default_value_t = LpTolerances::default().optimality, value_parser = positive_f64)]
    optimality_tol: f64,
    /// Smallest accepted LP pivot.
    #[arg(long, default_value_t = LpTolerances::default().pivot, value_parser = positive_f64)]
    pivot_tol: f64,
    /// Seed for randomized tie-breaks. The solver currently makes none, so runs are deterministic either way.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {}", s)),
    }
}

fn nonnegative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got {}", s)),
    }
}

impl SolveArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            epsilon: self.epsilon,
            integrality: self.integrality,
            gap: self.gap,
            cuts_per_clause: self.cuts_per_clause as usize,
            node_limit: self.node_limit,
            cut_round_limit: self.cut_rounds,
            branch_after_rounds: (self.branch_after_rounds > 0).then_some(self.branch_after_rounds),
            load: match (self.eager, self.lazy) {
                (true, _) => LoadMode::Eager,
                (_, true) => LoadMode::Lazy,
                _ => LoadMode::Auto,
            },
            row_aging: self.row_aging,
            rounding: !self.no_rounding,
            minimal_model_heuristic: self.minimal_model,
            lp: LpTolerances {
                feasibility: self.feasibility_tol,
                optimality: self.optimality_tol,
                pivot: self.pivot_tol,
            },
        }
    }
}

struct Clock<'a> {
    start: Instant,
    limit: Duration,
    trace: Option<&'a mut dyn Write>,
}

impl Monitor for Clock<'_> {
    fn interrupted(&mut self) -> bool {
        self.start.elapsed() >= self.limit
    }

    fn on_cut(&mut self, problem: &Problem, cut: &Cut) {
        if let Some(w) = self.trace.as_mut() {
            let _ = writeln!(w, "{}", cut.trace_line(problem));
        }
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))
}

fn exit_code(s: SolveStatus) -> i32 {
    match s {
        SolveStatus::Optimal => EXIT_OK,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::LimitReached => EXIT_LIMIT,
    }
}

fn emit(out: &mut dyn Write, format: Format, report: &Report) {
    let text = match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_json() + "\n",
    };
    let _ = out.write_all(text.as_bytes());
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match cli.command {
        Command::Solve { file, opts } => run_solve(&file, &opts, out, err),
        Command::Mln { file, iff: _, no_iff, emit_fol, opts } => run_mln(&file, !no_iff, emit_fol.as_deref(), &opts, out, err),
        Command::Check { file, model, format } => run_check(&file, &model, format, out, err),
    }
}

fn input_error(err: &mut dyn Write, path: &Path, msgs: impl IntoIterator<Item = String>) -> i32 {
    for m in msgs {
        let _ = writeln!(err, "error: {}: {}", path.display(), m);
    }
    EXIT_INPUT
}

fn read_error(err: &mut dyn Write, msg: String) -> i32 {
    let _ = writeln!(err, "error: {}", msg);
    EXIT_INPUT
}

fn load_problem(path: &Path, err: &mut dyn Write) -> Result<Problem, i32> {
    let src = read(path).map_err(|m| read_error(err, m))?;
    parse_problem(&src).map_err(|ds| input_error(err, path, ds.into_iter().map(|d| d.to_string())))
}

fn solve_and_report(
    problem: &Problem,
    opts: &SolveArgs,
    err: &mut dyn Write,
) -> Result<(SolveResult, Duration), i32> {
    let start = Instant::now();
    let mut clock = Clock {
        start,
        limit: Duration::from_secs_f64(opts.time_limit),
        trace: if opts.trace_separation { Some(&mut *err) } else { None },
    };
    match solve(problem, opts.options(), &mut clock) {
        Ok(r) => Ok((r, start.elapsed())),
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            Err(match e {
                hbpc_core::SolveError::Lp(_) => EXIT_SOLVER,
                _ => EXIT_INPUT,
            })
        }
    }
}

fn run_solve(path: &Path, opts: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let problem = match load_problem(path, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let (r, elapsed) = match solve_and_report(&problem, opts, err) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let model = r.model_atoms().map(ToString::to_string).collect();
    emit(out, opts.format, &Report::from_result("solve", &r, elapsed, model));
    exit_code(r.status)
}

fn run_mln(
    path: &Path,
    iff: bool,
    emit_fol: Option<&Path>,
    opts: &SolveArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let src = match read(path) {
        Ok(s) => s,
        Err(m) => return read_error(err, m),
    };
    let program = match parse_mln(&src) {
        Ok(p) => p,
        Err(e) => return input_error(err, path, e.to_string().lines().map(String::from).collect::<Vec<_>>()),
    };
    let enc = match compile(&program, iff) {
        Ok(e) => e,
        Err(e @ MlnError::HardUnsatisfiable(_)) => {
            let _ = writeln!(err, "{}", e);
            let report = Report {
                schema: SCHEMA,
                command: "mln",
                status: "infeasible",
                objective: None,
                best_bound: None,
                model: Vec::new(),
                stats: Stats::default(),
                mln: None,
                violation: None,
            };
            emit(out, opts.format, &report);
            return EXIT_INFEASIBLE;
        }
        Err(e) => return input_error(err, path, [e.to_string()]),
    };
    if let Some(dest) = emit_fol {
        if let Err(e) = std::fs::write(dest, print_problem(&enc.problem)) {
            return input_error(err, dest, [e.to_string()]);
        }
    }
    let (r, elapsed) = match solve_and_report(&enc.problem, opts, err) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let queries = program.queries();
    let model = r
        .model_atoms()
        .filter(|a| a.pred != enc.penalty_predicate)
        .filter(|a| queries.is_empty() || queries.contains(&a.pred))
        .map(ToString::to_string)
        .collect();
    emit(out, opts.format, &Report::from_result("mln", &r, elapsed, model).with_mln(&enc));
    exit_code(r.status)
}

fn run_check(path: &Path, model_path: &Path, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let problem = match load_problem(path, err) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let src = match read(model_path) {
        Ok(s) => s,
        Err(m) => return read_error(err, m),
    };
    let atoms = match read_model(&src) {
        Ok(a) => a,
        Err(ds) => return input_error(err, model_path, ds.into_iter().map(|d| d.to_string())),
    };
    let start = Instant::now();
    let mut table = AtomTable::new();
    let mut ids: Vec<_> = atoms.iter().map(|a| table.intern(a.clone())).collect();
    ids.sort_unstable();
    ids.dedup();
    let violation = match check_model(&problem, &table, &ids) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            return EXIT_INPUT;
        }
    };
    let report = Report {
        schema: SCHEMA,
        command: "check",
        status: if violation.is_some() { "violated" } else { "ok" },
        objective: None,
        best_bound: None,
        model: ids.iter().map(|&id| table.atom(id).to_string()).collect(),
        stats: Stats { wall_time_seconds: start.elapsed().as_secs_f64(), ..Stats::default() },
        mln: None,
        violation: violation.as_ref().map(|v| ViolationReport {
            clause: v.clause.clone(),
            grounding: v.theta.iter().map(|(k, t)| (k.as_str().to_string(), t.to_string())).collect::<BTreeMap<_, _>>(),
        }),
    };
    emit(out, format, &report);
    if violation.is_some() {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    }
}
