//! `lane8` command line.
//!
//! Exit codes: 0 converged (or contractive for `check`), 1 usage or input
//! error, 2 iteration limit reached, 3 diverged, 4 not contractive.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lane8_core::bench::run_sweep;
use lane8_core::expr::{parse_rhs, Expr};
use lane8_core::problems::{find, ids, registry};
use lane8_core::solver::check_wellposedness;
use lane8_core::{
    solve, Beta, Boundary, DoubleDouble, Error, ProblemSpec, Real, SolveConfig, Termination,
};

use crate::decimal::Decimal;
use crate::problem_file::{self, parse_boundary, parse_constant};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_NOT_CONTRACTIVE: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "lane8",
    version,
    about = "Eighth-order iterative solvers for singular Lane-Emden boundary value problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one problem and print U at the grid nodes
    Solve(SolveArgs),
    /// Solve at N0, 2 N0, ... and tabulate errors and observed orders
    Sweep(SweepArgs),
    /// List the built-in problems
    Examples,
    /// Contraction test for a bound M on |f| and a Lipschitz constant L
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct ProblemArgs {
    /// Built-in problem id (see `lane8 examples`)
    #[arg(long, conflicts_with_all = ["beta", "alpha", "rhs", "robin", "exact", "problem_file"])]
    pub example: Option<String>,
    /// 1, an integer n > 1, or r/s
    #[arg(long)]
    pub beta: Option<String>,
    /// Boundary value (default 0)
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// Right-hand side f(x, u), e.g. "exp(u)"
    #[arg(long, allow_hyphen_values = true)]
    pub rhs: Option<String>,
    /// Robin condition mu u(1) + sigma u'(1) = alpha
    #[arg(long, num_args = 2, value_names = ["MU", "SIGMA"], allow_hyphen_values = true)]
    pub robin: Option<Vec<String>>,
    /// Closed-form solution u(x) for error measurement
    #[arg(long, allow_hyphen_values = true)]
    pub exact: Option<String>,
    /// Problem definition file
    #[arg(long, conflicts_with_all = ["beta", "alpha", "rhs", "robin", "exact"])]
    pub problem_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    /// binary64
    #[value(alias = "standard")]
    Std,
    /// double-double
    #[value(alias = "extended")]
    Ext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Md,
    Csv,
    Json,
    Jsonl,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Stopping tolerance on max |Phi_(k+1) - Phi_k| (default 1e-22 ext, 1e-14 std)
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long, default_value_t = SolveConfig::<f64>::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, value_enum, env = "LANE8_PRECISION", default_value = "ext")]
    pub precision: PrecisionArg,
    /// Output file; `-` is stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "md")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Number of grid intervals (>= 8)
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Coarsest number of intervals
    #[arg(long, default_value_t = 8)]
    pub n0: usize,
    /// Number of tabulated levels
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Bound M on |f(x, u)|
    #[arg(long = "bigM", alias = "big-m")]
    pub big_m: Option<String>,
    /// Lipschitz constant L of f in u
    #[arg(long)]
    pub lipschitz: Option<String>,
    #[arg(long, value_enum, env = "LANE8_PRECISION", default_value = "ext")]
    pub precision: PrecisionArg,
}

/// Process exit with a message for stderr.
#[derive(Debug)]
struct Exit {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Exit {
    Exit {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

pub fn exit_code(t: Termination) -> i32 {
    match t {
        Termination::Converged => EXIT_OK,
        Termination::MaxIter => EXIT_MAX_ITER,
        Termination::Diverged => EXIT_DIVERGED,
    }
}

enum Exact<S> {
    Builtin(fn(S) -> S),
    Expr(Expr),
}

struct Problem<S> {
    name: String,
    spec: ProblemSpec<S>,
    exact: Option<Exact<S>>,
    bounds: Option<(S, S)>,
}

fn resolve<S: Decimal>(a: &ProblemArgs) -> Result<Problem<S>, Exit> {
    if let Some(id) = &a.example {
        let ex = find::<S>(id)
            .ok_or_else(|| usage(format!("unknown example '{id}' (available: {})", ids())))?;
        return Ok(Problem {
            name: ex.id.into(),
            spec: ex.spec,
            exact: ex.exact.map(Exact::Builtin),
            bounds: ex.bounds,
        });
    }
    if let Some(path) = &a.problem_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let file = problem_file::parse::<S>(&text)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map_or_else(|| "problem".into(), |s| s.to_string_lossy().into_owned());
        return Ok(Problem {
            name,
            spec: file.spec,
            exact: file.exact.map(Exact::Expr),
            bounds: None,
        });
    }
    let (Some(beta), Some(rhs)) = (&a.beta, &a.rhs) else {
        return Err(usage(
            "give --example <id>, --problem-file <path>, or --beta and --rhs",
        ));
    };
    let beta: Beta = beta.parse().map_err(|e: Error| usage(format!("--beta: {e}")))?;
    let rhs = parse_rhs(rhs).map_err(|e| usage(format!("--rhs '{rhs}': {e}")))?;
    let alpha = match &a.alpha {
        Some(t) => parse_constant(t).map_err(|e| usage(format!("--alpha: {e}")))?,
        None => S::zero(),
    };
    let boundary = match &a.robin {
        Some(w) => parse_boundary(&format!("robin {} {}", w[0], w[1]))
            .map_err(|e| usage(format!("--robin: {e}")))?,
        None => Boundary::Dirichlet,
    };
    let exact = match &a.exact {
        Some(t) => Some(Exact::Expr(
            problem_file::parse_exact(t).map_err(|e| usage(format!("--exact: {e}")))?,
        )),
        None => None,
    };
    let mut spec = ProblemSpec::new(beta, alpha, rhs);
    spec.boundary = boundary;
    Ok(Problem {
        name: "custom".into(),
        spec,
        exact,
        bounds: None,
    })
}

fn config<S: Decimal>(n: usize, r: &RunArgs) -> Result<SolveConfig<S>, Exit> {
    let mut cfg = SolveConfig::<S>::new(n).with_max_iter(r.max_iter);
    if let Some(t) = &r.tol {
        cfg = cfg.with_tol(parse_constant(t).map_err(|e| usage(format!("--tol: {e}")))?);
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn emit(text: &str, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Exit> {
    let failed = |e: std::io::Error| usage(format!("cannot write output: {e}"));
    match out {
        Some(path) if path.as_os_str() != "-" => std::fs::write(path, text).map_err(failed),
        _ => stdout.write_all(text.as_bytes()).map_err(failed),
    }
}

fn cmd_solve<S: Decimal>(a: &SolveArgs, stdout: &mut dyn Write, log: &mut String) -> Result<i32, Exit> {
    let p = resolve::<S>(&a.problem)?;
    let cfg = config::<S>(a.n, &a.run)?;
    let r = solve(&p.spec, &cfg).map_err(|e| usage(e.to_string()))?;
    let text = match a.run.format {
        Format::Md => report::solve_markdown(&p.name, &p.spec, &r),
        Format::Csv => report::solve_csv(&r),
        Format::Json | Format::Jsonl => report::solve_json(&p.name, &p.spec, &r),
    };
    emit(&text, &a.run.out, stdout)?;
    let _ = writeln!(log, "{}: N = {}, k = {}, {}", p.name, a.n, r.iterations, r.termination);
    Ok(exit_code(r.termination))
}

/// Physical nodes of the finest grid, which contain those of every
/// coarser level.
fn finest_nodes<S: Decimal>(beta: Beta, n: usize) -> Vec<S> {
    let s = match beta {
        Beta::Rational { s, .. } => s as i32,
        _ => 1,
    };
    (0..=n)
        .map(|i| S::ratio(i as i64, n as i64).powi(s))
        .collect()
}

fn cmd_sweep<S: Decimal>(a: &SweepArgs, stdout: &mut dyn Write, log: &mut String) -> Result<i32, Exit> {
    let p = resolve::<S>(&a.problem)?;
    if a.levels == 0 {
        return Err(usage("--levels must be >= 1"));
    }
    let finest = a
        .n0
        .checked_shl(a.levels as u32)
        .filter(|&n| n >> a.levels == a.n0)
        .ok_or_else(|| usage("--n0 and --levels give too many intervals"))?;
    let cfg = config::<S>(a.n0, &a.run)?;
    let exact: Option<Box<dyn Fn(S) -> S>> = match p.exact {
        Some(Exact::Builtin(f)) => Some(Box::new(f)),
        Some(Exact::Expr(e)) => {
            for x in finest_nodes::<S>(p.spec.beta, finest) {
                e.eval(x, S::zero())
                    .map_err(|err| usage(format!("exact solution at x = {x}: {err}")))?;
            }
            Some(Box::new(move |x| e.eval(x, S::zero()).expect("checked on every node")))
        }
        None => None,
    };
    let t0 = Instant::now();
    let clock = move || t0.elapsed().as_secs_f64();
    let sweep = run_sweep(&p.name, &p.spec, exact.as_deref(), a.n0, a.levels, &cfg, &clock)
        .map_err(|e| match e {
            Error::Diverged { .. } => Exit {
                code: EXIT_DIVERGED,
                message: e.to_string(),
            },
            e => usage(e.to_string()),
        })?;
    let text = match a.run.format {
        Format::Md => report::sweep_markdown(&sweep),
        Format::Csv => report::sweep_csv(&sweep),
        Format::Json | Format::Jsonl => report::sweep_jsonl(&sweep),
    };
    emit(&text, &a.run.out, stdout)?;
    for r in &sweep.runs {
        let _ = writeln!(log, "{}: N = {}, k = {}, {}", p.name, r.n, r.iterations, r.termination);
    }
    Ok(if sweep.all_converged() { EXIT_OK } else { EXIT_MAX_ITER })
}

fn cmd_check<S: Decimal>(a: &CheckArgs, stdout: &mut dyn Write) -> Result<i32, Exit> {
    let p = resolve::<S>(&a.problem)?;
    let (big_m, lipschitz) = match (&a.big_m, &a.lipschitz, p.bounds) {
        (Some(m), Some(l), _) => (
            parse_constant(m).map_err(|e| usage(format!("--bigM: {e}")))?,
            parse_constant(l).map_err(|e| usage(format!("--lipschitz: {e}")))?,
        ),
        (None, None, Some(bounds)) => bounds,
        _ => return Err(usage("check needs both --bigM <M> and --lipschitz <L>")),
    };
    let w = check_wellposedness(&p.spec, big_m, lipschitz).map_err(|e| usage(e.to_string()))?;
    let verdict = if w.contractive { "contractive" } else { "not contractive" };
    let text = format!(
        "{}: M = {}, L = {}\nq = {:.6}\n|u| <= {:.6}\n|u'| <= {:.6}\n{verdict}\n",
        p.name,
        big_m.to_decimal(),
        lipschitz.to_decimal(),
        w.q.to_f64(),
        w.u_bound.to_f64(),
        w.du_bound.to_f64(),
    );
    emit(&text, &None, stdout)?;
    Ok(if w.contractive { EXIT_OK } else { EXIT_NOT_CONTRACTIVE })
}

fn cmd_examples(stdout: &mut dyn Write) -> Result<i32, Exit> {
    let mut text = String::from("| id | beta | alpha | f(x, u) | boundary | exact | source |\n|---|---|---|---|---|---|---|\n");
    for ex in registry::<DoubleDouble>() {
        let boundary = match ex.spec.boundary {
            Boundary::Dirichlet => "u(1) = alpha".to_string(),
            Boundary::Robin { mu, sigma } => {
                format!("{} u(1) + {} u'(1) = alpha", mu.to_decimal(), sigma.to_decimal())
            }
        };
        let _ = writeln!(
            text,
            "| {} | {} | {:.6} | `{}` | {} | {} | {} |",
            ex.id,
            ex.spec.beta,
            ex.spec.alpha.to_f64(),
            ex.rhs_text,
            boundary,
            if ex.exact.is_some() { "yes" } else { "no" },
            ex.citation
        );
    }
    emit(&text, &None, stdout)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let mut log = String::new();
    let result = match &cli.command {
        Command::Solve(a) => match a.run.precision {
            PrecisionArg::Std => cmd_solve::<f64>(a, stdout, &mut log),
            PrecisionArg::Ext => cmd_solve::<DoubleDouble>(a, stdout, &mut log),
        },
        Command::Sweep(a) => match a.run.precision {
            PrecisionArg::Std => cmd_sweep::<f64>(a, stdout, &mut log),
            PrecisionArg::Ext => cmd_sweep::<DoubleDouble>(a, stdout, &mut log),
        },
        Command::Check(a) => match a.precision {
            PrecisionArg::Std => cmd_check::<f64>(a, stdout),
            PrecisionArg::Ext => cmd_check::<DoubleDouble>(a, stdout),
        },
        Command::Examples => cmd_examples(stdout),
    };
    let _ = stderr.write_all(log.as_bytes());
    match result {
        Ok(code) => code,
        Err(exit) => {
            let _ = writeln!(stderr, "error: {}", exit.message);
            exit.code
        }
    }
}
