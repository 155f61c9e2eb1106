//! The `ordcomp` command line.
//!
//! Exit codes: 0 success (and a passing certificate where one is
//! produced), 2 input error, 3 solve failure or failing certificate,
//! 4 internal invariant violation.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ordcomp_core::grid::{nlsc_regularize, GridFn};
use ordcomp_core::lattice::{
    chain_check, dedekind_inf, dedekind_sup, order_converges, ChainVerdict, Convergence, NotConverged, OrderCfg,
    OrderInterval, OrderRepr,
};
use ordcomp_core::pde::{ns_text, parse_equations, parse_expr, Convective, Expr, PdeSystem};
use ordcomp_core::poly::Poly;
use ordcomp_core::pw::{leq_samples, LeqVerdict, Piecewise, PwExpr};
use ordcomp_core::solve::{assemble, solution_sequence, ApproxSolution, JetSolverCfg, NavierStokesHook, SolveCfg};
use ordcomp_core::{AxisBox, Error, MultiIndex};

use crate::config;
use crate::exec::{thread_count, with_pool, Rayon};
use crate::format::{read_function, read_text, to_json, write_function, write_text, BoxDto, FormatError, Function};
use crate::num::{fmt17, nums, Num};
use crate::solution::{CertificateDto, Problem, SolutionDto};

#[derive(Parser, Debug)]
#[command(
    name = "ordcomp",
    version,
    about = "Order completion toolkit: NLSC regularization, lattice checks and certified band solutions"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Flat key = value file of settings; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads (default: ORDCOMP_THREADS, else one per core).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// NLSC regularization of a grid function (CSV).
    Regularize(RegularizeArgs),
    /// Dedekind supremum of a family of functions.
    Sup(LatticeArgs),
    /// Dedekind infimum of a family of functions.
    Inf(LatticeArgs),
    /// Sampled order test f <= g.
    Leq(LeqArgs),
    /// Order convergence of a sequence to a candidate.
    Converge(ConvergeArgs),
    /// Whether an interval chain pinches on test boxes.
    ChainCheck(ChainArgs),
    /// Certified band solution of a PDE system.
    Solve(SolveArgs),
    /// Re-checks a solution at fresh random samples.
    Verify(VerifyArgs),
    /// Navier-Stokes initial-value demo.
    DemoNs(DemoArgs),
}

const SUBCOMMANDS: &[&str] =
    &["regularize", "sup", "inf", "leq", "converge", "chain-check", "solve", "verify", "demo-ns"];

#[derive(Args, Debug, Serialize)]
struct RegularizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    r_inner: usize,
    #[arg(long, default_value_t = 2)]
    r_outer: usize,
}

#[derive(Args, Debug, Serialize)]
struct LatticeArgs {
    /// Grid CSV files or piecewise JSON files (not mixed).
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Samples per axis per cell for the report (exact mode).
    #[arg(long, default_value_t = 4)]
    density: usize,
}

#[derive(Args, Debug, Serialize)]
struct LeqArgs {
    #[arg(long)]
    f: PathBuf,
    #[arg(long)]
    g: PathBuf,
    #[arg(long, default_value_t = 4)]
    density: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug, Serialize, Clone, Copy)]
struct OrderArgs {
    #[arg(long, default_value_t = 1e-7)]
    gap_tol: f64,
    #[arg(long, default_value_t = 4)]
    density: usize,
    /// Extra allowance on limit gaps (grid mode discretization error).
    #[arg(long, default_value_t = 0.0)]
    slack: f64,
}

impl OrderArgs {
    fn cfg(&self) -> OrderCfg {
        OrderCfg { gap_tol: self.gap_tol, density: self.density, slack: self.slack }
    }
}

#[derive(Args, Debug, Serialize)]
struct ConvergeArgs {
    /// The sequence, in order.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    candidate: PathBuf,
    #[command(flatten)]
    order: OrderArgs,
}

#[derive(Args, Debug, Serialize)]
struct ChainArgs {
    /// Lower ends of the chain, in order.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    lo: Vec<PathBuf>,
    /// Upper ends of the chain, in order.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    hi: Vec<PathBuf>,
    /// Test box `lo1,..,lok:hi1,..,hik`; repeatable. Default: the domain.
    #[arg(long = "box")]
    boxes: Vec<String>,
    #[command(flatten)]
    order: OrderArgs,
}

#[derive(Args, Debug, Serialize, Clone)]
struct BandArgs {
    /// Target offset: anchors aim at g - theta*eps.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Initial cells per axis, e.g. `4,4` [default: 1 per axis; demo-ns: 2,2,2,2].
    #[arg(long, value_delimiter = ',')]
    cells: Vec<usize>,
    /// Bisection depth limit [default: 12; demo-ns: 3].
    #[arg(long)]
    max_depth: Option<u32>,
    /// Verification samples per axis per cell (plus the cell faces).
    #[arg(long, default_value_t = 3)]
    samples: usize,
    /// Patch degree (default: order of the system).
    #[arg(long)]
    degree: Option<u32>,
    /// Largest accepted initial defect.
    #[arg(long, default_value_t = 1e-12)]
    initial_tol: f64,
    /// Seed of the independent re-verification.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random samples per axis per cell for re-verification; 0 skips it.
    #[arg(long, default_value_t = 0)]
    verify_density: usize,
    /// Solution JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Long-format residual CSV output.
    #[arg(long)]
    dump: Option<PathBuf>,
}

impl BandArgs {
    fn solve_cfg(&self, eps: f64) -> SolveCfg {
        SolveCfg {
            eps,
            theta: self.theta,
            initial_cells: self.cells.clone(),
            max_depth: self.max_depth.unwrap_or(12),
            samples: self.samples,
            degree: self.degree,
            initial_tol: self.initial_tol,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct SolveArgs {
    /// File with the system, one equation per line.
    #[arg(long)]
    system: Option<PathBuf>,
    /// The system inline; `;` separates equations.
    #[arg(long)]
    equations: Option<String>,
    /// Right-hand side `name=expr`; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    rhs: Vec<String>,
    /// Parameter `name=value`; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    param: Vec<String>,
    /// Initial data `unknown=expr` on t = 0; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    u0: Vec<String>,
    /// Treat the last domain axis as time even if the system has no t.
    #[arg(long)]
    time: bool,
    /// Domain box `lo1,..,lok:hi1,..,hik`.
    #[arg(long)]
    domain: String,
    /// Band width: residuals must land in (g - eps, g).
    #[arg(long)]
    eps: Option<f64>,
    /// Solve for eps = 1/n for each n and check order convergence.
    #[arg(long, value_delimiter = ',')]
    n_list: Vec<u32>,
    #[command(flatten)]
    band: BandArgs,
    #[command(flatten)]
    order: OrderArgs,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    solution: PathBuf,
    #[arg(long, default_value_t = 4)]
    density: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check against this band instead of the solution's own eps.
    #[arg(long)]
    eps: Option<f64>,
    /// Certificate JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
enum ConvectiveArg {
    Printed,
    Standard,
}

#[derive(Args, Debug, Serialize)]
struct DemoArgs {
    #[arg(long, default_value_t = 0.01)]
    nu: f64,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Final time; the default domain is [0,1]^3 x [0, t_end].
    #[arg(long, default_value_t = 0.25)]
    t_end: f64,
    /// Domain box `lo1,..,lo4:hi1,..,hi4`, overriding --t-end.
    #[arg(long)]
    domain: Option<String>,
    /// Initial velocity `ui=expr`, divergence-free polynomial.
    #[arg(long, value_delimiter = ',', default_value = "u1=0.1*x2,u2=-0.1*x1,u3=0")]
    u0: Vec<String>,
    /// Forcing `fi=expr`.
    #[arg(long, value_delimiter = ',', default_value = "f1=0,f2=0,f3=0")]
    f: Vec<String>,
    #[arg(long, value_enum, default_value = "printed")]
    convective: ConvectiveArg,
    #[command(flatten)]
    band: BandArgs,
}

/// Why a command stopped.
#[derive(Debug)]
enum Failure {
    Input(String),
    Solve(String),
    Invariant(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solve(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
enum SolveErrorReport {
    DepthExhausted { lo: Vec<Num>, hi: Vec<Num>, margin: Num },
    NoJetFound { point: Vec<Num>, residual: Num },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let report = match &e {
            Error::DepthExhausted { lo, hi, margin } => {
                Some(SolveErrorReport::DepthExhausted { lo: nums(lo), hi: nums(hi), margin: Num(*margin) })
            }
            Error::NoJetFound { point, residual } => {
                Some(SolveErrorReport::NoJetFound { point: nums(point), residual: Num(*residual) })
            }
            _ => None,
        };
        if let Some(r) = report {
            print_json(&r);
        }
        match e {
            Error::DepthExhausted { .. } | Error::NoJetFound { .. } => Failure::Solve(e.to_string()),
            Error::InvalidComplex(_) => Failure::Invariant(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn input(msg: impl ToString) -> Failure {
    Failure::Input(msg.to_string())
}

type Outcome = Result<(), Failure>;

/// Entry point; returns the process exit code.
pub fn run() -> i32 {
    run_with(std::env::args_os().collect())
}

/// Runs the command line `args` (including the program name).
pub fn run_with(args: Vec<OsString>) -> i32 {
    let mut it = args.into_iter();
    let prog = it.next().unwrap_or_else(|| "ordcomp".into());
    let mut user: Vec<OsString> = it.collect();
    let file = match config::take_config_flag(&mut user) {
        Some(p) => {
            let name = PathBuf::from(&p).display().to_string();
            let parsed = std::fs::read_to_string(&p)
                .map_err(|e| format!("{name}: {e}"))
                .and_then(|t| config::parse(&name, &t).map_err(|e| e.to_string()));
            match parsed {
                Ok(kv) => kv,
                Err(e) => {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
        }
        None => Vec::new(),
    };
    let argv = config::merge(prog, user, &file, SUBCOMMANDS);
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let threads = thread_count(cli.threads);
    let result = std::panic::catch_unwind(|| with_pool(threads, || dispatch(cli.cmd)));
    match result {
        Ok(Ok(())) => 0,
        Ok(Err(f)) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Solve(m) => eprintln!("solve failed: {m}"),
                Failure::Invariant(m) => eprintln!("invariant violated: {m}"),
            }
            f.code()
        }
        Err(_) => {
            eprintln!("invariant violated: internal panic");
            4
        }
    }
}

fn dispatch(cmd: Cmd) -> Outcome {
    match cmd {
        Cmd::Regularize(a) => regularize(&a),
        Cmd::Sup(a) => lattice(&a, true),
        Cmd::Inf(a) => lattice(&a, false),
        Cmd::Leq(a) => leq(&a),
        Cmd::Converge(a) => converge(&a),
        Cmd::ChainCheck(a) => chain(&a),
        Cmd::Solve(a) => solve(&a),
        Cmd::Verify(a) => verify(&a),
        Cmd::DemoNs(a) => demo_ns(&a),
    }
}

fn print_json<T: Serialize>(v: &T) {
    print!("{}", to_json(v));
}

fn regularize(a: &RegularizeArgs) -> Outcome {
    let Function::Grid(u) = read_function(&a.input)? else {
        return Err(input(format!("{}: expected a grid CSV file", a.input.display())));
    };
    let r = nlsc_regularize(&u, a.r_inner, a.r_outer)?;
    let changed = u.values().iter().zip(r.values()).filter(|(x, y)| x != y).count();
    write_function(&a.out, &Function::Grid(r))?;
    println!("changed {changed} of {} nodes", u.values().len());
    Ok(())
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<Function>, Failure> {
    let fs = paths.iter().map(|p| read_function(p)).collect::<Result<Vec<_>, _>>()?;
    if fs.windows(2).any(|w| w[0].kind() != w[1].kind()) {
        return Err(input("inputs mix grid and piecewise files"));
    }
    Ok(fs)
}

enum Family {
    Grid(Vec<GridFn>),
    Exact(Vec<PwExpr>),
}

fn family(fs: Vec<Function>) -> Family {
    if matches!(fs.first(), Some(Function::Grid(_))) {
        Family::Grid(fs.into_iter().filter_map(|f| if let Function::Grid(g) = f { Some(g) } else { None }).collect())
    } else {
        Family::Exact(fs.into_iter().filter_map(Function::into_expr).collect())
    }
}

fn diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

#[derive(Serialize)]
struct LatticeReport {
    op: &'static str,
    mode: &'static str,
    inputs: usize,
    samples: usize,
    /// Largest amount by which the result exceeds the pointwise envelope.
    max_above_envelope: Num,
    /// Largest amount by which the result falls below it.
    max_below_envelope: Num,
}

fn envelope_report<F: OrderRepr>(fs: &[F], r: &F, sup: bool, density: usize) -> ordcomp_core::Result<LatticeReport> {
    let mut fam: Vec<&F> = fs.iter().collect();
    fam.push(r);
    let samples = F::samples(&fam, density, None)?;
    let (mut above, mut below) = (0.0f64, 0.0f64);
    for s in &samples {
        let vals = fs.iter().map(|f| f.at(s)).collect::<ordcomp_core::Result<Vec<_>>>()?;
        let env = if sup {
            vals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        } else {
            vals.iter().copied().fold(f64::INFINITY, f64::min)
        };
        let d = diff(r.at(s)?, env);
        above = above.max(d);
        below = below.max(-d);
    }
    Ok(LatticeReport {
        op: if sup { "sup" } else { "inf" },
        mode: "",
        inputs: fs.len(),
        samples: samples.len(),
        max_above_envelope: Num(above),
        max_below_envelope: Num(below),
    })
}

fn lattice(a: &LatticeArgs, sup: bool) -> Outcome {
    let fs = read_all(&a.inputs)?;
    let report = match family(fs) {
        Family::Grid(gs) => {
            let r = if sup { dedekind_sup(&gs)? } else { dedekind_inf(&gs)? };
            let rep = envelope_report(&gs, &r, sup, a.density)?;
            write_function(&a.out, &Function::Grid(r))?;
            LatticeReport { mode: "grid", ..rep }
        }
        Family::Exact(es) => {
            let r = if sup { dedekind_sup(&es)? } else { dedekind_inf(&es)? };
            let rep = envelope_report(&es, &r, sup, a.density)?;
            write_function(&a.out, &Function::Expr(r))?;
            LatticeReport { mode: "exact", ..rep }
        }
    };
    print_json(&report);
    Ok(())
}

#[derive(Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
enum LeqReport {
    Holds { mode: &'static str },
    Counterexample { mode: &'static str, point: Vec<Num>, gap: Num },
}

fn leq(a: &LeqArgs) -> Outcome {
    let fs = read_all(&[a.f.clone(), a.g.clone()])?;
    let report = match family(fs) {
        Family::Grid(gs) => {
            if gs[0].grid() != gs[1].grid() {
                return Err(input("grid functions live on different grids"));
            }
            let worst = gs[0]
                .values()
                .iter()
                .zip(gs[1].values())
                .enumerate()
                .map(|(i, (f, g))| (i, diff(f.get(), g.get())))
                .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            if worst.1 > a.tol {
                LeqReport::Counterexample { mode: "grid", point: nums(&gs[0].grid().node(worst.0)), gap: Num(worst.1) }
            } else {
                LeqReport::Holds { mode: "grid" }
            }
        }
        Family::Exact(es) => match leq_samples(&es[0], &es[1], a.density, a.tol)? {
            LeqVerdict::Holds => LeqReport::Holds { mode: "exact" },
            LeqVerdict::CounterexampleAt(p, gap) => {
                LeqReport::Counterexample { mode: "exact", point: nums(&p), gap: Num(gap) }
            }
        },
    };
    print_json(&report);
    Ok(())
}

#[derive(Serialize)]
struct ConvergeReport {
    verdict: &'static str,
    mode: &'static str,
    /// Terms used.
    truncation: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    point: Vec<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    excess: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit_gap: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    gap_tol: Num,
    density: usize,
    slack: Num,
}

fn convergence_report<F>(c: &Convergence<F>, mode: &'static str, truncation: usize, cfg: &OrderCfg) -> ConvergeReport {
    let mut r = ConvergeReport {
        verdict: "converged",
        mode,
        truncation,
        reason: None,
        index: None,
        point: Vec::new(),
        excess: None,
        residual: None,
        limit_gap: None,
        samples: None,
        gap_tol: Num(cfg.gap_tol),
        density: cfg.density,
        slack: Num(cfg.slack),
    };
    match c {
        Convergence::Converged(w) => {
            r.point = nums(&w.worst_point);
            r.residual = Some(Num(w.residual));
            r.limit_gap = Some(Num(w.limit_gap));
            r.samples = Some(w.samples);
        }
        Convergence::NotConverged(n) => {
            r.verdict = "not_converged";
            let (reason, index, point, excess) = match n {
                NotConverged::LowerNotAscending { index, point, excess } => {
                    ("lower_not_ascending", Some(*index), point, *excess)
                }
                NotConverged::UpperNotDescending { index, point, excess } => {
                    ("upper_not_descending", Some(*index), point, *excess)
                }
                NotConverged::NotSandwiched { index, point, excess } => {
                    ("not_sandwiched", Some(*index), point, *excess)
                }
                NotConverged::TargetOutside { index, point, excess } => {
                    ("target_outside", Some(*index), point, *excess)
                }
                NotConverged::GapTooLarge { point, limit_gap, residual } => {
                    r.limit_gap = Some(Num(*limit_gap));
                    r.residual = Some(Num(*residual));
                    ("gap_too_large", None, point, f64::NAN)
                }
            };
            r.reason = Some(reason);
            r.index = index;
            r.point = nums(point);
            r.excess = (!excess.is_nan()).then_some(Num(excess));
        }
    }
    r
}

fn converge(a: &ConvergeArgs) -> Outcome {
    let mut paths = a.inputs.clone();
    paths.push(a.candidate.clone());
    let cfg = a.order.cfg();
    let n = a.inputs.len();
    let report = match family(read_all(&paths)?) {
        Family::Grid(mut gs) => {
            let c = gs.pop().expect("candidate");
            convergence_report(&order_converges(&gs, &c, &cfg)?, "grid", n, &cfg)
        }
        Family::Exact(mut es) => {
            let c = es.pop().expect("candidate");
            convergence_report(&order_converges(&es, &c, &cfg)?, "exact", n, &cfg)
        }
    };
    print_json(&report);
    Ok(())
}

#[derive(Serialize)]
struct ChainBoxReport {
    #[serde(rename = "box")]
    test_box: BoxDto,
    verdict: &'static str,
    raw_gap: Num,
    /// Extrapolated gap of the limit (`gap` for a Gap verdict).
    limit_gap: Num,
    /// Pinched: every sample; Gap: the worst one.
    points: Vec<Vec<Num>>,
    /// Estimated limit values at `points` (Pinched only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    values: Vec<Num>,
}

fn chain_box_report(b: &AxisBox, v: &ChainVerdict) -> ChainBoxReport {
    match v {
        ChainVerdict::Pinched { points, values, raw_gap, limit_gap } => ChainBoxReport {
            test_box: BoxDto::from_box(b),
            verdict: "pinched",
            raw_gap: Num(*raw_gap),
            limit_gap: Num(*limit_gap),
            points: points.iter().map(|p| nums(p)).collect(),
            values: nums(values),
        },
        ChainVerdict::Gap { point, gap, raw_gap } => ChainBoxReport {
            test_box: BoxDto::from_box(b),
            verdict: "gap",
            raw_gap: Num(*raw_gap),
            limit_gap: Num(*gap),
            points: vec![nums(point)],
            values: Vec::new(),
        },
    }
}

#[derive(Serialize)]
struct ChainReport {
    mode: &'static str,
    truncation: usize,
    gap_tol: Num,
    density: usize,
    slack: Num,
    boxes: Vec<ChainBoxReport>,
}

fn parse_box(s: &str) -> Result<AxisBox, Failure> {
    let bad = || input(format!("bad box {s:?}: expected lo1,..,lok:hi1,..,hik"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let nums =
        |t: &str| t.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>();
    AxisBox::new(nums(lo)?, nums(hi)?).map_err(|e| input(format!("bad box {s:?}: {e}")))
}

fn chain_verdicts<F: OrderRepr>(
    lo: Vec<F>,
    hi: Vec<F>,
    boxes: &[AxisBox],
    cfg: &OrderCfg,
) -> ordcomp_core::Result<Vec<ChainVerdict>> {
    let chain: Vec<OrderInterval<F>> = lo.into_iter().zip(hi).map(|(l, h)| OrderInterval::new(l, h)).collect();
    Ok(chain_check(&[chain], boxes, cfg)?.remove(0))
}

fn chain(a: &ChainArgs) -> Outcome {
    if a.lo.len() != a.hi.len() {
        return Err(input(format!("{} lower ends but {} upper ends", a.lo.len(), a.hi.len())));
    }
    let n = a.lo.len();
    let paths: Vec<PathBuf> = a.lo.iter().chain(&a.hi).cloned().collect();
    let cfg = a.order.cfg();
    let fs = read_all(&paths)?;
    let domain = match &fs[0] {
        Function::Grid(g) => g.grid().bbox().clone(),
        Function::Poly(p) => p.complex().domain().clone(),
        Function::Expr(e) => e.complex().domain().clone(),
    };
    let boxes = if a.boxes.is_empty() {
        vec![domain]
    } else {
        a.boxes.iter().map(|s| parse_box(s)).collect::<Result<_, _>>()?
    };
    let (mode, verdicts) = match family(fs) {
        Family::Grid(mut gs) => {
            let hi = gs.split_off(n);
            ("grid", chain_verdicts(gs, hi, &boxes, &cfg)?)
        }
        Family::Exact(mut es) => {
            let hi = es.split_off(n);
            ("exact", chain_verdicts(es, hi, &boxes, &cfg)?)
        }
    };
    print_json(&ChainReport {
        mode,
        truncation: n,
        gap_tol: Num(cfg.gap_tol),
        density: cfg.density,
        slack: Num(cfg.slack),
        boxes: boxes.iter().zip(&verdicts).map(|(b, v)| chain_box_report(b, v)).collect(),
    });
    Ok(())
}

fn split_assign(s: &str) -> Result<(String, String), Failure> {
    let (k, v) = s.split_once('=').ok_or_else(|| input(format!("expected name=value, got {s:?}")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

fn system_text(a: &SolveArgs) -> Result<String, Failure> {
    match (&a.system, &a.equations) {
        (Some(p), None) => Ok(read_text(p)?),
        (None, Some(t)) => Ok(t.replace(';', "\n")),
        _ => Err(input("give exactly one of --system and --equations")),
    }
}

/// Builds the system, with its parameters bound and its axes matched to
/// the domain.
fn build_system(text: &str, params: &[String], domain: &AxisBox, time: bool) -> Result<PdeSystem, Failure> {
    let sys = PdeSystem::from_equations(parse_equations(text)?, None)?;
    let has_time = sys.has_time() || time;
    let n_space = domain.dim().checked_sub(has_time as usize).ok_or_else(|| input("domain has no axes"))?;
    let mut sys = sys.with_dims(n_space, has_time)?;
    for p in params {
        let (k, v) = split_assign(p)?;
        let v: f64 = v.parse().map_err(|_| input(format!("parameter {k}: not a number: {v:?}")))?;
        sys = sys.bind(&k, v)?;
    }
    if let Some((name, _)) = sys.params().find(|(_, v)| v.is_none()) {
        return Err(input(format!("parameter `{name}` has no value (use --param {name}=...)")));
    }
    Ok(sys)
}

fn assignments(list: &[String]) -> Result<BTreeMap<String, String>, Failure> {
    list.iter().map(|s| split_assign(s)).collect()
}

fn rhs_exprs(list: &[String]) -> Result<BTreeMap<String, Expr>, Failure> {
    assignments(list)?.into_iter().map(|(k, v)| Ok((k, parse_expr(&v)?))).collect()
}

fn jet_cfg() -> JetSolverCfg {
    JetSolverCfg { hook: Some(Arc::new(NavierStokesHook)), ..Default::default() }
}

fn coord_names(sys: &PdeSystem) -> Vec<String> {
    let mut v: Vec<String> = (1..=sys.n_space()).map(|i| format!("x{i}")).collect();
    if sys.has_time() {
        v.push("t".into());
    }
    v
}

/// Residual samples on the certificate lattice as long-format CSV; fails
/// with an invariant violation if a passing certificate has a sample
/// outside its band.
fn residual_dump(sol: &ApproxSolution, samples: usize) -> Result<String, Failure> {
    let mut s = coord_names(&sol.system).join(",");
    s.push_str(",component,residual,band_lo,band_hi\n");
    for r in sol.residual_samples(samples)? {
        if sol.certificate.pass && !(r.lo < r.value && r.value < r.hi) {
            return Err(Failure::Invariant(format!(
                "certified solution leaves its band at {:?} (component {}: {} not in ({}, {}))",
                r.point,
                r.component + 1,
                r.value,
                r.lo,
                r.hi
            )));
        }
        for x in &r.point {
            s.push_str(&fmt17(*x));
            s.push(',');
        }
        let _ = writeln!(s, "{},{},{},{}", r.component + 1, fmt17(r.value), fmt17(r.lo), fmt17(r.hi));
    }
    Ok(s)
}

#[derive(Serialize)]
struct SolveSummary {
    pass: bool,
    eps: Num,
    cells: usize,
    worst_margin: Num,
    initial_defect: Num,
    depth_histogram: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification_pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification_worst_margin: Option<Num>,
}

fn summary(dto: &SolutionDto) -> SolveSummary {
    let c = &dto.certificate;
    SolveSummary {
        pass: c.pass,
        eps: c.eps,
        cells: c.cells.len(),
        worst_margin: c.worst_margin,
        initial_defect: c.initial_defect,
        depth_histogram: c.depth_histogram.clone(),
        verification_pass: dto.verification.as_ref().map(|v| v.pass),
        verification_worst_margin: dto.verification.as_ref().map(|v| v.worst_margin),
    }
}

/// Certificate and optional re-verification of one solution as a DTO.
fn solution_dto(
    problem: &Problem,
    sol: &ApproxSolution,
    band: &BandArgs,
    config: serde_json::Value,
) -> Result<SolutionDto, Failure> {
    let mut dto = SolutionDto::new(problem.clone(), sol, config);
    if band.verify_density > 0 {
        dto.verification = Some(CertificateDto::from_cert(&sol.verify(band.verify_density, band.seed)?));
    }
    Ok(dto)
}

fn passed(dto: &SolutionDto) -> bool {
    dto.certificate.pass && dto.verification.as_ref().is_none_or(|v| v.pass)
}

#[derive(Serialize)]
struct SequenceFile {
    n_list: Vec<u32>,
    solutions: Vec<SolutionDto>,
    /// Per equation; absent for fewer than three terms.
    #[serde(skip_serializing_if = "Option::is_none")]
    convergence: Option<Vec<ConvergeReport>>,
    /// Per equation: the chain `[g - 1/n, g]` on the domain.
    chains: Vec<ChainBoxReport>,
}

#[derive(Serialize)]
struct SequenceSummary {
    pass: bool,
    solutions: Vec<SolveSummary>,
    converged: Option<Vec<bool>>,
    chains: Vec<&'static str>,
}

fn solve(a: &SolveArgs) -> Outcome {
    let domain = parse_box(&a.domain)?;
    let text = system_text(a)?;
    let sys = build_system(&text, &a.param, &domain, a.time)?;
    let problem = Problem::new(&sys, &rhs_exprs(&a.rhs)?, assignments(&a.u0)?, &domain)?;
    let built = problem.build()?;
    let config = serde_json::to_value(a).expect("serializable");
    let jcfg = jet_cfg();
    if !a.n_list.is_empty() {
        if a.eps.is_some() {
            return Err(input("give either --eps or --n-list, not both"));
        }
        let cfg = a.band.solve_cfg(1.0);
        let order = a.order.cfg();
        let rep = solution_sequence(
            &built.system,
            built.target.clone(),
            built.initial.clone(),
            &built.domain,
            &a.n_list,
            &cfg,
            &jcfg,
            &order,
            &Rayon,
        )?;
        let solutions = rep
            .solutions
            .iter()
            .map(|s| solution_dto(&problem, s, &a.band, config.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(path) = &a.band.dump {
            let mut all = String::new();
            for (i, s) in rep.solutions.iter().enumerate() {
                let d = residual_dump(s, a.band.samples)?;
                let body = if i == 0 { d.as_str() } else { d.split_once('\n').map_or("", |x| x.1) };
                all.push_str(body);
            }
            write_text(path, &all)?;
        }
        let n = a.n_list.len();
        let file = SequenceFile {
            n_list: a.n_list.clone(),
            convergence: rep
                .convergence
                .as_ref()
                .map(|cs| cs.iter().map(|c| convergence_report(c, "exact", n, &order)).collect()),
            chains: rep.chains.iter().map(|c| chain_box_report(&built.domain, c)).collect(),
            solutions,
        };
        if let Some(out) = &a.band.out {
            write_text(out, &to_json(&file))?;
        }
        let pass = file.solutions.iter().all(passed);
        print_json(&SequenceSummary {
            pass,
            solutions: file.solutions.iter().map(summary).collect(),
            converged: rep.convergence.as_ref().map(|cs| cs.iter().map(Convergence::is_converged).collect()),
            chains: file.chains.iter().map(|c| c.verdict).collect(),
        });
        return if pass { Ok(()) } else { Err(Failure::Solve("certificate failed".into())) };
    }
    let eps = a.eps.ok_or_else(|| input("give --eps or --n-list"))?;
    let sol =
        assemble(&built.system, built.target, built.initial, &built.domain, &a.band.solve_cfg(eps), &jcfg, &Rayon)?;
    finish_solution(&problem, &sol, &a.band, config)
}

fn finish_solution(problem: &Problem, sol: &ApproxSolution, band: &BandArgs, config: serde_json::Value) -> Outcome {
    let dto = solution_dto(problem, sol, band, config)?;
    let dump = residual_dump(sol, band.samples)?;
    if let Some(path) = &band.dump {
        write_text(path, &dump)?;
    }
    if let Some(out) = &band.out {
        write_text(out, &to_json(&dto))?;
    }
    print_json(&summary(&dto));
    if passed(&dto) {
        Ok(())
    } else {
        Err(Failure::Solve("certificate failed".into()))
    }
}

fn verify(a: &VerifyArgs) -> Outcome {
    let name = a.solution.display().to_string();
    let text = read_text(&a.solution)?;
    let dto: SolutionDto = serde_json::from_str(&text).map_err(|e| input(format!("{name}: line {}: {e}", e.line())))?;
    let sol = dto.to_solution().map_err(|e| input(format!("{name}: {e}")))?;
    let cert = sol.verify_with_eps(a.eps.unwrap_or(sol.eps), a.density, a.seed)?;
    let out = CertificateDto::from_cert(&cert);
    if let Some(p) = &a.out {
        write_text(p, &to_json(&out))?;
    }
    print_json(&SolveSummary {
        pass: cert.pass,
        eps: Num(cert.eps),
        cells: cert.cells.len(),
        worst_margin: Num(cert.worst_margin),
        initial_defect: Num(cert.initial_defect),
        depth_histogram: cert.depth_histogram.clone(),
        verification_pass: None,
        verification_worst_margin: None,
    });
    if cert.pass {
        Ok(())
    } else {
        Err(Failure::Solve(format!("band check failed, worst margin {:e}", cert.worst_margin)))
    }
}

/// `Σ_i ∂u_i/∂x_i` of polynomial initial data.
fn divergence(u: &[Poly]) -> Result<Poly, Failure> {
    let mut acc = Poly::zero(vec![0.0; 3], 0);
    for (i, p) in u.iter().enumerate() {
        acc = acc.add(&p.derivative(&MultiIndex::axis(3, i, 1)))?;
    }
    Ok(acc)
}

#[derive(Serialize)]
struct DemoSummary {
    pass: bool,
    cells: usize,
    eps: Num,
    /// `[min, max]` of each momentum residual over the certificate samples.
    momentum: Vec<[Num; 2]>,
    divergence: [Num; 2],
    worst_margin: Num,
    initial_defect: Num,
    depth_histogram: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification_pass: Option<bool>,
}

fn demo_ns(a: &DemoArgs) -> Outcome {
    let start = Instant::now();
    let domain = match &a.domain {
        Some(s) => parse_box(s)?,
        None => {
            AxisBox::new(vec![0.0; 4], vec![1.0, 1.0, 1.0, a.t_end]).map_err(|e| input(format!("bad --t-end: {e}")))?
        }
    };
    if domain.dim() != 4 {
        return Err(input("the Navier-Stokes domain needs 3 space axes and time"));
    }
    let convective = match a.convective {
        ConvectiveArg::Printed => Convective::AsPrinted,
        ConvectiveArg::Standard => Convective::Standard,
    };
    let text = ns_text(convective);
    let sys = build_system(&text, &[format!("nu={}", a.nu)], &domain, true)?;
    if !(a.nu > 0.0) {
        return Err(input(Error::NonpositiveViscosity));
    }
    let u0 = assignments(&a.u0)?;
    let params = [("nu".to_string(), a.nu)];
    let mut polys = Vec::new();
    for name in ["u1", "u2", "u3"] {
        let t = u0.get(name).ok_or_else(|| input(format!("missing initial data for {name}")))?;
        let e = parse_expr(t)?;
        let p = e
            .to_poly(3, false, &|k: &str| params.iter().find(|(n, _)| n == k).map(|(_, v)| *v))
            .ok_or_else(|| input(format!("initial data for {name} must be a polynomial")))?;
        polys.push(p);
    }
    if u0.keys().any(|k| !["u1", "u2", "u3"].contains(&k.as_str())) {
        return Err(input("initial data is only taken for u1, u2, u3"));
    }
    if !divergence(&polys)?.coeffs().values().all(|c| *c == 0.0) {
        return Err(input("initial velocity is not divergence-free"));
    }
    let problem = Problem::new(&sys, &rhs_exprs(&a.f)?, u0, &domain)?;
    let built = problem.build()?;
    let mut cfg = a.band.solve_cfg(a.eps);
    if a.band.cells.is_empty() {
        cfg.initial_cells = vec![2; 4];
    }
    cfg.max_depth = a.band.max_depth.unwrap_or(3);
    let sol = assemble(&built.system, built.target, built.initial, &built.domain, &cfg, &jet_cfg(), &Rayon)?;
    let config = serde_json::to_value(a).expect("serializable");
    let dto = solution_dto(&problem, &sol, &a.band, config)?;
    let dump = residual_dump(&sol, a.band.samples)?;
    if let Some(path) = &a.band.dump {
        write_text(path, &dump)?;
    }
    if let Some(out) = &a.band.out {
        write_text(out, &to_json(&dto))?;
    }
    let mut bands = [[f64::INFINITY, f64::NEG_INFINITY]; 4];
    for r in sol.residual_samples(a.band.samples)? {
        let b = &mut bands[r.component];
        b[0] = b[0].min(r.value);
        b[1] = b[1].max(r.value);
    }
    let c = &dto.certificate;
    print_json(&DemoSummary {
        pass: passed(&dto),
        cells: c.cells.len(),
        eps: c.eps,
        momentum: bands[..3].iter().map(|b| [Num(b[0]), Num(b[1])]).collect(),
        divergence: [Num(bands[3][0]), Num(bands[3][1])],
        worst_margin: c.worst_margin,
        initial_defect: c.initial_defect,
        depth_histogram: c.depth_histogram.clone(),
        verification_pass: dto.verification.as_ref().map(|v| v.pass),
    });
    eprintln!("demo-ns: {} cells in {:.3} s", c.cells.len(), start.elapsed().as_secs_f64());
    if passed(&dto) {
        Ok(())
    } else {
        Err(Failure::Solve("certificate failed".into()))
    }
}
