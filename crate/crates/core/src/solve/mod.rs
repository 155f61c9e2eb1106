//! Constructive ε-band solutions.
//!
//! For `T(x, D)u = g` and a tolerance `ε > 0` the solver builds a piecewise
//! polynomial `w` with `g - ε < T(x, D)w < g` on a cell complex. Each cell
//! gets a Taylor patch whose jet solves `F(a, ξ) = g(a) - θε` at an anchor
//! `a`; cells whose patch leaves the band at a verification sample are
//! bisected. The output carries a [`Certificate`] with the sampled margins.

mod jet;
mod ns;
mod target;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub use jet::{initial_slots, jet_solve, jet_solve_fixed, patch_with_initial, taylor_patch, JetSolverCfg, SolveHook};
pub use ns::NavierStokesHook;
pub use target::{ExprTarget, InitialData, InitialField, PwTarget, ScalarFn, Target};

use crate::error::{Error, Result};
use crate::geom::{bisect, AxisBox};
use crate::lattice::{chain_check, order_converges_with_brackets, ChainVerdict, Convergence, OrderCfg, OrderInterval};
use crate::pde::{apply_t, PdeSystem};
use crate::poly::Poly;
use crate::pw::{CellComplex, CellFn, PwExpr, PwPoly, Tree};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveCfg {
    pub eps: f64,
    /// Where inside the band the anchor residual is aimed: `g - θε`.
    pub theta: f64,
    /// Initial cells per axis; empty means one cell.
    pub initial_cells: Vec<usize>,
    pub max_depth: u32,
    /// Verification samples per axis per cell, besides the cell's faces.
    pub samples: usize,
    /// Patch degree; defaults to the order of the system.
    pub degree: Option<u32>,
    /// Largest accepted `|w(x, 0) - u0(x)|`.
    pub initial_tol: f64,
}

impl Default for SolveCfg {
    fn default() -> Self {
        SolveCfg {
            eps: 0.1,
            theta: 0.5,
            initial_cells: Vec::new(),
            max_depth: 12,
            samples: 3,
            degree: None,
            initial_tol: 1e-12,
        }
    }
}

/// Runs independent per-cell jobs; results must come back in job order.
pub trait CellExecutor: Sync {
    fn map(&self, jobs: usize, work: &(dyn Fn(usize) -> Result<CellOutcome> + Sync)) -> Vec<Result<CellOutcome>>;
}

/// One job after the other on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl CellExecutor for Sequential {
    fn map(&self, jobs: usize, work: &(dyn Fn(usize) -> Result<CellOutcome> + Sync)) -> Vec<Result<CellOutcome>> {
        (0..jobs).map(work).collect()
    }
}

/// Result of one cell job: an accepted patch or a request to bisect.
#[derive(Debug)]
pub struct CellOutcome(Outcome);

#[derive(Debug)]
enum Outcome {
    Accepted(Piece),
    Split,
}

#[derive(Debug)]
struct Piece {
    cell: AxisBox,
    depth: u32,
    anchor: Vec<f64>,
    polys: Vec<Poly>,
    report: Band,
}

/// Sampled band margins of one cell.
#[derive(Clone, Debug, PartialEq)]
struct Band {
    samples: usize,
    min: f64,
    max: f64,
    worst: Vec<f64>,
    defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellReport {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub depth: u32,
    pub initial: bool,
    pub anchor: Vec<f64>,
    /// Jet of the patch at the anchor, in [`crate::pde::JetSpec`] slot order.
    pub jet: Vec<f64>,
    pub samples: usize,
    /// Smallest and largest `min(T w - (g - ε), g - T w)` over samples and
    /// components.
    pub min_margin: f64,
    pub max_margin: f64,
    pub initial_defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub eps: f64,
    pub theta: f64,
    pub cells: Vec<CellReport>,
    pub worst_margin: f64,
    pub worst_point: Vec<f64>,
    /// Sample density the margins were taken at.
    pub density: usize,
    pub total_samples: usize,
    pub initial_defect: f64,
    pub initial_tol: f64,
    /// Number of cells per bisection depth.
    pub depth_histogram: Vec<usize>,
    pub pass: bool,
}

impl Certificate {
    fn build(
        eps: f64,
        theta: f64,
        density: usize,
        initial_tol: f64,
        cells: Vec<CellReport>,
        worst: Vec<Vec<f64>>,
    ) -> Self {
        let mut worst_margin = f64::INFINITY;
        let mut worst_point = Vec::new();
        for (c, w) in cells.iter().zip(worst) {
            if !(c.min_margin >= worst_margin) {
                worst_margin = c.min_margin;
                worst_point = w;
            }
        }
        let initial_defect = cells.iter().fold(0.0f64, |m, c| m.max(c.initial_defect));
        let deepest = cells.iter().map(|c| c.depth as usize).max().unwrap_or(0);
        let mut depth_histogram = vec![0; deepest + 1];
        for c in &cells {
            depth_histogram[c.depth as usize] += 1;
        }
        let pass = worst_margin > 0.0 && initial_defect <= initial_tol;
        Certificate {
            eps,
            theta,
            total_samples: cells.iter().map(|c| c.samples).sum(),
            cells,
            worst_margin,
            worst_point,
            density,
            initial_defect,
            initial_tol,
            depth_histogram,
            pass,
        }
    }
}

/// An ε-band solution with everything needed to re-check it.
#[derive(Clone, Debug)]
pub struct ApproxSolution {
    pub system: Arc<PdeSystem>,
    pub target: Arc<dyn Target>,
    pub initial: Option<InitialData>,
    pub eps: f64,
    pub theta: f64,
    /// One function per unknown, in [`crate::pde::JetSpec::unknowns`] order.
    pub w: Vec<PwPoly>,
    pub anchors: Vec<Vec<f64>>,
    pub depths: Vec<u32>,
    pub certificate: Certificate,
}

struct Ctx<'a> {
    sys: &'a PdeSystem,
    target: &'a dyn Target,
    initial: Option<&'a InitialData>,
    domain: &'a AxisBox,
    cfg: &'a SolveCfg,
    jcfg: &'a JetSolverCfg,
    degree: u32,
}

fn touches_initial(domain: &AxisBox, cell: &AxisBox, initial: Option<&InitialData>) -> bool {
    let t = domain.dim() - 1;
    initial.is_some() && cell.lo()[t] == domain.lo()[t]
}

fn spatial_face(cell: &AxisBox) -> (&[f64], &[f64]) {
    let n = cell.dim() - 1;
    (&cell.lo()[..n], &cell.hi()[..n])
}

/// Closed tensor lattice: both faces plus `k` interior points per axis.
/// With `skip_t0` the lower face of the last axis is left out.
fn band_lattice(lo: &[f64], hi: &[f64], k: usize, skip_t0: bool) -> Vec<Vec<f64>> {
    let dim = lo.len();
    let axes: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            let mut v: Vec<f64> = (0..k + 2).map(|j| lo[i] + (hi[i] - lo[i]) * j as f64 / (k + 1) as f64).collect();
            v[k + 1] = hi[i];
            if skip_t0 && i == dim - 1 {
                v.remove(0);
            }
            v
        })
        .collect();
    product(&axes)
}

fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for ax in axes {
        out = out
            .iter()
            .flat_map(|p| {
                ax.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    out
}

fn jet_polys(sys: &PdeSystem, polys: &[Poly]) -> Vec<Poly> {
    sys.jets().slots().iter().map(|(u, a)| polys[*u].derivative(a)).collect()
}

fn band_margins(
    sys: &PdeSystem,
    target: &dyn Target,
    eps: f64,
    polys: &[Poly],
    points: &[Vec<f64>],
) -> Result<(f64, f64, Vec<f64>)> {
    let jp = jet_polys(sys, polys);
    let (mut lo, mut hi, mut worst) = (f64::INFINITY, f64::NEG_INFINITY, Vec::new());
    for x in points {
        let jet: Vec<f64> = jp.iter().map(|p| p.eval(x)).collect();
        let m = match (sys.eval_f(x, &jet), target.eval(x)) {
            (Ok(tw), Ok(g)) => tw
                .iter()
                .zip(&g)
                .map(|(tw, g)| (tw - (g - eps)).min(g - tw))
                .fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NEG_INFINITY } else { a.min(b) }),
            (_, Err(e)) => return Err(e),
            (Err(_), _) => f64::NEG_INFINITY,
        };
        if m < lo || worst.is_empty() {
            lo = m;
            worst = x.clone();
        }
        hi = hi.max(m);
    }
    Ok((lo, hi, worst))
}

fn initial_defect(initial: &InitialData, polys: &[Poly], face_points: &[Vec<f64>]) -> f64 {
    let mut d = 0.0f64;
    for (f, p) in initial.fields().iter().zip(polys) {
        let Some(f) = f else { continue };
        for x in face_points {
            let mut xt = x.clone();
            xt.push(0.0);
            let e = (p.eval(&xt) - f.eval(x)).abs();
            d = if e.is_nan() { f64::INFINITY } else { d.max(e) };
        }
    }
    d
}

fn solve_cell(ctx: &Ctx<'_>, cell: &AxisBox, depth: u32) -> Result<CellOutcome> {
    let sys = ctx.sys;
    let (cfg, eps) = (ctx.cfg, ctx.cfg.eps);
    let on_face = touches_initial(ctx.domain, cell, ctx.initial);
    let mut anchor = cell.center();
    if on_face {
        *anchor.last_mut().expect("time axis") = 0.0;
    }
    let target: Vec<f64> = ctx.target.eval(&anchor)?.iter().map(|g| g - cfg.theta * eps).collect();
    let polys = if on_face {
        let (lo, hi) = spatial_face(cell);
        let u0 = ctx.initial.expect("initial data").on_face(lo, hi, ctx.degree)?;
        let hooked = ctx.jcfg.hook.as_ref().and_then(|h| h.initial_patch(sys, cell, &anchor, &target, &u0));
        match hooked {
            Some(p) => p,
            None => {
                let fixed = initial_slots(sys.jets(), &anchor, &u0);
                let jet = jet_solve_fixed(sys, &anchor, &target, &fixed, ctx.jcfg)?;
                patch_with_initial(&jet, &anchor, sys.jets(), ctx.degree, &u0)?
            }
        }
    } else {
        let jet = jet_solve(sys, &anchor, &target, ctx.jcfg)?;
        taylor_patch(&jet, &anchor, sys.jets(), ctx.degree)?
    };
    let polys = polys
        .into_iter()
        .map(|p| {
            let d = p.degree().max(ctx.degree);
            p.with_degree(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let points = band_lattice(cell.lo(), cell.hi(), cfg.samples, on_face);
    let (min, max, worst) = band_margins(sys, ctx.target, eps, &polys, &points)?;
    let defect = match ctx.initial {
        Some(init) if on_face => {
            let (lo, hi) = spatial_face(cell);
            let face_points = band_lattice(lo, hi, cfg.samples, false);
            initial_defect(init, &polys, &face_points)
        }
        _ => 0.0,
    };
    if min > 0.0 && defect <= cfg.initial_tol {
        let report = Band { samples: points.len(), min, max, worst, defect };
        return Ok(CellOutcome(Outcome::Accepted(Piece { cell: cell.clone(), depth, anchor, polys, report })));
    }
    if depth >= cfg.max_depth {
        return Err(Error::DepthExhausted { lo: cell.lo().to_vec(), hi: cell.hi().to_vec(), margin: min });
    }
    Ok(CellOutcome(Outcome::Split))
}

fn check_cfg(sys: &PdeSystem, target: &dyn Target, domain: &AxisBox, cfg: &SolveCfg) -> Result<u32> {
    if domain.dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: domain.dim() });
    }
    if target.len() != sys.len() {
        return Err(Error::DimensionMismatch { expected: sys.len(), got: target.len() });
    }
    if !(cfg.eps > 0.0 && cfg.eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive and finite, got {}", cfg.eps)));
    }
    if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1), got {}", cfg.theta)));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let order = sys.jets().order();
    let degree = cfg.degree.unwrap_or(order);
    if degree < order {
        return Err(Error::DegreeTooLow { needed: order as usize, got: degree as usize });
    }
    Ok(degree)
}

/// Builds a certified ε-band solution of `T(x, D)u = g` on `domain`.
///
/// Cells are processed breadth first: every round hands all pending cells
/// to `exec`, and rejected cells are bisected along their widest axis
/// (ties go to the lowest axis). The result is deterministic whatever the
/// executor, since outcomes are consumed in queue order.
pub fn assemble(
    sys: &Arc<PdeSystem>,
    target: Arc<dyn Target>,
    initial: Option<InitialData>,
    domain: &AxisBox,
    cfg: &SolveCfg,
    jcfg: &JetSolverCfg,
    exec: &dyn CellExecutor,
) -> Result<ApproxSolution> {
    let degree = check_cfg(sys, target.as_ref(), domain, cfg)?;
    if initial.is_some() {
        if !sys.has_time() {
            return Err(Error::InvalidArgument("initial data needs a time-dependent system".into()));
        }
        if domain.lo()[domain.dim() - 1] != 0.0 {
            return Err(Error::CenterNotOnInitialFace);
        }
    }
    let counts = if cfg.initial_cells.is_empty() { vec![1; domain.dim()] } else { cfg.initial_cells.clone() };
    let start = CellComplex::uniform(domain.clone(), &counts)?;
    let ctx = Ctx { sys, target: target.as_ref(), initial: initial.as_ref(), domain, cfg, jcfg, degree };
    let mut pending: VecDeque<(AxisBox, u32)> = start.cells().iter().map(|c| (c.clone(), 0)).collect();
    let mut pieces = Vec::new();
    while !pending.is_empty() {
        let round: Vec<(AxisBox, u32)> = pending.drain(..).collect();
        let results = exec.map(round.len(), &|i| solve_cell(&ctx, &round[i].0, round[i].1));
        for ((cell, depth), r) in round.into_iter().zip(results) {
            match r?.0 {
                Outcome::Accepted(p) => pieces.push(p),
                Outcome::Split => {
                    let (a, b) = bisect(&cell, cell.widest_axis())?;
                    pending.push_back((a, depth + 1));
                    pending.push_back((b, depth + 1));
                }
            }
        }
    }
    pieces.sort_by(|a, b| a.cell.lex_cmp(&b.cell));
    finish(sys.clone(), target, initial, cfg, pieces)
}

fn finish(
    system: Arc<PdeSystem>,
    target: Arc<dyn Target>,
    initial: Option<InitialData>,
    cfg: &SolveCfg,
    pieces: Vec<Piece>,
) -> Result<ApproxSolution> {
    let domain = {
        let dim = pieces[0].cell.dim();
        let lo = (0..dim).map(|i| pieces.iter().map(|p| p.cell.lo()[i]).fold(f64::INFINITY, f64::min)).collect();
        let hi = (0..dim).map(|i| pieces.iter().map(|p| p.cell.hi()[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        AxisBox::new(lo, hi)?
    };
    let complex = CellComplex::new(domain.clone(), pieces.iter().map(|p| p.cell.clone()).collect())?;
    let n_unknowns = system.jets().unknowns().len();
    let w = (0..n_unknowns)
        .map(|u| PwPoly::new(complex.clone(), pieces.iter().map(|p| p.polys[u].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = Vec::with_capacity(pieces.len());
    let mut worst = Vec::with_capacity(pieces.len());
    for p in &pieces {
        reports.push(CellReport {
            lo: p.cell.lo().to_vec(),
            hi: p.cell.hi().to_vec(),
            depth: p.depth,
            initial: touches_initial(&domain, &p.cell, initial.as_ref()),
            anchor: p.anchor.clone(),
            jet: jet_polys(&system, &p.polys).iter().map(|q| q.eval(&p.anchor)).collect(),
            samples: p.report.samples,
            min_margin: p.report.min,
            max_margin: p.report.max,
            initial_defect: p.report.defect,
        });
        worst.push(p.report.worst.clone());
    }
    let certificate = Certificate::build(cfg.eps, cfg.theta, cfg.samples, cfg.initial_tol, reports, worst);
    Ok(ApproxSolution {
        system,
        target,
        initial,
        eps: cfg.eps,
        theta: cfg.theta,
        w,
        anchors: pieces.iter().map(|p| p.anchor.clone()).collect(),
        depths: pieces.iter().map(|p| p.depth).collect(),
        certificate,
    })
}

fn unit_open(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn random_points(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64], count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| lo.iter().zip(hi).map(|(a, b)| a + (b - a) * unit_open(rng)).collect()).collect()
}

impl ApproxSolution {
    pub fn complex(&self) -> &CellComplex {
        use crate::pw::Piecewise;
        self.w[0].complex()
    }

    /// `T(x, D)w`, one function per equation.
    pub fn apply(&self) -> Result<Vec<PwExpr>> {
        apply_t(&self.system, &self.w)
    }

    /// Polynomials of one cell, one per unknown.
    pub fn cell_polys(&self, cell: usize) -> Vec<Poly> {
        self.w.iter().map(|f| f.pieces()[cell].clone()).collect()
    }

    /// Re-checks the band at `density^dim` fresh random points per cell,
    /// drawn from a generator seeded with `seed`.
    pub fn verify(&self, density: usize, seed: u64) -> Result<Certificate> {
        self.verify_with_eps(self.eps, density, seed)
    }

    /// As [`ApproxSolution::verify`], against the band of another `ε`.
    pub fn verify_with_eps(&self, eps: f64, density: usize, seed: u64) -> Result<Certificate> {
        if density == 0 {
            return Err(Error::InvalidArgument("density must be >= 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cx = self.complex();
        let domain = cx.domain().clone();
        let dim = domain.dim();
        let mut reports = Vec::with_capacity(cx.len());
        let mut worst = Vec::with_capacity(cx.len());
        for (c, cell) in cx.cells().iter().enumerate() {
            let polys = self.cell_polys(c);
            let points = random_points(&mut rng, cell.lo(), cell.hi(), density.pow(dim as u32));
            let (min, max, w) = band_margins(&self.system, self.target.as_ref(), eps, &polys, &points)?;
            let on_face = touches_initial(&domain, cell, self.initial.as_ref());
            let defect = match &self.initial {
                Some(init) if on_face => {
                    let (lo, hi) = spatial_face(cell);
                    let fp = random_points(&mut rng, lo, hi, density.pow(dim as u32 - 1));
                    initial_defect(init, &polys, &fp)
                }
                _ => 0.0,
            };
            let anchor = self.anchors.get(c).cloned().unwrap_or_else(|| cell.center());
            reports.push(CellReport {
                lo: cell.lo().to_vec(),
                hi: cell.hi().to_vec(),
                depth: self.depths.get(c).copied().unwrap_or(0),
                initial: on_face,
                jet: jet_polys(&self.system, &polys).iter().map(|q| q.eval(&anchor)).collect(),
                anchor,
                samples: points.len(),
                min_margin: min,
                max_margin: max,
                initial_defect: defect,
            });
            worst.push(w);
        }
        Ok(Certificate::build(eps, self.theta, density, self.certificate.initial_tol, reports, worst))
    }
}

/// One residual component at one sample: `value = (T w)_i(x)` against the
/// band `(lo, hi) = (g_i - ε, g_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSample {
    pub point: Vec<f64>,
    pub component: usize,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl ApproxSolution {
    /// Residuals on the verification lattice of every cell, `samples`
    /// interior points per axis plus the faces, cell by cell.
    pub fn residual_samples(&self, samples: usize) -> Result<Vec<ResidualSample>> {
        let cx = self.complex();
        let domain = cx.domain().clone();
        let mut out = Vec::new();
        for (c, cell) in cx.cells().iter().enumerate() {
            let jp = jet_polys(&self.system, &self.cell_polys(c));
            let on_face = touches_initial(&domain, cell, self.initial.as_ref());
            for x in band_lattice(cell.lo(), cell.hi(), samples, on_face) {
                let jet: Vec<f64> = jp.iter().map(|p| p.eval(&x)).collect();
                let tw = self.system.eval_f(&x, &jet)?;
                let g = self.target.eval(&x)?;
                for (i, (v, g)) in tw.iter().zip(&g).enumerate() {
                    out.push(ResidualSample { point: x.clone(), component: i, value: *v, lo: g - self.eps, hi: *g });
                }
            }
        }
        Ok(out)
    }
}

/// `g_i(x) + shift` as a cell function.
#[derive(Debug)]
struct TargetComponent {
    target: Arc<dyn Target>,
    index: usize,
    shift: f64,
}

impl CellFn for TargetComponent {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.target.eval(x)?[self.index] + self.shift)
    }
}

fn target_expr(target: &Arc<dyn Target>, domain: &AxisBox, index: usize, shift: f64) -> PwExpr {
    let f = TargetComponent { target: target.clone(), index, shift };
    PwExpr::new(CellComplex::single(domain.clone()), vec![Tree::Func(Arc::new(f))]).expect("single cell")
}

/// Solutions for `ε_n = 1/n` and the order-theoretic view of them.
#[derive(Debug)]
pub struct SequenceReport {
    pub solutions: Vec<ApproxSolution>,
    /// Per equation: does `T w_n` order-converge to `g_i` within the
    /// brackets `g_i - 1/n ≤ T w_n ≤ g_i`? Needs at least three terms.
    pub convergence: Option<Vec<Convergence<PwExpr>>>,
    /// Per equation: the interval chain `[g_i - 1/n, g_i]` on the domain.
    pub chains: Vec<ChainVerdict>,
}

/// Solves for every `ε = 1/n`, `n` in `ns` (strictly increasing), then
/// checks order convergence of `T w_n` to `g` and that the band chain
/// pinches to `g`.
#[allow(clippy::too_many_arguments)]
pub fn solution_sequence(
    sys: &Arc<PdeSystem>,
    target: Arc<dyn Target>,
    initial: Option<InitialData>,
    domain: &AxisBox,
    ns: &[u32],
    cfg: &SolveCfg,
    jcfg: &JetSolverCfg,
    order: &OrderCfg,
    exec: &dyn CellExecutor,
) -> Result<SequenceReport> {
    if ns.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) || ns[0] == 0 {
        return Err(Error::InvalidArgument("n values must be positive and strictly increasing".into()));
    }
    let mut solutions = Vec::with_capacity(ns.len());
    for n in ns {
        let c = SolveCfg { eps: 1.0 / *n as f64, ..cfg.clone() };
        solutions.push(assemble(sys, target.clone(), initial.clone(), domain, &c, jcfg, exec)?);
    }
    let applied = solutions.iter().map(ApproxSolution::apply).collect::<Result<Vec<_>>>()?;
    let m = sys.len();
    let lower = |i: usize, n: u32| target_expr(&target, domain, i, -1.0 / n as f64);
    let convergence = if ns.len() >= 3 {
        let mut out = Vec::with_capacity(m);
        for i in 0..m {
            let seq: Vec<PwExpr> = applied.iter().map(|tw| tw[i].clone()).collect();
            let g = target_expr(&target, domain, i, 0.0);
            let lambdas = ns.iter().map(|n| lower(i, *n)).collect();
            let mus = vec![g.clone(); ns.len()];
            out.push(order_converges_with_brackets(&seq, &g, lambdas, mus, order)?);
        }
        Some(out)
    } else {
        None
    };
    let chains: Vec<Vec<OrderInterval<PwExpr>>> = (0..m)
        .map(|i| ns.iter().map(|n| OrderInterval::new(lower(i, *n), target_expr(&target, domain, i, 0.0))).collect())
        .collect();
    let chains =
        chain_check(&chains, core::slice::from_ref(domain), order)?.into_iter().map(|mut r| r.remove(0)).collect();
    Ok(SequenceReport { solutions, convergence, chains })
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "eps {} theta {} cells {} samples {}", self.eps, self.theta, self.cells.len(), self.total_samples)?;
        writeln!(f, "worst margin {:e} at {:?}", self.worst_margin, self.worst_point)?;
        writeln!(f, "initial defect {:e} (tol {:e})", self.initial_defect, self.initial_tol)?;
        writeln!(f, "depths {:?}", self.depth_histogram)?;
        write!(f, "{}", if self.pass { "PASS" } else { "FAIL" })
    }
}
