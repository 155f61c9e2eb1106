//! Piecewise functions on axis-aligned cell complexes.
//!
//! A [`PwPoly`] carries one polynomial per cell; a [`PwExpr`] carries a
//! min/max tree per cell, which is how lattice results are kept exact. Both
//! are evaluated with the incident-cell rule: at `x`, take the minimum over
//! all cells whose closure contains `x` of that cell's expression at `x`.
//! Inside a cell this is the cell's own value; on the skeleton it is the
//! smallest one-sided limit, which is exactly the continuum `I∘S` of a
//! function that is continuous on every closed cell.

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geom::{interior_lattice, AxisBox, MultiIndex};
use crate::grid::{Grid, GridFn};
use crate::poly::Poly;
use crate::xreal::XReal;

/// Finite list of boxes with pairwise disjoint interiors covering a domain.
#[derive(Clone, Debug)]
pub struct CellComplex {
    domain: AxisBox,
    cells: Vec<AxisBox>,
    // cell ids sorted by lo[0]
    by_lo0: Vec<usize>,
    lo0: Vec<f64>,
    max_w0: f64,
}

impl PartialEq for CellComplex {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.cells == other.cells
    }
}

impl CellComplex {
    /// Validates disjointness of interiors and coverage (by volume).
    pub fn new(domain: AxisBox, cells: Vec<AxisBox>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyPartition);
        }
        for (i, c) in cells.iter().enumerate() {
            if c.dim() != domain.dim() {
                return Err(Error::DimensionMismatch { expected: domain.dim(), got: c.dim() });
            }
            if !c.has_interior() {
                return Err(Error::InvalidComplex(format!("cell {i} has empty interior")));
            }
            if !domain.contains_box(c) {
                return Err(Error::InvalidComplex(format!("cell {i} leaves the domain")));
            }
        }
        let cx = Self::build(domain, cells);
        let mut vol = 0.0;
        for (i, c) in cx.cells.iter().enumerate() {
            vol += c.volume();
            for j in cx.query(c) {
                if j != i && c.intersect(&cx.cells[j]).is_some() {
                    return Err(Error::InvalidComplex(format!("cells {i} and {j} overlap")));
                }
            }
        }
        let dv = cx.domain.volume();
        if (vol - dv).abs() > 1e-9 * dv {
            return Err(Error::InvalidComplex(format!("cells cover volume {vol}, domain has {dv}")));
        }
        Ok(cx)
    }

    /// The trivial complex with a single cell.
    pub fn single(domain: AxisBox) -> Self {
        Self::build(domain.clone(), vec![domain])
    }

    /// Tensor partition with `n[i]` equal cells along axis `i`.
    pub fn uniform(domain: AxisBox, n: &[usize]) -> Result<Self> {
        if n.len() != domain.dim() || n.contains(&0) {
            return Err(Error::InvalidArgument("one positive cell count per axis required".into()));
        }
        let total: usize = n.iter().product();
        let mut cells = Vec::with_capacity(total);
        let mut idx = vec![0usize; n.len()];
        let edge = |axis: usize, k: usize| -> f64 {
            if k == n[axis] {
                domain.hi()[axis]
            } else {
                domain.lo()[axis] + domain.width(axis) * (k as f64 / n[axis] as f64)
            }
        };
        for _ in 0..total {
            let lo = (0..n.len()).map(|a| edge(a, idx[a])).collect();
            let hi = (0..n.len()).map(|a| edge(a, idx[a] + 1)).collect();
            cells.push(AxisBox::new(lo, hi)?);
            for a in (0..n.len()).rev() {
                idx[a] += 1;
                if idx[a] < n[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        CellComplex::new(domain, cells)
    }

    fn build(domain: AxisBox, cells: Vec<AxisBox>) -> Self {
        let mut by_lo0: Vec<usize> = (0..cells.len()).collect();
        by_lo0.sort_by(|a, b| cells[*a].lo()[0].total_cmp(&cells[*b].lo()[0]).then(a.cmp(b)));
        let lo0 = by_lo0.iter().map(|&i| cells[i].lo()[0]).collect();
        let max_w0 = cells.iter().map(|c| c.width(0)).fold(0.0, f64::max);
        CellComplex { domain, cells, by_lo0, lo0, max_w0 }
    }

    pub fn domain(&self) -> &AxisBox {
        &self.domain
    }

    pub fn cells(&self) -> &[AxisBox] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Ids (ascending) of cells whose closure meets the closure of `b`.
    pub fn query(&self, b: &AxisBox) -> Vec<usize> {
        let lo_bound = b.lo()[0] - self.max_w0;
        let start = self.lo0.partition_point(|v| *v < lo_bound);
        let end = self.lo0.partition_point(|v| *v <= b.hi()[0]);
        let mut out: Vec<usize> = self.by_lo0[start..end]
            .iter()
            .copied()
            .filter(|&i| {
                let c = &self.cells[i];
                (0..b.dim()).all(|a| c.lo()[a] <= b.hi()[a] && b.lo()[a] <= c.hi()[a])
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Ids (ascending) of cells whose closure contains `x`.
    pub fn locate(&self, x: &[f64]) -> Vec<usize> {
        match AxisBox::new(x.to_vec(), x.to_vec()) {
            Ok(p) => self.query(&p),
            Err(_) => Vec::new(),
        }
    }

    /// True when `x` is inside the domain but in no cell interior.
    pub fn on_skeleton(&self, x: &[f64]) -> bool {
        self.domain.contains(x) && !self.locate(x).iter().any(|&i| self.cells[i].contains_interior(x))
    }
}

/// Cell-level expression that is not a polynomial, e.g. a PDE operator
/// applied to the cell polynomials.
pub trait CellFn: Send + Sync + fmt::Debug {
    fn eval(&self, x: &[f64]) -> Result<f64>;
}

/// Min/max tree evaluated pointwise inside one cell.
#[derive(Clone, Debug)]
pub enum Tree {
    Const(f64),
    Leaf(Arc<Poly>),
    Func(Arc<dyn CellFn>),
    Min(Vec<Tree>),
    Max(Vec<Tree>),
    Neg(Box<Tree>),
}

impl Tree {
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Tree::Const(c) => Ok(*c),
            Tree::Leaf(p) => Ok(p.eval(x)),
            Tree::Func(f) => f.eval(x),
            Tree::Min(ts) => fold(ts, x, f64::INFINITY, f64::min),
            Tree::Max(ts) => fold(ts, x, f64::NEG_INFINITY, f64::max),
            Tree::Neg(t) => Ok(-t.eval(x)?),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Min(ts) | Tree::Max(ts) => 1 + ts.iter().map(Tree::depth).max().unwrap_or(0),
            Tree::Neg(t) => 1 + t.depth(),
            _ => 0,
        }
    }
}

fn fold(ts: &[Tree], x: &[f64], init: f64, f: fn(f64, f64) -> f64) -> Result<f64> {
    let mut acc = init;
    for t in ts {
        acc = f(acc, t.eval(x)?);
    }
    Ok(acc)
}

/// Anything that is given cell by cell on a [`CellComplex`].
pub trait Piecewise {
    fn complex(&self) -> &CellComplex;

    /// The cell's expression at `x`, extended continuously to the closed cell.
    fn eval_cell(&self, cell: usize, x: &[f64]) -> Result<f64>;

    /// NLSC value: minimum over incident cells.
    fn eval_nlsc(&self, x: &[f64]) -> Result<f64> {
        incident_reduce(self, x, f64::INFINITY, f64::min)
    }

    /// Upper semi-continuous counterpart: maximum over incident cells.
    fn eval_usc(&self, x: &[f64]) -> Result<f64> {
        incident_reduce(self, x, f64::NEG_INFINITY, f64::max)
    }
}

fn incident_reduce<P: Piecewise + ?Sized>(f: &P, x: &[f64], init: f64, pick: fn(f64, f64) -> f64) -> Result<f64> {
    let cx = f.complex();
    if x.len() != cx.domain.dim() {
        return Err(Error::DimensionMismatch { expected: cx.domain.dim(), got: x.len() });
    }
    if !cx.domain.contains(x) {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    let cells = cx.locate(x);
    if cells.is_empty() {
        return Err(Error::OutOfDomain(x.to_vec()));
    }
    let mut acc = init;
    for c in cells {
        let v = f.eval_cell(c, x)?;
        if v.is_nan() {
            return Err(Error::EvalDomain(format!("NaN in cell {c}")));
        }
        acc = pick(acc, v);
    }
    Ok(acc)
}

/// A piecewise polynomial: the computable model of `ML(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PwPoly {
    complex: CellComplex,
    pieces: Vec<Poly>,
}

impl PwPoly {
    pub fn new(complex: CellComplex, pieces: Vec<Poly>) -> Result<Self> {
        if pieces.len() != complex.len() {
            return Err(Error::DimensionMismatch { expected: complex.len(), got: pieces.len() });
        }
        for p in &pieces {
            if p.dim() != complex.domain.dim() {
                return Err(Error::DimensionMismatch { expected: complex.domain.dim(), got: p.dim() });
            }
        }
        Ok(PwPoly { complex, pieces })
    }

    /// One polynomial on the whole domain.
    pub fn single(domain: AxisBox, p: Poly) -> Result<Self> {
        PwPoly::new(CellComplex::single(domain), vec![p])
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    /// Exact `D^α` of the cell polynomial at an interior point.
    pub fn deriv_eval(&self, x: &[f64], alpha: &MultiIndex) -> Result<f64> {
        let cx = &self.complex;
        if !cx.domain.contains(x) {
            return Err(Error::OutOfDomain(x.to_vec()));
        }
        let cells = cx.locate(x);
        match cells.iter().find(|&&c| cx.cells[c].contains_interior(x)) {
            Some(&c) => Ok(self.pieces[c].deriv_eval(x, alpha)),
            None => Err(Error::OnSkeleton(x.to_vec())),
        }
    }

    pub fn to_expr(&self) -> PwExpr {
        PwExpr {
            complex: self.complex.clone(),
            trees: self.pieces.iter().map(|p| Tree::Leaf(Arc::new(p.clone()))).collect(),
        }
    }
}

impl Piecewise for PwPoly {
    fn complex(&self) -> &CellComplex {
        &self.complex
    }

    fn eval_cell(&self, cell: usize, x: &[f64]) -> Result<f64> {
        Ok(self.pieces[cell].eval(x))
    }
}

/// Piecewise function whose cells carry min/max trees.
#[derive(Clone, Debug)]
pub struct PwExpr {
    complex: CellComplex,
    trees: Vec<Tree>,
}

impl PwExpr {
    pub fn new(complex: CellComplex, trees: Vec<Tree>) -> Result<Self> {
        if trees.len() != complex.len() {
            return Err(Error::DimensionMismatch { expected: complex.len(), got: trees.len() });
        }
        Ok(PwExpr { complex, trees })
    }

    pub fn constant(domain: AxisBox, c: f64) -> Self {
        PwExpr { complex: CellComplex::single(domain), trees: vec![Tree::Const(c)] }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    /// Re-expresses `self` on a refinement of its complex.
    pub fn refine_to(&self, fine: &CellComplex) -> Result<PwExpr> {
        if fine.domain != self.complex.domain {
            return Err(Error::DomainMismatch);
        }
        let trees =
            fine.cells.iter().map(|c| self.owner_of(c).map(|i| self.trees[i].clone())).collect::<Result<Vec<_>>>()?;
        Ok(PwExpr { complex: fine.clone(), trees })
    }

    /// The unique cell of `self` containing the fine cell `c`.
    fn owner_of(&self, c: &AxisBox) -> Result<usize> {
        let mid = c.center();
        self.complex
            .locate(&mid)
            .into_iter()
            .find(|&i| self.complex.cells[i].contains_box(c))
            .ok_or_else(|| Error::InvalidComplex("not a refinement".into()))
    }

    /// Pointwise maximum of a family, on the common refinement.
    pub fn max_of(family: &[PwExpr]) -> Result<PwExpr> {
        Self::combine(family, Tree::Max)
    }

    /// Pointwise minimum of a family, on the common refinement.
    pub fn min_of(family: &[PwExpr]) -> Result<PwExpr> {
        Self::combine(family, Tree::Min)
    }

    fn combine(family: &[PwExpr], node: fn(Vec<Tree>) -> Tree) -> Result<PwExpr> {
        let first = family.first().ok_or(Error::EmptyFamily)?;
        if family.len() == 1 {
            return Ok(first.clone());
        }
        let fine = refine_all(family.iter().map(|f| &f.complex))?;
        let refined = family.iter().map(|f| f.refine_to(&fine)).collect::<Result<Vec<_>>>()?;
        let trees = (0..fine.len()).map(|c| node(refined.iter().map(|f| f.trees[c].clone()).collect())).collect();
        Ok(PwExpr { complex: fine, trees })
    }

    pub fn neg(&self) -> PwExpr {
        PwExpr {
            complex: self.complex.clone(),
            trees: self.trees.iter().map(|t| Tree::Neg(Box::new(t.clone()))).collect(),
        }
    }
}

impl From<&PwPoly> for PwExpr {
    fn from(p: &PwPoly) -> Self {
        p.to_expr()
    }
}

impl Piecewise for PwExpr {
    fn complex(&self) -> &CellComplex {
        &self.complex
    }

    fn eval_cell(&self, cell: usize, x: &[f64]) -> Result<f64> {
        self.trees[cell].eval(x)
    }
}

/// Coarsest box partition refining both complexes: all pairwise
/// intersections with nonempty interior, in lexicographic cell order.
pub fn common_refinement(a: &CellComplex, b: &CellComplex) -> Result<CellComplex> {
    if a.domain != b.domain {
        return Err(Error::DomainMismatch);
    }
    if a == b {
        return Ok(a.clone());
    }
    let mut cells = Vec::new();
    for ca in &a.cells {
        for j in b.query(ca) {
            if let Some(c) = ca.intersect(&b.cells[j]) {
                cells.push(c);
            }
        }
    }
    cells.sort_by(|x, y| x.lex_cmp(y));
    Ok(CellComplex::build(a.domain.clone(), cells))
}

/// Common refinement of any number of complexes.
pub fn refine_all<'a>(mut it: impl Iterator<Item = &'a CellComplex>) -> Result<CellComplex> {
    let first = it.next().ok_or(Error::EmptyFamily)?.clone();
    it.try_fold(first, |acc, c| common_refinement(&acc, c))
}

/// Outcome of a sampled order test.
#[derive(Clone, Debug, PartialEq)]
pub enum LeqVerdict {
    Holds,
    /// Worst violating sample and the gap `f(x) - g(x)`.
    CounterexampleAt(Vec<f64>, f64),
}

/// Samples `f <= g + tol` on the interior lattice of the common refinement.
pub fn leq_samples<F: Piecewise + ?Sized, G: Piecewise + ?Sized>(
    f: &F,
    g: &G,
    density: usize,
    tol: f64,
) -> Result<LeqVerdict> {
    if density == 0 {
        return Err(Error::InvalidArgument("density must be >= 1".into()));
    }
    let fine = common_refinement(f.complex(), g.complex())?;
    let mut worst: Option<(Vec<f64>, f64)> = None;
    for cell in fine.cells() {
        for x in interior_lattice(cell, density) {
            let gap = f.eval_nlsc(&x)? - g.eval_nlsc(&x)?;
            if gap > tol && worst.as_ref().is_none_or(|w| gap > w.1) {
                worst = Some((x, gap));
            }
        }
    }
    Ok(match worst {
        None => LeqVerdict::Holds,
        Some((x, gap)) => LeqVerdict::CounterexampleAt(x, gap),
    })
}

/// Samples the NLSC values at every grid node.
pub fn to_gridfn<F: Piecewise + ?Sized>(f: &F, grid: &Grid) -> Result<GridFn> {
    if !f.complex().domain().contains_box(grid.bbox()) {
        return Err(Error::OutOfDomain(grid.bbox().lo().to_vec()));
    }
    let values = grid.nodes().map(|x| f.eval_nlsc(&x).and_then(XReal::new)).collect::<Result<Vec<_>>>()?;
    GridFn::new(grid.clone(), values)
}
