//! Dedekind sup/inf, order convergence, interval chains and distributivity.
//!
//! Every operation is generic over [`OrderRepr`], implemented for exact
//! piecewise functions ([`PwExpr`]) and for sampled grid functions
//! ([`GridFn`]). Infinite families are represented by finite prefixes;
//! verdicts about limits use [`limit_gap`], which extrapolates the tail of a
//! decreasing gap sequence.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geom::{interior_lattice, AxisBox};
use crate::grid::{is_nearly_finite, nlsc_regularize, usc_then_nlsc, GridFn};
use crate::pw::{refine_all, Piecewise, PwExpr};
use crate::xreal::XReal;

/// A representation of nearly finite NLSC functions that supports the
/// lattice operations and evaluation on a common sample set.
pub trait OrderRepr: Clone + fmt::Debug {
    type Sample: Clone;

    /// Least upper bound of a finite family.
    fn sup(family: &[Self]) -> Result<Self>;

    /// Greatest lower bound of a finite family.
    fn inf(family: &[Self]) -> Result<Self>;

    /// The lattice element represented by `self` (its NLSC regularization).
    fn project(&self) -> Result<Self>;

    /// Common sample set of a family, optionally restricted to a box.
    fn samples(family: &[&Self], density: usize, within: Option<&AxisBox>) -> Result<Vec<Self::Sample>>;

    fn at(&self, s: &Self::Sample) -> Result<f64>;

    fn point(&self, s: &Self::Sample) -> Vec<f64>;

    /// Regularizes a field of decreasing-limit values given at `samples`.
    fn regularize_limit(template: &Self, samples: &[Self::Sample], field: Vec<f64>) -> Result<Vec<f64>>;
}

impl OrderRepr for PwExpr {
    type Sample = Vec<f64>;

    fn sup(family: &[Self]) -> Result<Self> {
        PwExpr::max_of(family)
    }

    fn inf(family: &[Self]) -> Result<Self> {
        // On piecewise continuous data the continuum I∘S∘I of the pointwise
        // minimum is again the incident-cell minimum of the min-tree.
        PwExpr::min_of(family)
    }

    fn project(&self) -> Result<Self> {
        Ok(self.clone())
    }

    fn samples(family: &[&Self], density: usize, within: Option<&AxisBox>) -> Result<Vec<Vec<f64>>> {
        let fine = refine_all(family.iter().map(|f| f.complex()))?;
        let mut out = Vec::new();
        for cell in fine.cells() {
            match within {
                None => out.extend(interior_lattice(cell, density)),
                Some(v) => {
                    if let Some(c) = cell.intersect(v) {
                        out.extend(interior_lattice(&c, density));
                    }
                }
            }
        }
        Ok(out)
    }

    fn at(&self, s: &Vec<f64>) -> Result<f64> {
        self.eval_nlsc(s)
    }

    fn point(&self, s: &Vec<f64>) -> Vec<f64> {
        s.clone()
    }

    fn regularize_limit(_: &Self, _: &[Vec<f64>], field: Vec<f64>) -> Result<Vec<f64>> {
        Ok(field)
    }
}

fn same_grid(family: &[GridFn]) -> Result<&GridFn> {
    let first = family.first().ok_or(Error::EmptyFamily)?;
    if family.iter().any(|f| f.grid() != first.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(first)
}

fn nodewise(family: &[GridFn], pick: fn(XReal, XReal) -> XReal) -> Result<GridFn> {
    let first = same_grid(family)?;
    let mut acc = first.clone();
    for f in &family[1..] {
        acc = acc.zip_with(f, pick)?;
    }
    Ok(acc)
}

impl OrderRepr for GridFn {
    type Sample = usize;

    /// Nodewise maximum followed by the discrete `I∘S`.
    fn sup(family: &[Self]) -> Result<Self> {
        let r = nlsc_regularize(&nodewise(family, XReal::max)?, 1, 2)?;
        if !is_nearly_finite(&r) {
            return Err(Error::NotNearlyFinite);
        }
        Ok(r)
    }

    /// Nodewise minimum followed by the discrete `I∘S∘I`.
    fn inf(family: &[Self]) -> Result<Self> {
        let r = usc_then_nlsc(&nodewise(family, XReal::min)?, 1)?;
        if !is_nearly_finite(&r) {
            return Err(Error::NotNearlyFinite);
        }
        Ok(r)
    }

    fn project(&self) -> Result<Self> {
        nlsc_regularize(self, 1, 2)
    }

    fn samples(family: &[&Self], _density: usize, within: Option<&AxisBox>) -> Result<Vec<usize>> {
        let first = family.first().ok_or(Error::EmptyFamily)?;
        if family.iter().any(|f| f.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        let g = first.grid();
        Ok((0..g.len()).filter(|&i| within.is_none_or(|v| v.contains(&g.node(i)))).collect())
    }

    fn at(&self, s: &usize) -> Result<f64> {
        Ok(self.values()[*s].get())
    }

    fn point(&self, s: &usize) -> Vec<f64> {
        self.grid().node(*s)
    }

    fn regularize_limit(template: &Self, samples: &[usize], field: Vec<f64>) -> Result<Vec<f64>> {
        let mut full = vec![XReal::ZERO; template.grid().len()];
        for (s, v) in samples.iter().zip(&field) {
            full[*s] = XReal::new(*v)?;
        }
        let r = usc_then_nlsc(&GridFn::new(template.grid().clone(), full)?, 1)?;
        Ok(samples.iter().map(|s| r.values()[*s].get()).collect())
    }
}

/// Least upper bound of a finite family (`(I∘S)` of the pointwise sup).
pub fn dedekind_sup<F: OrderRepr>(family: &[F]) -> Result<F> {
    F::sup(family)
}

/// Greatest lower bound of a finite family (`(I∘S∘I)` of the pointwise inf).
pub fn dedekind_inf<F: OrderRepr>(family: &[F]) -> Result<F> {
    F::inf(family)
}

/// Tolerances shared by the order checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderCfg {
    /// Largest limit gap still counted as zero.
    pub gap_tol: f64,
    /// Samples per axis per cell (exact mode).
    pub density: usize,
    /// Extra allowance on limit gaps for discretization error (grid mode).
    pub slack: f64,
}

impl Default for OrderCfg {
    fn default() -> Self {
        OrderCfg { gap_tol: 1e-7, density: 4, slack: 0.0 }
    }
}

/// How the tail of a sequence was extrapolated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailModel {
    /// Geometric decay across three equally spaced terms.
    Geometric,
    /// Power-law decay across three terms at doubling indices.
    PowerLaw,
}

fn model_indices(model: TailModel, n: usize) -> [usize; 3] {
    // 1-based indices of the three terms, returned 0-based
    let [a, b, c] = match model {
        TailModel::Geometric => {
            let s = (n / 4).max(1);
            [n - 2 * s, n - s, n]
        }
        TailModel::PowerLaw => [n.div_ceil(4), n.div_ceil(2), n],
    };
    [a - 1, b - 1, c - 1]
}

/// Aitken's Δ² limit of three terms; `None` when they do not contract.
fn aitken(a: f64, b: f64, c: f64) -> Option<f64> {
    let (d1, d2) = (a - b, b - c);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d2.abs() >= d1.abs() {
        return None;
    }
    let rho = d2 / d1;
    Some(c - d2 * rho / (1.0 - rho))
}

/// Limit of a monotone sequence under the given tail model.
pub fn extrapolate(seq: &[f64], model: TailModel) -> f64 {
    let n = seq.len();
    let Some(&last) = seq.last() else { return f64::NAN };
    if n < 3 || !seq.iter().all(|v| v.is_finite()) {
        return last;
    }
    let [a, b, c] = model_indices(model, n);
    aitken(seq[a], seq[b], seq[c]).unwrap_or(last)
}

/// Extrapolated limit of a nonincreasing sequence of nonnegative gaps,
/// together with the tail model that produced it.
///
/// Both models are tried and the smaller limit kept; a sequence that has
/// stopped shrinking at its last terms is reported at its last value.
pub fn limit_gap(gaps: &[f64]) -> (f64, Option<TailModel>) {
    let Some(&last) = gaps.last() else { return (0.0, None) };
    if last <= 0.0 {
        return (0.0, None);
    }
    let mut best = (last, None);
    for m in [TailModel::Geometric, TailModel::PowerLaw] {
        let l = extrapolate(gaps, m).max(0.0);
        if l < best.0 {
            best = (l, Some(m));
        }
    }
    best
}

fn gap(lo: f64, hi: f64) -> f64 {
    if lo == hi {
        0.0
    } else {
        hi - lo
    }
}

/// Evidence for order convergence of a finite prefix.
#[derive(Clone, Debug)]
pub struct ConvergenceWitness<F> {
    /// Ascending lower brackets `λ_n`.
    pub lambdas: Vec<F>,
    /// Descending upper brackets `μ_n`.
    pub mus: Vec<F>,
    pub target: F,
    /// Largest sampled terminal gap `μ_N - λ_N`.
    pub residual: f64,
    /// Largest extrapolated limit gap.
    pub limit_gap: f64,
    /// Sample attaining `limit_gap`.
    pub worst_point: Vec<f64>,
    pub samples: usize,
    pub truncation: usize,
}

/// Why a convergence check failed.
#[derive(Clone, Debug, PartialEq)]
pub enum NotConverged {
    LowerNotAscending { index: usize, point: Vec<f64>, excess: f64 },
    UpperNotDescending { index: usize, point: Vec<f64>, excess: f64 },
    NotSandwiched { index: usize, point: Vec<f64>, excess: f64 },
    TargetOutside { index: usize, point: Vec<f64>, excess: f64 },
    GapTooLarge { point: Vec<f64>, limit_gap: f64, residual: f64 },
}

#[derive(Clone, Debug)]
pub enum Convergence<F> {
    Converged(ConvergenceWitness<F>),
    NotConverged(NotConverged),
}

impl<F> Convergence<F> {
    pub fn is_converged(&self) -> bool {
        matches!(self, Convergence::Converged(_))
    }
}

/// Checks that `seq` order-converges to `candidate` at sample scale.
///
/// The brackets are `λ_n = inf({u_k : k ≥ n} ∪ {candidate})` and
/// `μ_n = sup({u_k : k ≥ n} ∪ {candidate})`, formed only for the first
/// `⌈N/2⌉` indices so that every tail keeps at least half of the prefix;
/// shorter tails would collapse onto the last few terms. Including the
/// candidate serves the same purpose. The verdict is positive when
/// monotonicity and sandwich hold and the extrapolated limit of
/// `μ_n - λ_n` vanishes at every sample.
pub fn order_converges<F: OrderRepr>(seq: &[F], candidate: &F, cfg: &OrderCfg) -> Result<Convergence<F>> {
    if seq.len() < 3 {
        return Err(Error::SequenceTooShort { needed: 3, got: seq.len() });
    }
    let m = seq.len().div_ceil(2);
    let mut lambdas = Vec::with_capacity(m);
    let mut mus = Vec::with_capacity(m);
    for n in 0..m {
        let mut tail = seq[n..].to_vec();
        tail.push(candidate.clone());
        lambdas.push(F::inf(&tail)?);
        mus.push(F::sup(&tail)?);
    }
    check_brackets(&seq[..m], candidate, lambdas, mus, seq.len(), cfg)
}

/// As [`order_converges`], with caller-supplied brackets, one per term.
pub fn order_converges_with_brackets<F: OrderRepr>(
    seq: &[F],
    candidate: &F,
    lambdas: Vec<F>,
    mus: Vec<F>,
    cfg: &OrderCfg,
) -> Result<Convergence<F>> {
    if seq.len() < 3 {
        return Err(Error::SequenceTooShort { needed: 3, got: seq.len() });
    }
    check_brackets(seq, candidate, lambdas, mus, seq.len(), cfg)
}

fn check_brackets<F: OrderRepr>(
    seq: &[F],
    candidate: &F,
    lambdas: Vec<F>,
    mus: Vec<F>,
    truncation: usize,
    cfg: &OrderCfg,
) -> Result<Convergence<F>> {
    let n = seq.len();
    if lambdas.len() != n || mus.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambdas.len().min(mus.len()) });
    }
    let members = seq.iter().map(F::project).collect::<Result<Vec<_>>>()?;
    let target = candidate.project()?;
    let mut family: Vec<&F> = members.iter().chain(&lambdas).chain(&mus).collect();
    family.push(&target);
    let samples = F::samples(&family, cfg.density, None)?;
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty sample set".into()));
    }
    let tol = cfg.gap_tol;
    let mut limits = Vec::with_capacity(samples.len());
    let mut residual: f64 = 0.0;
    let mut gaps = vec![0.0; n];
    for s in &samples {
        let at = |f: &F| f.at(s);
        let fail = |f: fn(usize, Vec<f64>, f64) -> NotConverged, i: usize, e: f64| {
            Ok(Convergence::NotConverged(f(i, target.point(s), e)))
        };
        let c = at(&target)?;
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..n {
            let (lo, hi, x) = (at(&lambdas[i])?, at(&mus[i])?, at(&members[i])?);
            if let Some((plo, phi)) = prev {
                if plo > lo + tol {
                    return fail(
                        |index, point, excess| NotConverged::LowerNotAscending { index, point, excess },
                        i,
                        plo - lo,
                    );
                }
                if hi > phi + tol {
                    return fail(
                        |index, point, excess| NotConverged::UpperNotDescending { index, point, excess },
                        i,
                        hi - phi,
                    );
                }
            }
            if lo > x + tol || x > hi + tol {
                return fail(
                    |index, point, excess| NotConverged::NotSandwiched { index, point, excess },
                    i,
                    (lo - x).max(x - hi),
                );
            }
            if lo > c + tol || c > hi + tol {
                return fail(
                    |index, point, excess| NotConverged::TargetOutside { index, point, excess },
                    i,
                    (lo - c).max(c - hi),
                );
            }
            gaps[i] = gap(lo, hi);
            prev = Some((lo, hi));
        }
        residual = residual.max(gaps[n - 1]);
        limits.push(limit_gap(&gaps).0);
    }
    let limits = F::regularize_limit(&target, &samples, limits)?;
    let (worst, limit) =
        limits.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let worst_point = target.point(&samples[worst]);
    if !(limit <= tol + cfg.slack) {
        return Ok(Convergence::NotConverged(NotConverged::GapTooLarge {
            point: worst_point,
            limit_gap: limit,
            residual,
        }));
    }
    Ok(Convergence::Converged(ConvergenceWitness {
        lambdas,
        mus,
        target,
        residual,
        limit_gap: limit,
        worst_point,
        samples: samples.len(),
        truncation,
    }))
}

/// One member `[lo, hi]` of an interval chain.
#[derive(Clone, Debug)]
pub struct OrderInterval<F> {
    pub lo: F,
    pub hi: F,
}

impl<F> OrderInterval<F> {
    pub fn new(lo: F, hi: F) -> Self {
        OrderInterval { lo, hi }
    }
}

/// Classification of one chain on one test box.
#[derive(Clone, Debug, PartialEq)]
pub enum ChainVerdict {
    /// The chain pinches to a single function on the box; `values` holds
    /// its estimate at `points`.
    Pinched { points: Vec<Vec<f64>>, values: Vec<f64>, raw_gap: f64, limit_gap: f64 },
    /// The chain leaves a gap; the worst sample and its limit gap.
    Gap { point: Vec<f64>, gap: f64, raw_gap: f64 },
}

/// Decides, for every chain and every test box `V`, whether the chain's
/// intervals shrink to a single function on `V`.
///
/// `a = sup` of the lower ends and `b = inf` of the upper ends give the
/// terminal gap; the per-sample gap sequence is extrapolated with
/// [`limit_gap`] to judge the limit.
pub fn chain_check<F: OrderRepr>(
    chains: &[Vec<OrderInterval<F>>],
    opens: &[AxisBox],
    cfg: &OrderCfg,
) -> Result<Vec<Vec<ChainVerdict>>> {
    let mut out = Vec::with_capacity(chains.len());
    for (ci, chain) in chains.iter().enumerate() {
        if chain.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let los: Vec<F> = chain.iter().map(|i| i.lo.clone()).collect();
        let his: Vec<F> = chain.iter().map(|i| i.hi.clone()).collect();
        let a = F::sup(&los)?;
        let b = F::inf(&his)?;
        let mut row = Vec::with_capacity(opens.len());
        for v in opens {
            if !v.has_interior() {
                return Err(Error::InvalidBox("test box has empty interior".into()));
            }
            let family: Vec<&F> = los.iter().chain(&his).chain([&a, &b]).collect();
            let samples = F::samples(&family, cfg.density, Some(v))?;
            if samples.is_empty() {
                return Err(Error::InvalidArgument("no samples inside test box".into()));
            }
            row.push(classify(ci, chain, &a, &b, &samples, cfg)?);
        }
        out.push(row);
    }
    Ok(out)
}

fn classify<F: OrderRepr>(
    ci: usize,
    chain: &[OrderInterval<F>],
    a: &F,
    b: &F,
    samples: &[F::Sample],
    cfg: &OrderCfg,
) -> Result<ChainVerdict> {
    let tol = cfg.gap_tol;
    let n = chain.len();
    let (mut raw, mut worst_l, mut worst_at) = (0.0f64, f64::NEG_INFINITY, 0);
    let mut limits = Vec::with_capacity(samples.len());
    let mut values = Vec::with_capacity(samples.len());
    let (mut los, mut his, mut gaps) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for s in samples {
        for (i, iv) in chain.iter().enumerate() {
            los[i] = iv.lo.at(s)?;
            his[i] = iv.hi.at(s)?;
            let nested = i == 0 || (los[i] + tol >= los[i - 1] && his[i] <= his[i - 1] + tol);
            if !nested || los[i] > his[i] + tol {
                return Err(Error::NotNested { chain: ci, index: i });
            }
            gaps[i] = gap(los[i], his[i]).max(0.0);
        }
        let (ea, eb) = (a.at(s)?, b.at(s)?);
        raw = raw.max(gap(ea, eb));
        let (l, model) = limit_gap(&gaps);
        let mid = match model {
            Some(m) => 0.5 * (extrapolate(&los, m) + extrapolate(&his, m)),
            None => 0.5 * (ea + eb),
        };
        values.push(if ea <= eb { mid.clamp(ea, eb) } else { mid });
        limits.push(l);
    }
    let limits = F::regularize_limit(a, samples, limits)?;
    for (i, l) in limits.iter().enumerate() {
        if *l > worst_l {
            worst_l = *l;
            worst_at = i;
        }
    }
    if raw <= tol || worst_l <= tol + cfg.slack {
        Ok(ChainVerdict::Pinched {
            points: samples.iter().map(|s| a.point(s)).collect(),
            values,
            raw_gap: raw,
            limit_gap: worst_l.max(0.0).min(raw),
        })
    } else {
        Ok(ChainVerdict::Gap { point: a.point(&samples[worst_at]), gap: worst_l, raw_gap: raw })
    }
}

/// Outcome of [`distributivity_check`].
#[derive(Clone, Debug, PartialEq)]
pub enum Distributivity {
    Holds { max_gap: f64 },
    Violation { point: Vec<f64>, lhs: f64, rhs: f64 },
}

/// Compares `sup(A) ∧ v` with `sup{u ∧ v : u ∈ A}` on samples.
pub fn distributivity_check<F: OrderRepr>(a: &[F], v: &F, cfg: &OrderCfg) -> Result<Distributivity> {
    if a.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let lhs = F::inf(&[F::sup(a)?, v.clone()])?;
    let meets = a.iter().map(|u| F::inf(&[u.clone(), v.clone()])).collect::<Result<Vec<_>>>()?;
    let rhs = F::sup(&meets)?;
    let samples = F::samples(&[&lhs, &rhs], cfg.density, None)?;
    let mut worst = (0.0f64, None);
    for s in &samples {
        let (l, r) = (lhs.at(s)?, rhs.at(s)?);
        let d = gap(l, r).abs();
        if d > worst.0 {
            worst = (d, Some((s, l, r)));
        }
    }
    match worst {
        (d, Some((s, l, r))) if d > cfg.gap_tol => {
            Ok(Distributivity::Violation { point: lhs.point(s), lhs: l, rhs: r })
        }
        (d, _) => Ok(Distributivity::Holds { max_gap: d }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::MultiIndex;
    use crate::grid::Grid;
    use crate::poly::Poly;
    use crate::pw::{leq_samples, CellComplex, LeqVerdict, PwPoly};
    use alloc::collections::BTreeMap;
    use proptest::prelude::*;

    fn bx(lo: f64, hi: f64) -> AxisBox {
        AxisBox::new(vec![lo], vec![hi]).unwrap()
    }

    fn lin(c0: f64, c1: f64) -> Poly {
        let mut m = BTreeMap::new();
        m.insert(MultiIndex::new(vec![0]), c0);
        m.insert(MultiIndex::new(vec![1]), c1);
        Poly::new(vec![0.0], m, 1).unwrap()
    }

    fn konst(c: f64, lo: f64, hi: f64) -> PwExpr {
        PwExpr::constant(bx(lo, hi), c)
    }

    /// `max(0, 1 - n|x|)` on [-1, 1] as a piecewise linear function.
    fn tent(n: f64) -> PwExpr {
        let w = 1.0 / n;
        let mut cuts = vec![-1.0, -w, 0.0, w, 1.0];
        cuts.dedup();
        let cells: Vec<AxisBox> = cuts.windows(2).map(|c| bx(c[0], c[1])).collect();
        let pieces = cells
            .iter()
            .map(|c| {
                let m = c.center()[0];
                if m.abs() >= w {
                    lin(0.0, 0.0)
                } else if m < 0.0 {
                    lin(1.0, n)
                } else {
                    lin(1.0, -n)
                }
            })
            .collect();
        PwPoly::new(CellComplex::new(bx(-1.0, 1.0), cells).unwrap(), pieces).unwrap().to_expr()
    }

    fn power(k: i32) -> PwExpr {
        let mut m = BTreeMap::new();
        m.insert(MultiIndex::new(vec![k as u32]), 1.0);
        PwPoly::single(bx(0.0, 1.0), Poly::new(vec![0.0], m, k as u32).unwrap()).unwrap().to_expr()
    }

    #[test]
    fn sup_of_tents_is_the_widest() {
        let fam: Vec<_> = [1.0, 2.0, 4.0].iter().map(|n| tent(*n)).collect();
        let s = dedekind_sup(&fam).unwrap();
        for k in 0..=200 {
            let x = -1.0 + k as f64 / 100.0;
            assert_eq!(s.eval_nlsc(&[x]).unwrap(), tent(1.0).eval_nlsc(&[x]).unwrap());
        }
    }

    #[test]
    fn singleton_families() {
        let c = konst(2.5, 0.0, 1.0);
        assert_eq!(dedekind_sup(core::slice::from_ref(&c)).unwrap().eval_nlsc(&[0.3]).unwrap(), 2.5);
        assert_eq!(dedekind_inf(&[c]).unwrap().eval_nlsc(&[0.3]).unwrap(), 2.5);
        assert!(matches!(dedekind_sup::<PwExpr>(&[]), Err(Error::EmptyFamily)));
    }

    #[test]
    fn grid_sup_of_infinite_cap_is_not_nearly_finite() {
        let g = Grid::uniform(bx(0.0, 1.0), 9).unwrap();
        let mut fam: Vec<GridFn> = (1..=5).map(|c| GridFn::constant(g.clone(), XReal::from_finite(c as f64))).collect();
        assert!(dedekind_sup(&fam).is_ok());
        fam.push(GridFn::constant(g, XReal::INFINITY));
        assert_eq!(dedekind_sup(&fam), Err(Error::NotNearlyFinite));
    }

    #[test]
    fn inf_of_x_and_x_squared() {
        let x = PwPoly::single(bx(0.0, 1.0), lin(0.0, 1.0)).unwrap().to_expr();
        let i = dedekind_inf(&[x, power(2)]).unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            assert_eq!(i.eval_nlsc(&[t]).unwrap(), t * t);
        }
    }

    fn tent_grid(g: &Grid, n: f64) -> GridFn {
        GridFn::from_fn(g.clone(), |x| (1.0 - n * x[0].abs()).max(0.0)).unwrap()
    }

    #[test]
    fn inf_of_shrinking_tents_on_a_coarse_grid_is_zero() {
        // at spacing 1/4 the n = 8 tent is a one-node spike
        let g = Grid::uniform(bx(-1.0, 1.0), 9).unwrap();
        let fam: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().map(|n| tent_grid(&g, *n)).collect();
        let i = dedekind_inf(&fam).unwrap();
        assert!(i.values().iter().all(|v| v.get() == 0.0));
    }

    #[test]
    fn inf_of_shrinking_tents_on_a_fine_grid_keeps_the_narrowest() {
        let g = Grid::uniform(bx(-1.0, 1.0), 257).unwrap();
        let fam: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().map(|n| tent_grid(&g, *n)).collect();
        let i = dedekind_inf(&fam).unwrap();
        let narrow = tent_grid(&g, 8.0);
        assert!(i.le(&narrow));
        // the regularization moves each node by at most three spacings of slope 8
        let h = g.spacing(0);
        for (a, b) in i.values().iter().zip(narrow.values()) {
            assert!(b.get() - a.get() <= 8.0 * 3.0 * h + 1e-12);
        }
    }

    #[test]
    fn powers_converge_to_zero_exactly() {
        let seq: Vec<_> = (1..=32).map(power).collect();
        let zero = konst(0.0, 0.0, 1.0);
        let v = order_converges(&seq, &zero, &OrderCfg::default()).unwrap();
        let Convergence::Converged(w) = v else { panic!("{v:?}") };
        assert!(w.limit_gap <= 1e-7);
        assert_eq!(w.truncation, 32);
    }

    #[test]
    fn constant_sequence_converges_with_equal_brackets() {
        let seq: Vec<_> = (0..5).map(|_| konst(1.5, 0.0, 1.0)).collect();
        let Convergence::Converged(w) = order_converges(&seq, &seq[0], &OrderCfg::default()).unwrap() else { panic!() };
        assert_eq!(w.residual, 0.0);
        for (l, m) in w.lambdas.iter().zip(&w.mus) {
            assert_eq!(l.eval_nlsc(&[0.5]).unwrap(), 1.5);
            assert_eq!(m.eval_nlsc(&[0.5]).unwrap(), 1.5);
        }
    }

    #[test]
    fn alternating_signs_do_not_converge() {
        let seq: Vec<_> = (1..=16).map(|n| konst(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0, 1.0)).collect();
        for c in [-1.0, 0.0, 0.5, 1.0] {
            let v = order_converges(&seq, &konst(c, 0.0, 1.0), &OrderCfg::default()).unwrap();
            match v {
                Convergence::NotConverged(NotConverged::GapTooLarge { limit_gap, .. }) => assert_eq!(limit_gap, 2.0),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn wrong_candidate_is_rejected() {
        let seq: Vec<_> = (1..=16).map(power).collect();
        assert!(!order_converges(&seq, &konst(0.3, 0.0, 1.0), &OrderCfg::default()).unwrap().is_converged());
    }

    #[test]
    fn short_sequences_are_rejected() {
        let seq = vec![konst(0.0, 0.0, 1.0); 2];
        assert!(matches!(order_converges(&seq, &seq[0], &OrderCfg::default()), Err(Error::SequenceTooShort { .. })));
    }

    fn const_chain(n: usize, lo: impl Fn(f64) -> f64, hi: impl Fn(f64) -> f64) -> Vec<OrderInterval<PwExpr>> {
        (1..=n).map(|k| OrderInterval::new(konst(lo(k as f64), 0.0, 1.0), konst(hi(k as f64), 0.0, 1.0))).collect()
    }

    #[test]
    fn chain_examples() {
        let cfg = OrderCfg::default();
        let v = [bx(0.0, 1.0), bx(0.25, 0.5)];
        let chains = vec![
            const_chain(64, |n| -1.0 / n, |n| 1.0 / n),
            const_chain(64, |_| 0.0, |n| 1.0 + 1.0 / n),
            const_chain(10, |_| 0.7, |_| 0.7),
        ];
        let r = chain_check(&chains, &v, &cfg).unwrap();
        for verdict in &r[0] {
            let ChainVerdict::Pinched { values, raw_gap, .. } = verdict else { panic!("{verdict:?}") };
            assert!(*raw_gap <= 2.0 / 64.0 + cfg.gap_tol);
            assert!(values.iter().all(|x| x.abs() <= 1e-12));
        }
        for verdict in &r[1] {
            let ChainVerdict::Gap { gap, .. } = verdict else { panic!("{verdict:?}") };
            assert!((gap - 1.0).abs() <= 1e-9, "{gap}");
        }
        for verdict in &r[2] {
            let ChainVerdict::Pinched { values, .. } = verdict else { panic!("{verdict:?}") };
            assert!(values.iter().all(|x| *x == 0.7));
        }
    }

    #[test]
    fn chains_must_be_nested() {
        let chain = vec![const_chain(3, |n| -1.0 / n, |n| 1.0 / n), const_chain(3, |n| -n, |n| n)];
        let r = chain_check(&chain, &[bx(0.0, 1.0)], &OrderCfg::default());
        assert_eq!(r, Err(Error::NotNested { chain: 1, index: 1 }));
    }

    fn step(a: f64, b: f64) -> PwExpr {
        let cx = CellComplex::new(bx(0.0, 1.0), vec![bx(0.0, 0.5), bx(0.5, 1.0)]).unwrap();
        PwPoly::new(cx, vec![lin(a, 0.0), lin(b, 0.0)]).unwrap().to_expr()
    }

    #[test]
    fn distributivity_examples() {
        let cfg = OrderCfg::default();
        let a = [konst(0.0, 0.0, 1.0), konst(1.0, 0.0, 1.0)];
        assert_eq!(
            distributivity_check(&a, &konst(0.5, 0.0, 1.0), &cfg).unwrap(),
            Distributivity::Holds { max_gap: 0.0 }
        );
        let steps = [step(0.0, 1.0), step(1.0, 0.0)];
        assert_eq!(
            distributivity_check(&steps, &konst(1.0, 0.0, 1.0), &cfg).unwrap(),
            Distributivity::Holds { max_gap: 0.0 }
        );
        assert_eq!(distributivity_check::<PwExpr>(&[], &a[0], &cfg), Err(Error::EmptyFamily));
    }

    #[test]
    fn extrapolation_models() {
        let harmonic: Vec<f64> = (1..=64).map(|n| 2.0 / n as f64).collect();
        assert_eq!(limit_gap(&harmonic), (0.0, Some(TailModel::PowerLaw)));
        let geometric: Vec<f64> = (1..=10).map(|n| 0.5f64.powi(n)).collect();
        assert!(limit_gap(&geometric).0 < 1e-15);
        let stalled = [3.0, 2.0, 1.0, 1.0, 1.0];
        assert_eq!(limit_gap(&stalled), (1.0, None));
        let offset: Vec<f64> = (1..=64).map(|n| 1.0 + 1.0 / n as f64).collect();
        assert!((limit_gap(&offset).0 - 1.0).abs() < 1e-12);
    }

    fn arb_pw() -> impl Strategy<Value = PwExpr> {
        (prop::collection::vec(0.05f64..1.0, 1..4), prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 4)).prop_map(
            |(widths, coeffs)| {
                let total: f64 = widths.iter().sum();
                let mut cuts = vec![0.0];
                for w in &widths {
                    cuts.push(cuts.last().unwrap() + w / total);
                }
                *cuts.last_mut().unwrap() = 1.0;
                let cells: Vec<AxisBox> = cuts.windows(2).map(|c| bx(c[0], c[1])).collect();
                let pieces = (0..cells.len()).map(|i| lin(coeffs[i].0, coeffs[i].1)).collect();
                PwPoly::new(CellComplex::new(bx(0.0, 1.0), cells).unwrap(), pieces).unwrap().to_expr()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sup_and_inf_bracket_members(fam in prop::collection::vec(arb_pw(), 1..5)) {
            let s = dedekind_sup(&fam).unwrap();
            let i = dedekind_inf(&fam).unwrap();
            for u in &fam {
                prop_assert_eq!(leq_samples(u, &s, 4, 1e-12).unwrap(), LeqVerdict::Holds);
                prop_assert_eq!(leq_samples(&i, u, 4, 1e-12).unwrap(), LeqVerdict::Holds);
            }
        }

        #[test]
        fn shift_stability(k in 0usize..=16) {
            let seq: Vec<_> = (1..=32).map(power).collect();
            let zero = konst(0.0, 0.0, 1.0);
            prop_assert!(order_converges(&seq[k..], &zero, &OrderCfg::default()).unwrap().is_converged());
        }

        #[test]
        fn raw_chain_gap_never_grows(steps in prop::collection::vec((0.0f64..0.3, 0.0f64..0.3), 2..12)) {
            let (mut lo, mut hi) = (-1.0, 1.0);
            let mut chain = Vec::new();
            let mut last_gap = f64::INFINITY;
            for (a, b) in steps {
                lo += a * (hi - lo) / 2.0;
                hi -= b * (hi - lo) / 2.0;
                chain.push(OrderInterval::new(konst(lo, 0.0, 1.0), konst(hi, 0.0, 1.0)));
                let r = chain_check(&[chain.clone()], &[bx(0.0, 1.0)], &OrderCfg::default()).unwrap();
                let raw = match &r[0][0] {
                    ChainVerdict::Pinched { raw_gap, .. } | ChainVerdict::Gap { raw_gap, .. } => *raw_gap,
                };
                prop_assert!(raw <= last_gap);
                last_gap = raw;
            }
        }
    }
}
