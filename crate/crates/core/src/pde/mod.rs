//! Nonlinear PDE operators `T(x, D)u = F(x, u, ..., D^α u, ...)`.
//!
//! Systems are written in a small text language (see [`parse`]) and
//! evaluated on jets: vectors holding the value of every derivative of every
//! unknown that the system mentions. [`apply_t`] lifts a system to
//! piecewise polynomials, cell by cell.

pub mod expr;
pub mod parse;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

pub use expr::{Deriv, Dual, Expr, Func, Scalar};
pub use parse::{parse_equations, parse_expr, Equation, Rhs};

use crate::error::{Error, Result};
use crate::geom::MultiIndex;
use crate::poly::Poly;
use crate::pw::{CellFn, Piecewise, PwExpr, PwPoly, Tree};

/// The jet layout: which derivatives of which unknowns a system reads.
///
/// Slots are sorted by unknown name, then by multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSpec {
    unknowns: Vec<String>,
    slots: Vec<(usize, MultiIndex)>,
}

impl JetSpec {
    /// Number of jet components `K`.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    /// `(unknown index, multi-index)` per slot.
    pub fn slots(&self) -> &[(usize, MultiIndex)] {
        &self.slots
    }

    pub fn slot(&self, unknown: &str, alpha: &MultiIndex) -> Option<usize> {
        let u = self.unknowns.iter().position(|n| n == unknown)?;
        self.slots.iter().position(|(k, a)| *k == u && a == alpha)
    }

    pub fn contains(&self, unknown: &str, alpha: &MultiIndex) -> bool {
        self.slot(unknown, alpha).is_some()
    }

    /// Highest derivative order read from unknown `u`.
    pub fn max_order(&self, u: usize) -> u32 {
        self.slots.iter().filter(|(k, _)| *k == u).map(|(_, a)| a.order()).max().unwrap_or(0)
    }

    /// Order `m` of the system.
    pub fn order(&self) -> u32 {
        self.slots.iter().map(|(_, a)| a.order()).max().unwrap_or(0)
    }

    /// `name:alpha` labels, e.g. `u1:0,0,0,1`.
    pub fn labels(&self) -> Vec<String> {
        self.slots.iter().map(|(k, a)| format!("{}:{a}", self.unknowns[*k])).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Code {
    Num(f64),
    Param(usize),
    Coord(usize),
    Jet(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Pow(usize, i32),
    Call(Func, usize),
}

/// A system of `m` equations `F_i(x, jet) = rhs_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PdeSystem {
    equations: Vec<Equation>,
    jets: JetSpec,
    n_space: usize,
    has_time: bool,
    param_names: Vec<String>,
    param_values: Vec<Option<f64>>,
    // flattened expression per equation; the root is the last node
    code: Vec<Vec<Code>>,
}

impl PdeSystem {
    /// Parses a system and infers its coordinates: spatial axes up to the
    /// largest one mentioned, plus time when `t` or a time derivative occurs.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_equations(parse_equations(text)?, None)
    }

    /// Builds a system; `dims = Some((n_space, has_time))` overrides inference.
    pub fn from_equations(equations: Vec<Equation>, dims: Option<(usize, bool)>) -> Result<Self> {
        if equations.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one equation".into()));
        }
        let (mut n_space, mut has_time) = (0usize, false);
        let mut params: Vec<String> = Vec::new();
        let mut refs: BTreeMap<String, Vec<Deriv>> = BTreeMap::new();
        for eq in &equations {
            eq.lhs.walk(&mut |e| match e {
                Expr::Coord(k) => n_space = n_space.max(k + 1),
                Expr::Time => has_time = true,
                Expr::Jet { unknown, deriv } => {
                    n_space = n_space.max(deriv.space_dim());
                    has_time |= deriv.time() > 0;
                    refs.entry(unknown.clone()).or_default().push(deriv.clone());
                }
                Expr::Param(p) if !params.contains(p) => params.push(p.clone()),
                _ => {}
            });
        }
        if let Some((ns, ht)) = dims {
            if ns < n_space || (has_time && !ht) {
                return Err(Error::InvalidArgument(format!(
                    "system needs {n_space} spatial axes{}",
                    if has_time { " and time" } else { "" }
                )));
            }
            (n_space, has_time) = (ns, ht);
        } else if n_space == 0 && !has_time {
            n_space = 1;
        }
        params.sort();
        let unknowns: Vec<String> = refs.keys().cloned().collect();
        let mut slots = Vec::new();
        for (u, ds) in refs.values().enumerate() {
            let mut alphas: Vec<MultiIndex> =
                ds.iter().map(|d| d.to_multi_index(n_space, has_time).expect("dimensions cover every jet")).collect();
            alphas.sort();
            alphas.dedup();
            slots.extend(alphas.into_iter().map(|a| (u, a)));
        }
        let jets = JetSpec { unknowns, slots };
        let param_values = alloc::vec![None; params.len()];
        let mut sys =
            PdeSystem { equations, jets, n_space, has_time, param_names: params, param_values, code: Vec::new() };
        sys.code = sys.equations.iter().map(|e| sys.compile(&e.lhs)).collect();
        Ok(sys)
    }

    /// Same equations over a different number of spatial axes / time.
    pub fn with_dims(&self, n_space: usize, has_time: bool) -> Result<Self> {
        let mut s = Self::from_equations(self.equations.clone(), Some((n_space, has_time)))?;
        s.param_values = self.param_values.clone();
        Ok(s)
    }

    /// Binds a parameter value. Unknown names are rejected.
    pub fn bind(mut self, name: &str, value: f64) -> Result<Self> {
        let i = self
            .param_names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::InvalidArgument(format!("no parameter named '{name}'")))?;
        self.param_values[i] = Some(value);
        Ok(self)
    }

    fn compile(&self, e: &Expr) -> Vec<Code> {
        let mut out = Vec::new();
        self.emit(e, &mut out);
        out
    }

    fn emit(&self, e: &Expr, out: &mut Vec<Code>) -> usize {
        let c = match e {
            Expr::Num(v) => Code::Num(*v),
            Expr::Param(p) => Code::Param(self.param_names.iter().position(|n| n == p).expect("collected")),
            Expr::Coord(k) => Code::Coord(*k),
            Expr::Time => Code::Coord(self.n_space),
            Expr::Jet { unknown, deriv } => {
                let a = deriv.to_multi_index(self.n_space, self.has_time).expect("dimensions cover every jet");
                Code::Jet(self.jets.slot(unknown, &a).expect("collected"))
            }
            Expr::Add(a, b) => Code::Add(self.emit(a, out), self.emit(b, out)),
            Expr::Sub(a, b) => Code::Sub(self.emit(a, out), self.emit(b, out)),
            Expr::Mul(a, b) => Code::Mul(self.emit(a, out), self.emit(b, out)),
            Expr::Div(a, b) => Code::Div(self.emit(a, out), self.emit(b, out)),
            Expr::Neg(a) => Code::Neg(self.emit(a, out)),
            Expr::Pow(a, k) => Code::Pow(self.emit(a, out), *k),
            Expr::Call(f, a) => Code::Call(*f, self.emit(a, out)),
        };
        out.push(c);
        out.len() - 1
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn jets(&self) -> &JetSpec {
        &self.jets
    }

    /// Number of equations `m`.
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn n_space(&self) -> usize {
        self.n_space
    }

    pub fn has_time(&self) -> bool {
        self.has_time
    }

    /// Dimension of the coordinate space (time last when present).
    pub fn dim(&self) -> usize {
        self.n_space + self.has_time as usize
    }

    pub fn params(&self) -> impl Iterator<Item = (&str, Option<f64>)> {
        self.param_names.iter().map(String::as_str).zip(self.param_values.iter().copied())
    }

    fn check_inputs<S>(&self, x: &[f64], jet: &[S]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        if jet.len() != self.jets.len() {
            return Err(Error::DimensionMismatch { expected: self.jets.len(), got: jet.len() });
        }
        if let Some(i) = self.param_values.iter().position(Option::is_none) {
            return Err(Error::UnboundParameter(self.param_names[i].clone()));
        }
        Ok(())
    }

    fn run<S: Scalar>(&self, eq: usize, x: &[f64], jet: &[S], stack: &mut Vec<S>) -> Result<S> {
        stack.clear();
        for c in &self.code[eq] {
            let v = match *c {
                Code::Num(v) => S::from_f64(v),
                Code::Param(i) => S::from_f64(self.param_values[i].unwrap_or(f64::NAN)),
                Code::Coord(k) => S::from_f64(x[k]),
                Code::Jet(s) => jet[s],
                Code::Add(a, b) => stack[a] + stack[b],
                Code::Sub(a, b) => stack[a] - stack[b],
                Code::Mul(a, b) => stack[a] * stack[b],
                Code::Div(a, b) => {
                    if stack[b].value() == 0.0 {
                        return Err(Error::EvalDomain(format!("division by zero in equation {}", eq + 1)));
                    }
                    stack[a] / stack[b]
                }
                Code::Neg(a) => -stack[a],
                Code::Pow(a, k) => {
                    if k < 0 && stack[a].value() == 0.0 {
                        return Err(Error::EvalDomain(format!("negative power of zero in equation {}", eq + 1)));
                    }
                    stack[a].powi(k)
                }
                Code::Call(f, a) => stack[a].apply(f),
            };
            stack.push(v);
        }
        let r = *stack.last().expect("nonempty expression");
        if !r.value().is_finite() {
            return Err(Error::EvalDomain(format!("non-finite value in equation {}", eq + 1)));
        }
        Ok(r)
    }

    /// `F(x, jet)` in any scalar type.
    pub fn eval_generic<S: Scalar>(&self, x: &[f64], jet: &[S]) -> Result<Vec<S>> {
        self.check_inputs(x, jet)?;
        let mut stack = Vec::new();
        (0..self.len()).map(|i| self.run(i, x, jet, &mut stack)).collect()
    }

    /// `F(x, jet)`.
    pub fn eval_f(&self, x: &[f64], jet: &[f64]) -> Result<Vec<f64>> {
        self.eval_generic(x, jet)
    }

    /// Single component `F_eq(x, jet)`.
    pub fn eval_equation(&self, eq: usize, x: &[f64], jet: &[f64]) -> Result<f64> {
        self.check_inputs(x, jet)?;
        self.run(eq, x, jet, &mut Vec::new())
    }

    /// `F(x, jet)` and its `m × K` Jacobian in the jet variables.
    pub fn jacobian(&self, x: &[f64], jet: &[f64]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        self.check_inputs(x, jet)?;
        let (m, k) = (self.len(), jet.len());
        let mut jac = alloc::vec![alloc::vec![0.0; k]; m];
        let mut value = alloc::vec![0.0; m];
        let mut duals: Vec<Dual> = jet.iter().map(|v| Dual::new(*v, 0.0)).collect();
        let mut stack = Vec::new();
        for col in 0..k {
            duals[col].d = 1.0;
            for (row, jrow) in jac.iter_mut().enumerate() {
                let r = self.run(row, x, &duals, &mut stack)?;
                jrow[col] = r.d;
                value[row] = r.v;
            }
            duals[col].d = 0.0;
        }
        if k == 0 {
            value = self.eval_f(x, jet)?;
        }
        Ok((value, jac))
    }
}

/// One equation per line, in the input syntax.
impl fmt::Display for PdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{eq}")?;
        }
        Ok(())
    }
}

/// Derivative polynomials of every jet slot on one cell.
#[derive(Debug)]
struct CellJet {
    slots: Vec<Poly>,
}

impl CellJet {
    fn values(&self, x: &[f64]) -> Vec<f64> {
        self.slots.iter().map(|p| p.eval(x)).collect()
    }
}

#[derive(Debug)]
struct OperatorCell {
    sys: Arc<PdeSystem>,
    jet: Arc<CellJet>,
    eq: usize,
}

impl CellFn for OperatorCell {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.sys.eval_equation(self.eq, x, &self.jet.values(x))
    }
}

/// Extends `T` to piecewise polynomials: one [`PwExpr`] per equation whose
/// cells evaluate `F` on the jets of the cell polynomials. NLSC evaluation
/// then resolves the skeleton by the incident-cell minimum.
///
/// `v` holds one function per unknown, in [`JetSpec::unknowns`] order, all
/// on the same complex.
pub fn apply_t(sys: &Arc<PdeSystem>, v: &[PwPoly]) -> Result<Vec<PwExpr>> {
    let names = sys.jets().unknowns();
    if v.len() != names.len() {
        return Err(Error::DimensionMismatch { expected: names.len(), got: v.len() });
    }
    let cx = v[0].complex();
    if v.iter().any(|f| f.complex() != cx) {
        return Err(Error::ComplexMismatch);
    }
    if cx.domain().dim() != sys.dim() {
        return Err(Error::DimensionMismatch { expected: sys.dim(), got: cx.domain().dim() });
    }
    for (u, f) in v.iter().enumerate() {
        let need = sys.jets().max_order(u);
        if let Some(p) = f.pieces().iter().find(|p| p.degree() < need) {
            return Err(Error::DegreeTooLow { needed: need as usize, got: p.degree() as usize });
        }
    }
    let mut trees: Vec<Vec<Tree>> = (0..sys.len()).map(|_| Vec::with_capacity(cx.len())).collect();
    for c in 0..cx.len() {
        let slots = sys.jets().slots().iter().map(|(u, a)| v[*u].pieces()[c].derivative(a)).collect();
        let jet = Arc::new(CellJet { slots });
        for (eq, t) in trees.iter_mut().enumerate() {
            t.push(Tree::Func(Arc::new(OperatorCell { sys: sys.clone(), jet: jet.clone(), eq })));
        }
    }
    trees.into_iter().map(|t| PwExpr::new(cx.clone(), t)).collect()
}

/// Form of the convective term in [`ns_system`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Convective {
    /// `Σ_j u_j ∂u_j/∂x_i`, as the momentum equation is printed in the
    /// source of the method.
    #[default]
    AsPrinted,
    /// The usual advection `Σ_j u_j ∂u_i/∂x_j`.
    Standard,
}

/// Source text of the incompressible Navier–Stokes system.
pub fn ns_text(convective: Convective) -> String {
    let mut s = String::from("# momentum\n");
    for i in 1..=3 {
        let adv: Vec<String> = (1..=3)
            .map(|j| match convective {
                Convective::AsPrinted => format!("u{j}*dx{i}(u{j})"),
                Convective::Standard => format!("u{j}*dx{j}(u{i})"),
            })
            .collect();
        s += &format!("dt(u{i}) + {} - nu*(dxx1(u{i}) + dxx2(u{i}) + dxx3(u{i})) + dx{i}(p) = f{i}\n", adv.join(" + "));
    }
    s += "# incompressibility\ndx1(u1) + dx2(u2) + dx3(u3) = 0\n";
    s
}

/// Navier–Stokes in three space dimensions plus time, unknowns
/// `(p, u1, u2, u3)`, equations `(momentum 1..3, divergence)`.
pub fn ns_system(nu: f64, convective: Convective) -> Result<PdeSystem> {
    if !(nu > 0.0) {
        return Err(Error::NonpositiveViscosity);
    }
    PdeSystem::from_equations(parse_equations(&ns_text(convective))?, Some((3, true)))?.bind("nu", nu)
}

impl fmt::Display for Convective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convective::AsPrinted => "printed",
            Convective::Standard => "standard",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::AxisBox;
    use crate::pw::CellComplex;
    use alloc::string::ToString;
    use alloc::vec;

    fn ns_jet(sys: &PdeSystem, set: &[(&str, [u32; 4], f64)]) -> Vec<f64> {
        let mut jet = vec![0.0; sys.jets().len()];
        for (u, a, v) in set {
            jet[sys.jets().slot(u, &MultiIndex::new(a.to_vec())).unwrap()] = *v;
        }
        jet
    }

    #[test]
    fn heat_jet_spec() {
        let sys = PdeSystem::parse("dt(u1) - nu*dxx1(u1) = f1").unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!((sys.n_space(), sys.has_time()), (1, true));
        assert_eq!(sys.jets().labels(), vec!["u1:0,1", "u1:2,0"]);
        assert_eq!(sys.params().collect::<Vec<_>>(), vec![("nu", None)]);
        assert_eq!(sys.eval_f(&[0.0, 0.0], &[1.0, 1.0]), Err(Error::UnboundParameter("nu".into())));
    }

    #[test]
    fn laplace_eval() {
        let sys = PdeSystem::parse("dxx1(u)+dxx2(u)").unwrap();
        assert_eq!(sys.jets().labels(), vec!["u:0,2", "u:2,0"]);
        assert_eq!(sys.eval_f(&[0.0, 0.0], &[4.0, 3.0]).unwrap(), vec![7.0]);
    }

    #[test]
    fn eval_domain_errors() {
        let sys = PdeSystem::parse("1/u").unwrap();
        assert!(matches!(sys.eval_f(&[0.0], &[0.0]), Err(Error::EvalDomain(_))));
        assert_eq!(sys.eval_f(&[0.0], &[4.0]).unwrap(), vec![0.25]);
    }

    #[test]
    fn zero_jet_evaluates_constant_terms() {
        let sys = PdeSystem::parse("u*dx(u) + 3 + x1\ncos(u) - 1 = g").unwrap();
        assert_eq!(sys.eval_f(&[2.0], &[0.0, 0.0]).unwrap(), vec![5.0, 0.0]);
    }

    #[test]
    fn ns_structure() {
        let sys = ns_system(0.01, Convective::AsPrinted).unwrap();
        assert_eq!(sys.len(), 4);
        assert_eq!(sys.jets().unknowns(), &["p", "u1", "u2", "u3"]);
        // p: three gradients; each u_i: value, dt, three dx, three dxx
        assert_eq!(sys.jets().len(), 27);
        for u in ["u1", "u2", "u3"] {
            for j in 0..3 {
                let mut a = [0u32; 4];
                a[j] = 2;
                assert!(sys.jets().contains(u, &MultiIndex::new(a.to_vec())));
            }
        }
        for j in 0..3 {
            assert!(sys.jets().contains("p", &MultiIndex::axis(4, j, 1)));
        }
        assert_eq!(ns_system(0.0, Convective::AsPrinted), Err(Error::NonpositiveViscosity));
        assert_eq!(ns_system(f64::NAN, Convective::Standard), Err(Error::NonpositiveViscosity));
    }

    #[test]
    fn ns_eval_examples() {
        let sys = ns_system(0.01, Convective::AsPrinted).unwrap();
        let x = [0.3, 0.2, 0.1, 0.05];
        let jet = ns_jet(
            &sys,
            &[
                ("u1", [0, 0, 0, 1], -0.05),
                ("u2", [0, 0, 0, 1], -0.05),
                ("u3", [0, 0, 0, 1], -0.05),
                ("u1", [1, 0, 0, 0], -0.05),
            ],
        );
        assert_eq!(sys.eval_f(&x, &jet).unwrap(), vec![-0.05; 4]);
        let jet = ns_jet(&sys, &[("u1", [0; 4], 1.0), ("u2", [0; 4], -1.0)]);
        assert_eq!(sys.eval_f(&x, &jet).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn pretty_print_round_trip() {
        for c in [Convective::AsPrinted, Convective::Standard] {
            let sys = ns_system(0.01, c).unwrap();
            assert_eq!(parse_equations(&sys.to_string()).unwrap(), sys.equations());
        }
    }

    #[test]
    fn jacobian_matches_linear_slots() {
        let sys = ns_system(0.5, Convective::Standard).unwrap();
        let jet: Vec<f64> = (0..27).map(|i| (i as f64 * 0.37).sin()).collect();
        let (v, j) = sys.jacobian(&[0.1, 0.2, 0.3, 0.4], &jet).unwrap();
        assert_eq!(v, sys.eval_f(&[0.1, 0.2, 0.3, 0.4], &jet).unwrap());
        let dt_u1 = sys.jets().slot("u1", &MultiIndex::axis(4, 3, 1)).unwrap();
        let dxx2_u3 = sys.jets().slot("u3", &MultiIndex::axis(4, 1, 2)).unwrap();
        assert_eq!(j[0][dt_u1], 1.0);
        assert_eq!(j[2][dxx2_u3], -0.5);
        assert_eq!(j[3][dt_u1], 0.0);
    }

    fn p1(center: f64, c: &[f64]) -> Poly {
        let coeffs = c.iter().enumerate().map(|(k, v)| (MultiIndex::new(vec![k as u32]), *v)).collect();
        Poly::new(vec![center], coeffs, 2).unwrap()
    }

    #[test]
    fn apply_t_examples() {
        let unit = AxisBox::new(vec![0.0], vec![1.0]).unwrap();
        let sq = PwPoly::single(unit, p1(0.0, &[0.0, 0.0, 1.0])).unwrap();
        let dxx = Arc::new(PdeSystem::parse("dxx(u)").unwrap());
        let t = apply_t(&dxx, &[sq]).unwrap();
        assert_eq!(t[0].eval_nlsc(&[0.3]).unwrap(), 2.0);

        let d = AxisBox::new(vec![0.0], vec![2.0]).unwrap();
        let cells = vec![AxisBox::new(vec![0.0], vec![1.0]).unwrap(), AxisBox::new(vec![1.0], vec![2.0]).unwrap()];
        let cx = CellComplex::new(d, cells).unwrap();
        let v = PwPoly::new(cx, vec![p1(0.0, &[0.0, 0.0, 1.0]), p1(1.0, &[0.0, 0.0, 1.0])]).unwrap();
        let dx = Arc::new(PdeSystem::parse("dx(u)").unwrap());
        let t = apply_t(&dx, core::slice::from_ref(&v)).unwrap();
        assert_eq!(t[0].eval_nlsc(&[0.5]).unwrap(), 1.0);
        assert_eq!(t[0].eval_nlsc(&[1.5]).unwrap(), 1.0);
        assert_eq!(t[0].eval_nlsc(&[1.0]).unwrap(), 0.0);
        assert_eq!(t[0].eval_usc(&[1.0]).unwrap(), 2.0);

        let cubic = Arc::new(PdeSystem::parse("dxx(u)*dx(u)").unwrap().with_dims(1, false).unwrap());
        let lin =
            PwPoly::single(AxisBox::new(vec![0.0], vec![1.0]).unwrap(), Poly::constant(vec![0.0], 1.0, 1)).unwrap();
        assert!(matches!(apply_t(&cubic, &[lin]), Err(Error::DegreeTooLow { needed: 2, got: 1 })));
    }

    #[test]
    fn apply_t_of_zero_ns_field_is_zero() {
        let sys = Arc::new(ns_system(0.01, Convective::AsPrinted).unwrap());
        let dom = AxisBox::unit(4);
        let zero = PwPoly::single(dom, Poly::zero(vec![0.5; 4], 2)).unwrap();
        let t = apply_t(&sys, &vec![zero; 4]).unwrap();
        for c in &t {
            assert_eq!(c.eval_nlsc(&[0.2, 0.4, 0.6, 0.1]).unwrap(), 0.0);
        }
    }
}
