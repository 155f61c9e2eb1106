//! Right-hand sides and initial data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::MultiIndex;
use crate::pde::{Equation, Expr, PdeSystem, Rhs};
use crate::poly::Poly;
use crate::pw::{Piecewise, PwPoly};

/// The right-hand side `g = (g_1, ..., g_m)` of `T(x, D)u = g`.
pub trait Target: Send + Sync + fmt::Debug {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
}

/// `g` given by expressions in the coordinates and bound parameters.
#[derive(Clone, Debug)]
pub struct ExprTarget {
    exprs: Vec<Expr>,
    sys: PdeSystem,
}

impl ExprTarget {
    /// Every parameter mentioned in `exprs` must appear in `params`.
    pub fn new(exprs: Vec<Expr>, n_space: usize, has_time: bool, params: &[(String, f64)]) -> Result<Self> {
        let eqs = exprs.iter().map(|e| Equation { lhs: e.clone(), rhs: Rhs::Value(0.0) }).collect();
        let mut sys = PdeSystem::from_equations(eqs, Some((n_space, has_time)))?;
        if !sys.jets().is_empty() {
            return Err(Error::InvalidArgument("right-hand sides must not mention unknowns".into()));
        }
        let names: Vec<String> = sys.params().map(|(n, _)| String::from(n)).collect();
        for n in names {
            let v = params
                .iter()
                .find(|(p, _)| *p == n)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::UnboundParameter(n.clone()))?;
            sys = sys.bind(&n, v)?;
        }
        Ok(ExprTarget { exprs, sys })
    }

    /// The right-hand sides of `sys`: numbers stay numbers, names are
    /// looked up in `rhs` first and then among the bound parameters of `sys`.
    pub fn for_system(sys: &PdeSystem, rhs: &BTreeMap<String, Expr>) -> Result<Self> {
        let params: Vec<(String, f64)> = sys.params().filter_map(|(n, v)| v.map(|v| (String::from(n), v))).collect();
        let exprs = sys
            .equations()
            .iter()
            .map(|eq| match &eq.rhs {
                Rhs::Value(v) => Ok(Expr::Num(*v)),
                Rhs::Name(n) => rhs
                    .get(n)
                    .cloned()
                    .or_else(|| params.iter().find(|(p, _)| p == n).map(|(_, v)| Expr::Num(*v)))
                    .ok_or_else(|| Error::UnboundParameter(n.clone())),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(exprs, sys.n_space(), sys.has_time(), &params)
    }

    pub fn exprs(&self) -> &[Expr] {
        &self.exprs
    }

    /// Bound parameter values, sorted by name.
    pub fn params(&self) -> Vec<(String, f64)> {
        self.sys.params().filter_map(|(n, v)| v.map(|v| (String::from(n), v))).collect()
    }
}

impl Target for ExprTarget {
    fn len(&self) -> usize {
        self.exprs.len()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.sys.eval_f(x, &[])
    }
}

/// `g` given by piecewise polynomials, read with NLSC semantics.
#[derive(Clone, Debug)]
pub struct PwTarget(pub Vec<PwPoly>);

impl Target for PwTarget {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.0.iter().map(|f| f.eval_nlsc(x)).collect()
    }
}

/// A thread-safe scalar function of a point.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Initial values of one unknown on the face `t = 0`, as a function of the
/// spatial coordinates.
#[derive(Clone)]
pub enum InitialField {
    Poly(Poly),
    /// Fitted cell by cell; the fit error shows up as initial defect.
    Func(ScalarFn),
}

impl fmt::Debug for InitialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialField::Poly(p) => f.debug_tuple("Poly").field(p).finish(),
            InitialField::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl InitialField {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            InitialField::Poly(p) => p.eval(x),
            InitialField::Func(f) => f(x),
        }
    }

    /// The field on the spatial box `[lo, hi]` as a polynomial of at least
    /// `degree`. A closure is fitted by least squares on a Chebyshev tensor
    /// grid.
    pub fn on_face(&self, lo: &[f64], hi: &[f64], degree: u32) -> Result<Poly> {
        match self {
            InitialField::Poly(p) => {
                let d = p.degree().max(degree);
                p.clone().with_degree(d)
            }
            InitialField::Func(f) => fit(f.as_ref(), lo, hi, degree),
        }
    }
}

fn fit(f: &dyn Fn(&[f64]) -> f64, lo: &[f64], hi: &[f64], degree: u32) -> Result<Poly> {
    let n = lo.len();
    let basis = MultiIndex::all_up_to(n, degree);
    let per_axis = degree as usize + 2;
    let nodes: Vec<f64> = (0..per_axis)
        .map(|j| {
            let th = core::f64::consts::PI * (2 * j + 1) as f64 / (2 * per_axis) as f64;
            0.5 * (1.0 - libm::cos(th))
        })
        .collect();
    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let total = per_axis.pow(n as u32);
    let mut rows = Vec::with_capacity(total);
    let mut rhs = Vec::with_capacity(total);
    let mut idx = alloc::vec![0usize; n];
    for _ in 0..total {
        let p: Vec<f64> = (0..n).map(|i| lo[i] + (hi[i] - lo[i]) * nodes[idx[i]]).collect();
        let v = f(&p);
        if !v.is_finite() {
            return Err(Error::EvalDomain(format!("initial data is not finite at {p:?}")));
        }
        rhs.push(v);
        rows.push(p);
        for i in (0..n).rev() {
            idx[i] += 1;
            if idx[i] < per_axis {
                break;
            }
            idx[i] = 0;
        }
    }
    let a = DMatrix::from_fn(total, basis.len(), |r, c| {
        basis[c].orders().iter().enumerate().fold(1.0, |acc, (i, k)| acc * libm::pow(rows[r][i] - center[i], *k as f64))
    });
    let sol = a
        .svd(true, true)
        .solve(&DVector::from_vec(rhs), 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("initial data fit failed: {e}")))?;
    let coeffs = basis.into_iter().zip(sol.iter()).filter(|(_, c)| **c != 0.0).map(|(a, c)| (a, *c)).collect();
    Poly::new(center, coeffs, degree)
}

/// Initial data for some of the unknowns of a time-dependent system.
#[derive(Clone, Debug)]
pub struct InitialData {
    fields: Vec<Option<InitialField>>,
}

impl InitialData {
    /// `named` pairs unknown names with fields; polynomial fields must live
    /// on the spatial axes of `sys`.
    pub fn new(sys: &PdeSystem, named: Vec<(String, InitialField)>) -> Result<Self> {
        if !sys.has_time() {
            return Err(Error::InvalidArgument("initial data needs a time-dependent system".into()));
        }
        let mut fields = alloc::vec![None; sys.jets().unknowns().len()];
        for (name, field) in named {
            let u = sys
                .jets()
                .unknowns()
                .iter()
                .position(|n| *n == name)
                .ok_or_else(|| Error::InvalidArgument(format!("no unknown named '{name}'")))?;
            if let InitialField::Poly(p) = &field {
                if p.dim() != sys.n_space() {
                    return Err(Error::DimensionMismatch { expected: sys.n_space(), got: p.dim() });
                }
            }
            fields[u] = Some(field);
        }
        Ok(InitialData { fields })
    }

    /// One entry per unknown, in [`crate::pde::JetSpec::unknowns`] order.
    pub fn fields(&self) -> &[Option<InitialField>] {
        &self.fields
    }

    pub fn on_face(&self, lo: &[f64], hi: &[f64], degree: u32) -> Result<Vec<Option<Poly>>> {
        self.fields.iter().map(|f| f.as_ref().map(|f| f.on_face(lo, hi, degree)).transpose()).collect()
    }
}
