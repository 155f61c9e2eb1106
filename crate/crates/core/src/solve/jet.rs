//! Pointwise jet solving and Taylor patches.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geom::{AxisBox, MultiIndex};
use crate::pde::{JetSpec, PdeSystem};
use crate::poly::Poly;

/// Closed-form shortcuts a caller can plug into the jet solver.
///
/// Hook answers are checked against the system before use; a wrong answer
/// only costs the fallback to the generic solver.
pub trait SolveHook: Send + Sync + fmt::Debug {
    /// A jet with `F(x, jet) = target`, if one is known in closed form.
    fn jet(&self, sys: &PdeSystem, x: &[f64], target: &[f64]) -> Option<Vec<f64>>;

    /// Polynomials (in [`JetSpec::unknowns`] order) for a cell touching the
    /// initial face, built around `anchor` (which has `t = 0`).
    /// `u0` carries the initial data restricted to the cell.
    fn initial_patch(
        &self,
        _sys: &PdeSystem,
        _cell: &AxisBox,
        _anchor: &[f64],
        _target: &[f64],
        _u0: &[Option<Poly>],
    ) -> Option<Vec<Poly>> {
        None
    }
}

#[derive(Clone, Debug)]
pub struct JetSolverCfg {
    /// Starting jet; `None` is the zero jet.
    pub initial: Option<Vec<f64>>,
    pub max_iter: usize,
    /// Residual accepted as a solution, relative to `1 + max|target|`.
    pub tol: f64,
    /// Starting Levenberg–Marquardt damping, relative to the largest
    /// diagonal entry of `J Jᵀ`; divided by 10 after a good step and
    /// multiplied by 10 after a bad one.
    pub damping: f64,
    pub hook: Option<Arc<dyn SolveHook>>,
}

impl Default for JetSolverCfg {
    fn default() -> Self {
        JetSolverCfg { initial: None, max_iter: 200, tol: 1e-12, damping: 1e-10, hook: None }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn residual(sys: &PdeSystem, x: &[f64], jet: &[f64], target: &[f64]) -> Result<Vec<f64>> {
    Ok(sys.eval_f(x, jet)?.iter().zip(target).map(|(f, g)| f - g).collect())
}

/// Solves `F(x, jet) = target` for a jet.
///
/// A hook answer is used when it checks out. Otherwise Levenberg–Marquardt
/// in its minimum-norm form starts from `cfg.initial` (the zero jet by
/// default), so slots the system does not need stay where they started.
pub fn jet_solve(sys: &PdeSystem, x: &[f64], target: &[f64], cfg: &JetSolverCfg) -> Result<Vec<f64>> {
    if target.len() != sys.len() {
        return Err(Error::DimensionMismatch { expected: sys.len(), got: target.len() });
    }
    if let Some(jet) = cfg.hook.as_ref().and_then(|h| h.jet(sys, x, target)) {
        if jet.len() == sys.jets().len() {
            if let Ok(r) = residual(sys, x, &jet, target) {
                if max_abs(&r) <= cfg.tol * (1.0 + max_abs(target)) {
                    return Ok(jet);
                }
            }
        }
    }
    jet_solve_fixed(sys, x, target, &vec![None; sys.jets().len()], cfg)
}

/// [`jet_solve`] with some slots pinned to given values; only the `None`
/// slots move. Hooks are not consulted.
pub fn jet_solve_fixed(
    sys: &PdeSystem,
    x: &[f64],
    target: &[f64],
    fixed: &[Option<f64>],
    cfg: &JetSolverCfg,
) -> Result<Vec<f64>> {
    let k = sys.jets().len();
    if fixed.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: fixed.len() });
    }
    if target.len() != sys.len() {
        return Err(Error::DimensionMismatch { expected: sys.len(), got: target.len() });
    }
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 || !(cfg.damping > 0.0) {
        return Err(Error::InvalidArgument("jet solver needs tol > 0, damping > 0 and max_iter >= 1".into()));
    }
    if target.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("jet target must be finite".into()));
    }
    let start = match &cfg.initial {
        Some(v) if v.len() != k => return Err(Error::DimensionMismatch { expected: k, got: v.len() }),
        Some(v) => v.clone(),
        None => vec![0.0; k],
    };
    let free: Vec<usize> = (0..k).filter(|i| fixed[*i].is_none()).collect();
    let mut jet: Vec<f64> = fixed.iter().zip(start).map(|(f, s)| f.unwrap_or(s)).collect();
    let tol = cfg.tol * (1.0 + max_abs(target));
    let m = sys.len();
    let mut mu = cfg.damping;
    let no_jet = |r: &[f64]| Error::NoJetFound { point: x.to_vec(), residual: max_abs(r) };

    let (f, mut jac) = sys.jacobian(x, &jet)?;
    let mut r: Vec<f64> = f.iter().zip(target).map(|(f, g)| f - g).collect();
    for _ in 0..cfg.max_iter {
        if max_abs(&r) <= tol {
            return Ok(jet);
        }
        if free.is_empty() {
            break;
        }
        let jm = DMatrix::from_fn(m, free.len(), |i, j| jac[i][free[j]]);
        let a = &jm * jm.transpose();
        let scale = 1.0 + a.diagonal().iter().fold(0.0f64, |s, v| s.max(*v));
        let rv = DVector::from_column_slice(&r);
        let norm = rv.norm_squared();
        let mut accepted = false;
        while mu < 1e12 {
            let mut lhs = a.clone();
            for i in 0..m {
                lhs[(i, i)] += mu * scale;
            }
            let Some(ch) = lhs.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = -(jm.transpose() * ch.solve(&rv));
            if step.iter().all(|s| *s == 0.0) {
                return Err(no_jet(&r));
            }
            let mut trial = jet.clone();
            for (j, s) in free.iter().zip(step.iter()) {
                trial[*j] += s;
            }
            match residual(sys, x, &trial, target) {
                Ok(r2) if r2.iter().map(|v| v * v).sum::<f64>() < norm => {
                    jet = trial;
                    r = r2;
                    mu = (mu / 10.0).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => mu *= 10.0,
            }
        }
        if !accepted {
            return Err(no_jet(&r));
        }
        jac = sys.jacobian(x, &jet)?.1;
    }
    if max_abs(&r) <= tol {
        Ok(jet)
    } else {
        Err(no_jet(&r))
    }
}

/// `Σ_α ξ_α (x - c)^α / α!` per unknown, in [`JetSpec::unknowns`] order.
pub fn taylor_patch(jet: &[f64], center: &[f64], spec: &JetSpec, degree: u32) -> Result<Vec<Poly>> {
    if jet.len() != spec.len() {
        return Err(Error::DimensionMismatch { expected: spec.len(), got: jet.len() });
    }
    (0..spec.unknowns().len())
        .map(|u| {
            let derivs = spec.slots().iter().zip(jet).filter(|((k, _), _)| *k == u).map(|((_, a), v)| (a, *v));
            Poly::from_derivatives(center.to_vec(), derivs, degree)
        })
        .collect()
}

/// Slot values an initial field pins at `anchor`: every purely spatial
/// derivative of an unknown that has initial data.
pub fn initial_slots(spec: &JetSpec, anchor: &[f64], u0: &[Option<Poly>]) -> Vec<Option<f64>> {
    let n = anchor.len() - 1;
    spec.slots()
        .iter()
        .map(|(u, a)| {
            let q = u0.get(*u)?.as_ref()?;
            let o = a.orders();
            (o[n] == 0).then(|| q.deriv_eval(&anchor[..n], &MultiIndex::new(o[..n].to_vec())))
        })
        .collect()
}

/// Patch for a cell on the initial face `t = 0`.
///
/// Unknowns with initial data become `u0(x) + Σ_τ t^τ Q_τ(x)`, where `Q_τ`
/// is the Taylor polynomial (around `anchor`) of the jet slots of time
/// order `τ`. The patch therefore equals `u0` exactly on `t = 0`. Unknowns
/// without initial data get the plain Taylor patch.
pub fn patch_with_initial(
    jet: &[f64],
    anchor: &[f64],
    spec: &JetSpec,
    degree: u32,
    u0: &[Option<Poly>],
) -> Result<Vec<Poly>> {
    let dim = anchor.len();
    if dim == 0 || anchor[dim - 1] != 0.0 {
        return Err(Error::CenterNotOnInitialFace);
    }
    let plain = taylor_patch(jet, anchor, spec, degree)?;
    let mut out = Vec::with_capacity(plain.len());
    for (u, p) in plain.into_iter().enumerate() {
        let Some(q) = u0.get(u).and_then(Option::as_ref) else {
            out.push(p);
            continue;
        };
        if q.dim() + 1 != dim {
            return Err(Error::DimensionMismatch { expected: dim - 1, got: q.dim() });
        }
        let timed: BTreeMap<MultiIndex, f64> =
            p.coeffs().iter().filter(|(a, _)| a.orders()[dim - 1] > 0).map(|(a, c)| (a.clone(), *c)).collect();
        let timed = Poly::new(anchor.to_vec(), timed, degree)?;
        let base = q.extend_last_axis(0.0);
        let sum = base.add(&timed)?;
        let d = sum.degree().max(degree);
        out.push(sum.with_degree(d)?);
    }
    Ok(out)
}
