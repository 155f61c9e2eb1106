//! Problems and certified solutions as JSON.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use ordcomp_core::pde::{parse_equations, parse_expr, Expr, PdeSystem};
use ordcomp_core::pw::{Piecewise, PwPoly};
use ordcomp_core::solve::{ApproxSolution, CellReport, Certificate, ExprTarget, InitialData, InitialField, Target};
use ordcomp_core::AxisBox;

use crate::format::{BoxDto, PwPolyDto};
use crate::num::{floats, nums, Num};

/// Everything that defines a run besides the numerical knobs, in text form.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Problem {
    /// The system in the operator language, one equation per line.
    pub system: String,
    pub n_space: usize,
    pub has_time: bool,
    pub params: BTreeMap<String, Num>,
    /// Right-hand side per equation, as an expression in the coordinates.
    pub rhs: Vec<String>,
    /// Initial data per unknown, as expressions in the spatial coordinates.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub u0: BTreeMap<String, String>,
    pub domain: BoxDto,
}

/// A [`Problem`] turned into solver inputs.
#[derive(Clone, Debug)]
pub struct Built {
    pub system: Arc<PdeSystem>,
    pub target: Arc<dyn Target>,
    pub initial: Option<InitialData>,
    pub domain: AxisBox,
}

impl Problem {
    /// Resolves named right-hand sides through `rhs` and the bound
    /// parameters of `sys`.
    pub fn new(
        sys: &PdeSystem,
        rhs: &BTreeMap<String, Expr>,
        u0: BTreeMap<String, String>,
        domain: &AxisBox,
    ) -> ordcomp_core::Result<Self> {
        let target = ExprTarget::for_system(sys, rhs)?;
        Ok(Problem {
            system: sys.to_string(),
            n_space: sys.n_space(),
            has_time: sys.has_time(),
            params: sys.params().filter_map(|(n, v)| Some((n.to_string(), Num(v?)))).collect(),
            rhs: target.exprs().iter().map(ToString::to_string).collect(),
            u0,
            domain: BoxDto::from_box(domain),
        })
    }

    pub fn build(&self) -> ordcomp_core::Result<Built> {
        let eqs = parse_equations(&self.system)?;
        let mut sys = PdeSystem::from_equations(eqs, Some((self.n_space, self.has_time)))?;
        let params: Vec<(String, f64)> = self.params.iter().map(|(k, v)| (k.clone(), v.0)).collect();
        for (k, v) in &params {
            sys = sys.bind(k, *v)?;
        }
        let exprs = self.rhs.iter().map(|s| parse_expr(s)).collect::<ordcomp_core::Result<Vec<_>>>()?;
        let target = ExprTarget::new(exprs, self.n_space, self.has_time, &params)?;
        let initial = if self.u0.is_empty() {
            None
        } else {
            let mut named = Vec::new();
            for (name, text) in &self.u0 {
                named.push((name.clone(), initial_field(text, self.n_space, &params)?));
            }
            Some(InitialData::new(&sys, named)?)
        };
        Ok(Built { system: Arc::new(sys), target: Arc::new(target), initial, domain: self.domain.to_box()? })
    }
}

/// Polynomial expressions become exact initial data; anything else is
/// evaluated pointwise and fitted per cell.
pub fn initial_field(text: &str, n_space: usize, params: &[(String, f64)]) -> ordcomp_core::Result<InitialField> {
    let e = parse_expr(text)?;
    let lookup = |p: &str| params.iter().find(|(k, _)| k == p).map(|(_, v)| *v);
    if let Some(p) = e.to_poly(n_space, false, &lookup) {
        return Ok(InitialField::Poly(p));
    }
    let t = ExprTarget::new(vec![e], n_space, false, params)?;
    Ok(InitialField::Func(Arc::new(move |x: &[f64]| t.eval(x).map_or(f64::NAN, |v| v[0]))))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CellReportDto {
    pub lo: Vec<Num>,
    pub hi: Vec<Num>,
    pub depth: u32,
    pub initial: bool,
    pub anchor: Vec<Num>,
    pub jet: Vec<Num>,
    pub samples: usize,
    pub min_margin: Num,
    pub max_margin: Num,
    pub initial_defect: Num,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct CertificateDto {
    pub pass: bool,
    pub eps: Num,
    pub theta: Num,
    pub worst_margin: Num,
    pub worst_point: Vec<Num>,
    pub density: usize,
    pub total_samples: usize,
    pub initial_defect: Num,
    pub initial_tol: Num,
    pub depth_histogram: Vec<usize>,
    pub cells: Vec<CellReportDto>,
}

impl CertificateDto {
    pub fn from_cert(c: &Certificate) -> Self {
        CertificateDto {
            pass: c.pass,
            eps: Num(c.eps),
            theta: Num(c.theta),
            worst_margin: Num(c.worst_margin),
            worst_point: nums(&c.worst_point),
            density: c.density,
            total_samples: c.total_samples,
            initial_defect: Num(c.initial_defect),
            initial_tol: Num(c.initial_tol),
            depth_histogram: c.depth_histogram.clone(),
            cells: c
                .cells
                .iter()
                .map(|r| CellReportDto {
                    lo: nums(&r.lo),
                    hi: nums(&r.hi),
                    depth: r.depth,
                    initial: r.initial,
                    anchor: nums(&r.anchor),
                    jet: nums(&r.jet),
                    samples: r.samples,
                    min_margin: Num(r.min_margin),
                    max_margin: Num(r.max_margin),
                    initial_defect: Num(r.initial_defect),
                })
                .collect(),
        }
    }

    pub fn to_cert(&self) -> Certificate {
        Certificate {
            eps: self.eps.0,
            theta: self.theta.0,
            cells: self
                .cells
                .iter()
                .map(|r| CellReport {
                    lo: floats(&r.lo),
                    hi: floats(&r.hi),
                    depth: r.depth,
                    initial: r.initial,
                    anchor: floats(&r.anchor),
                    jet: floats(&r.jet),
                    samples: r.samples,
                    min_margin: r.min_margin.0,
                    max_margin: r.max_margin.0,
                    initial_defect: r.initial_defect.0,
                })
                .collect(),
            worst_margin: self.worst_margin.0,
            worst_point: floats(&self.worst_point),
            density: self.density,
            total_samples: self.total_samples,
            initial_defect: self.initial_defect.0,
            initial_tol: self.initial_tol.0,
            depth_histogram: self.depth_histogram.clone(),
            pass: self.pass,
        }
    }
}

/// A solution file: the problem, `w` per unknown and its certificate.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SolutionDto {
    pub problem: Problem,
    pub eps: Num,
    pub theta: Num,
    pub unknowns: Vec<String>,
    pub jet_labels: Vec<String>,
    pub w: BTreeMap<String, PwPolyDto>,
    pub anchors: Vec<Vec<Num>>,
    pub depths: Vec<u32>,
    pub certificate: CertificateDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<CertificateDto>,
    /// The options the run was made with.
    #[serde(default)]
    pub config: serde_json::Value,
}

impl SolutionDto {
    pub fn new(problem: Problem, sol: &ApproxSolution, config: serde_json::Value) -> Self {
        let spec = sol.system.jets();
        SolutionDto {
            problem,
            eps: Num(sol.eps),
            theta: Num(sol.theta),
            unknowns: spec.unknowns().to_vec(),
            jet_labels: spec.labels(),
            w: spec.unknowns().iter().cloned().zip(sol.w.iter().map(PwPolyDto::from_pw)).collect(),
            anchors: sol.anchors.iter().map(|a| nums(a)).collect(),
            depths: sol.depths.clone(),
            certificate: CertificateDto::from_cert(&sol.certificate),
            verification: None,
            config,
        }
    }

    /// Rebuilds the solution for re-verification.
    pub fn to_solution(&self) -> Result<ApproxSolution, String> {
        let built = self.problem.build().map_err(|e| e.to_string())?;
        let w = built
            .system
            .jets()
            .unknowns()
            .iter()
            .map(|u| self.w.get(u).ok_or_else(|| format!("no function for unknown '{u}'"))?.to_pw())
            .collect::<Result<Vec<PwPoly>, String>>()?;
        if w.iter().any(|f| f.complex() != w[0].complex()) {
            return Err("unknowns live on different cell complexes".into());
        }
        if w[0].complex().domain() != &built.domain {
            return Err("solution domain differs from the problem domain".into());
        }
        Ok(ApproxSolution {
            system: built.system,
            target: built.target,
            initial: built.initial,
            eps: self.eps.0,
            theta: self.theta.0,
            w,
            anchors: self.anchors.iter().map(|a| floats(a)).collect(),
            depths: self.depths.clone(),
            certificate: self.certificate.to_cert(),
        })
    }
}
