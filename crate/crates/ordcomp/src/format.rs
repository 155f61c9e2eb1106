//! Grid functions as CSV and piecewise functions as JSON.
//!
//! GridFn CSV: a header `ndim,n1,...,nk,lo1,...,lok,hi1,...,hik`, then one
//! value per line in row-major node order (last axis fastest), with `inf`
//! and `-inf` for infinities.
//!
//! PwPoly JSON:
//! `{"domain":{"lo":[..],"hi":[..]},"cells":[{"lo":[..],"hi":[..],"center":[..],"coeffs":{"2,0":1.5}}]}`
//! where coefficient keys are comma-joined multi-indices. PwExpr JSON has
//! the same shape with a `"tree"` per cell instead of `center`/`coeffs`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use ordcomp_core::grid::{Grid, GridFn};
use ordcomp_core::poly::Poly;
use ordcomp_core::pw::{CellComplex, Piecewise, PwExpr, PwPoly, Tree};
use ordcomp_core::{AxisBox, MultiIndex, XReal};

use crate::num::{floats, fmt17, nums, parse_f64, Num};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: line {line}: {msg}")]
    Line { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Invalid { path: String, msg: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl FormatError {
    fn invalid(path: &str, msg: impl ToString) -> Self {
        FormatError::Invalid { path: path.into(), msg: msg.to_string() }
    }

    fn line(path: &str, line: usize, msg: impl ToString) -> Self {
        FormatError::Line { path: path.into(), line, msg: msg.to_string() }
    }

    fn json(path: &str, e: serde_json::Error) -> Self {
        if e.line() > 0 {
            FormatError::line(path, e.line(), e)
        } else {
            FormatError::invalid(path, e)
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    std::fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn gridfn_to_csv(u: &GridFn) -> String {
    let g = u.grid();
    let b = g.bbox();
    let mut head = vec![g.dim().to_string()];
    head.extend(g.nodes_per_axis().iter().map(usize::to_string));
    head.extend(b.lo().iter().chain(b.hi()).map(|v| fmt17(*v)));
    let mut s = head.join(",");
    s.push('\n');
    for v in u.values() {
        let _ = writeln!(s, "{}", fmt17(v.get()));
    }
    s
}

/// Parses the CSV text of a grid function; `name` labels error messages.
pub fn gridfn_from_csv(name: &str, text: &str) -> Result<GridFn, FormatError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| FormatError::line(name, 1, "missing header"))?;
    let bad_header = |msg: &str| FormatError::line(name, hl, format!("bad header: {msg}"));
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    let ndim: usize = fields[0].parse().map_err(|_| bad_header("ndim must be a positive integer"))?;
    if ndim == 0 || fields.len() != 1 + 3 * ndim {
        return Err(bad_header(&format!("expected ndim,n1..n{ndim},lo..,hi.. ({} fields)", 1 + 3 * ndim)));
    }
    let n: Vec<usize> = fields[1..=ndim]
        .iter()
        .map(|f| f.parse().map_err(|_| bad_header("node counts must be integers")))
        .collect::<Result<_, _>>()?;
    let coords: Vec<f64> = fields[1 + ndim..]
        .iter()
        .map(|f| parse_f64(f).filter(|v| v.is_finite()).ok_or_else(|| bad_header("box bounds must be finite numbers")))
        .collect::<Result<_, _>>()?;
    let bbox =
        AxisBox::new(coords[..ndim].to_vec(), coords[ndim..].to_vec()).map_err(|e| bad_header(&e.to_string()))?;
    let grid = Grid::new(bbox, n).map_err(|e| bad_header(&e.to_string()))?;
    let mut values = Vec::with_capacity(grid.len());
    let mut last = hl;
    for (ln, l) in lines {
        last = ln;
        let v = parse_f64(l).ok_or_else(|| FormatError::line(name, ln, format!("not a number: {l:?}")))?;
        let x = XReal::new(v).map_err(|_| FormatError::line(name, ln, "NaN is not allowed"))?;
        if values.len() == grid.len() {
            return Err(FormatError::line(name, ln, format!("more than {} values", grid.len())));
        }
        values.push(x);
    }
    if values.len() != grid.len() {
        return Err(FormatError::line(name, last, format!("expected {} values, found {}", grid.len(), values.len())));
    }
    GridFn::new(grid, values).map_err(|e| FormatError::invalid(name, e))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct BoxDto {
    pub lo: Vec<Num>,
    pub hi: Vec<Num>,
}

impl BoxDto {
    pub fn from_box(b: &AxisBox) -> Self {
        BoxDto { lo: nums(b.lo()), hi: nums(b.hi()) }
    }

    pub fn to_box(&self) -> ordcomp_core::Result<AxisBox> {
        AxisBox::new(floats(&self.lo), floats(&self.hi))
    }
}

/// Coefficients keyed by comma-joined multi-index, written in multi-index
/// order.
#[derive(Deserialize, Clone, Debug, PartialEq, Default)]
#[serde(transparent)]
pub struct Coeffs(BTreeMap<String, Num>);

#[derive(Clone, Debug)]
struct OrderedCoeffs(Vec<(String, Num)>);

impl Serialize for OrderedCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Serialize for Coeffs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut entries: Vec<(MultiIndex, String, Num)> =
            self.0.iter().filter_map(|(k, v)| Some((parse_index(k)?, k.clone(), *v))).collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        OrderedCoeffs(entries.into_iter().map(|(_, k, v)| (k, v)).collect()).serialize(s)
    }
}

fn index_key(a: &MultiIndex) -> String {
    a.orders().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_index(k: &str) -> Option<MultiIndex> {
    k.split(',').map(|t| t.trim().parse::<u32>().ok()).collect::<Option<Vec<_>>>().map(MultiIndex::new)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PolyDto {
    pub center: Vec<Num>,
    pub coeffs: Coeffs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
}

impl PolyDto {
    pub fn from_poly(p: &Poly) -> Self {
        let coeffs = p.coeffs().iter().map(|(a, c)| (index_key(a), Num(*c))).collect();
        let degree = (p.degree() != p.effective_degree()).then_some(p.degree());
        PolyDto { center: nums(p.center()), coeffs: Coeffs(coeffs), degree }
    }

    pub fn to_poly(&self) -> Result<Poly, String> {
        let mut m = BTreeMap::new();
        for (k, v) in &self.coeffs.0 {
            let a = parse_index(k).ok_or_else(|| format!("bad multi-index key {k:?}"))?;
            if !v.0.is_finite() {
                return Err(format!("coefficient {k:?} is not finite"));
            }
            m.insert(a, v.0);
        }
        let effective = m.keys().map(MultiIndex::order).max().unwrap_or(0);
        Poly::new(floats(&self.center), m, self.degree.unwrap_or(effective)).map_err(|e| e.to_string())
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PolyCellDto {
    pub lo: Vec<Num>,
    pub hi: Vec<Num>,
    #[serde(flatten)]
    pub poly: PolyDto,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PwPolyDto {
    pub domain: BoxDto,
    pub cells: Vec<PolyCellDto>,
}

impl PwPolyDto {
    pub fn from_pw(f: &PwPoly) -> Self {
        let cx = f.complex();
        let cells = cx
            .cells()
            .iter()
            .zip(f.pieces())
            .map(|(c, p)| PolyCellDto { lo: nums(c.lo()), hi: nums(c.hi()), poly: PolyDto::from_poly(p) })
            .collect();
        PwPolyDto { domain: BoxDto::from_box(cx.domain()), cells }
    }

    pub fn to_pw(&self) -> Result<PwPoly, String> {
        let complex = complex(&self.domain, self.cells.iter().map(|c| (&c.lo, &c.hi)))?;
        let pieces = self.cells.iter().map(|c| c.poly.to_poly()).collect::<Result<Vec<_>, _>>()?;
        PwPoly::new(complex, pieces).map_err(|e| e.to_string())
    }
}

fn complex<'a>(
    domain: &BoxDto,
    cells: impl Iterator<Item = (&'a Vec<Num>, &'a Vec<Num>)>,
) -> Result<CellComplex, String> {
    let domain = domain.to_box().map_err(|e| e.to_string())?;
    let cells = cells
        .map(|(lo, hi)| AxisBox::new(floats(lo), floats(hi)))
        .collect::<ordcomp_core::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    CellComplex::new(domain, cells).map_err(|e| e.to_string())
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum TreeDto {
    Const(Num),
    Poly(PolyDto),
    Min(Vec<TreeDto>),
    Max(Vec<TreeDto>),
    Neg(Box<TreeDto>),
}

impl TreeDto {
    pub fn from_tree(t: &Tree) -> Result<Self, String> {
        Ok(match t {
            Tree::Const(c) => TreeDto::Const(Num(*c)),
            Tree::Leaf(p) => TreeDto::Poly(PolyDto::from_poly(p)),
            Tree::Func(_) => return Err("expression has an opaque leaf and cannot be written".into()),
            Tree::Min(v) => TreeDto::Min(v.iter().map(Self::from_tree).collect::<Result<_, _>>()?),
            Tree::Max(v) => TreeDto::Max(v.iter().map(Self::from_tree).collect::<Result<_, _>>()?),
            Tree::Neg(a) => TreeDto::Neg(Box::new(Self::from_tree(a)?)),
        })
    }

    pub fn to_tree(&self) -> Result<Tree, String> {
        Ok(match self {
            TreeDto::Const(c) => Tree::Const(c.0),
            TreeDto::Poly(p) => Tree::Leaf(Arc::new(p.to_poly()?)),
            TreeDto::Min(v) => Tree::Min(v.iter().map(Self::to_tree).collect::<Result<_, _>>()?),
            TreeDto::Max(v) => Tree::Max(v.iter().map(Self::to_tree).collect::<Result<_, _>>()?),
            TreeDto::Neg(a) => Tree::Neg(Box::new(a.to_tree()?)),
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TreeCellDto {
    pub lo: Vec<Num>,
    pub hi: Vec<Num>,
    pub tree: TreeDto,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PwExprDto {
    pub domain: BoxDto,
    pub cells: Vec<TreeCellDto>,
}

impl PwExprDto {
    pub fn from_pw(f: &PwExpr) -> Result<Self, String> {
        let cx = f.complex();
        let cells = cx
            .cells()
            .iter()
            .zip(f.trees())
            .map(|(c, t)| Ok(TreeCellDto { lo: nums(c.lo()), hi: nums(c.hi()), tree: TreeDto::from_tree(t)? }))
            .collect::<Result<_, String>>()?;
        Ok(PwExprDto { domain: BoxDto::from_box(cx.domain()), cells })
    }

    pub fn to_pw(&self) -> Result<PwExpr, String> {
        let complex = complex(&self.domain, self.cells.iter().map(|c| (&c.lo, &c.hi)))?;
        let trees = self.cells.iter().map(|c| c.tree.to_tree()).collect::<Result<Vec<_>, _>>()?;
        PwExpr::new(complex, trees).map_err(|e| e.to_string())
    }
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// A function read from disk.
#[derive(Clone, Debug)]
pub enum Function {
    Grid(GridFn),
    Poly(PwPoly),
    Expr(PwExpr),
}

impl Function {
    pub fn kind(&self) -> &'static str {
        match self {
            Function::Grid(_) => "grid",
            Function::Poly(_) | Function::Expr(_) => "exact",
        }
    }

    /// Exact functions as expressions; `None` for grid functions.
    pub fn into_expr(self) -> Option<PwExpr> {
        match self {
            Function::Grid(_) => None,
            Function::Poly(p) => Some(p.to_expr()),
            Function::Expr(e) => Some(e),
        }
    }
}

/// Parses a piecewise function from JSON text: cells with a `tree` make a
/// PwExpr, cells with `coeffs` a PwPoly.
pub fn function_from_json(name: &str, text: &str) -> Result<Function, FormatError> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| FormatError::json(name, e))?;
    let is_expr = v.get("cells").and_then(|c| c.get(0)).is_some_and(|c| c.get("tree").is_some());
    if is_expr {
        let dto: PwExprDto = serde_json::from_str(text).map_err(|e| FormatError::json(name, e))?;
        dto.to_pw().map(Function::Expr).map_err(|e| FormatError::invalid(name, e))
    } else {
        let dto: PwPolyDto = serde_json::from_str(text).map_err(|e| FormatError::json(name, e))?;
        dto.to_pw().map(Function::Poly).map_err(|e| FormatError::invalid(name, e))
    }
}

/// Reads `.csv` as a grid function and anything else as piecewise JSON.
pub fn read_function(path: &Path) -> Result<Function, FormatError> {
    let text = read_text(path)?;
    let name = path.display().to_string();
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        gridfn_from_csv(&name, &text).map(Function::Grid)
    } else {
        function_from_json(&name, &text)
    }
}

pub fn write_function(path: &Path, f: &Function) -> Result<(), FormatError> {
    let name = path.display().to_string();
    let text = match f {
        Function::Grid(g) => gridfn_to_csv(g),
        Function::Poly(p) => to_json(&PwPolyDto::from_pw(p)),
        Function::Expr(e) => to_json(&PwExprDto::from_pw(e).map_err(|m| FormatError::invalid(&name, m))?),
    };
    write_text(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let g = Grid::new(AxisBox::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap(), vec![3, 4]).unwrap();
        let mut u = GridFn::from_fn(g, |x| (x[0] * 0.1).sin() / 3.0 + x[1]).unwrap();
        u = u.map(|v| if v.get() > 0.9 { XReal::new(f64::INFINITY).unwrap() } else { v });
        let text = gridfn_to_csv(&u);
        let back = gridfn_from_csv("t", &text).unwrap();
        assert_eq!(back, u);
        assert_eq!(gridfn_to_csv(&back), text);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let e = gridfn_from_csv("f.csv", "2,3\n0\n").unwrap_err();
        assert!(matches!(e, FormatError::Line { line: 1, .. }), "{e}");
        let e = gridfn_from_csv("f.csv", "1,3,0,1\n0\nx\n1\n").unwrap_err();
        assert!(matches!(e, FormatError::Line { line: 3, .. }), "{e}");
        let e = gridfn_from_csv("f.csv", "1,3,0,1\n0\n1\n").unwrap_err();
        assert!(matches!(e, FormatError::Line { line: 3, .. }), "{e}");
    }

    #[test]
    fn pwpoly_json_round_trip() {
        let text = r#"{"domain":{"lo":[0],"hi":[2]},"cells":[
            {"lo":[0],"hi":[1],"center":[0],"coeffs":{"2":1}},
            {"lo":[1],"hi":[2],"center":[2],"coeffs":{"2":1.5,"0":-0.25}}]}"#;
        let Function::Poly(f) = function_from_json("t", text).unwrap() else { panic!() };
        assert_eq!(f.eval_nlsc(&[1.0]).unwrap(), 1.0);
        let out = to_json(&PwPolyDto::from_pw(&f));
        let Function::Poly(g) = function_from_json("t", &out).unwrap() else { panic!() };
        assert_eq!(f, g);
        assert!(out.find("\"0\"").unwrap() < out.rfind("\"2\"").unwrap());
    }

    #[test]
    fn pwexpr_json_round_trip() {
        let f = PwPoly::single(AxisBox::new(vec![0.0], vec![1.0]).unwrap(), Poly::constant(vec![0.5], 2.0, 0)).unwrap();
        let e =
            PwExpr::max_of(&[f.to_expr(), PwExpr::constant(AxisBox::new(vec![0.0], vec![1.0]).unwrap(), 3.0)]).unwrap();
        let text = to_json(&PwExprDto::from_pw(&e).unwrap());
        let Function::Expr(back) = function_from_json("t", &text).unwrap() else { panic!() };
        assert_eq!(back.eval_nlsc(&[0.3]).unwrap(), 3.0);
        assert_eq!(to_json(&PwExprDto::from_pw(&back).unwrap()), text);
    }
}
