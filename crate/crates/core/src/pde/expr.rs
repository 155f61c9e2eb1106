//! Operator expressions: syntax tree, printing and generic evaluation.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::geom::MultiIndex;
use crate::poly::Poly;

/// Elementary functions of one argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

/// Derivative orders: one entry per spatial axis (trailing zeros trimmed)
/// plus the order in time.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Deriv {
    space: Vec<u32>,
    time: u32,
}

impl Deriv {
    pub fn new(mut space: Vec<u32>, time: u32) -> Self {
        while space.last() == Some(&0) {
            space.pop();
        }
        Deriv { space, time }
    }

    pub fn value() -> Self {
        Deriv::default()
    }

    pub fn space(&self) -> &[u32] {
        &self.space
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    pub fn is_zero(&self) -> bool {
        self.space.is_empty() && self.time == 0
    }

    pub fn order(&self) -> u32 {
        self.space.iter().sum::<u32>() + self.time
    }

    /// Number of spatial axes this derivative needs.
    pub fn space_dim(&self) -> usize {
        self.space.len()
    }

    /// As a multi-index over `n_space` spatial axes followed, when
    /// `has_time`, by the time axis.
    pub fn to_multi_index(&self, n_space: usize, has_time: bool) -> Option<MultiIndex> {
        if self.space.len() > n_space || (self.time > 0 && !has_time) {
            return None;
        }
        let mut o = self.space.clone();
        o.resize(n_space, 0);
        if has_time {
            o.push(self.time);
        }
        Some(MultiIndex::new(o))
    }

    /// Inverse of [`Deriv::to_multi_index`].
    pub fn from_multi_index(alpha: &MultiIndex, has_time: bool) -> Self {
        let o = alpha.orders();
        if has_time {
            let (s, t) = o.split_at(o.len() - 1);
            Deriv::new(s.to_vec(), t[0])
        } else {
            Deriv::new(o.to_vec(), 0)
        }
    }
}

/// Operator expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Param(String),
    /// Spatial coordinate `x_{k+1}`.
    Coord(usize),
    Time,
    Jet {
        unknown: String,
        deriv: Deriv,
    },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn jet(unknown: &str, deriv: Deriv) -> Expr {
        Expr::Jet { unknown: unknown.into(), deriv }
    }

    pub fn param(name: &str) -> Expr {
        Expr::Param(name.into())
    }

    /// Visits every node, parents first.
    pub fn walk(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.walk(f),
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() && *v != 0.0 => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    /// Converts an expression in the coordinates (and bound parameters) into
    /// a polynomial on `n_space` (+1 when `has_time`) axes. Returns `None`
    /// when the expression is not polynomial.
    pub fn to_poly(&self, n_space: usize, has_time: bool, params: &dyn Fn(&str) -> Option<f64>) -> Option<Poly> {
        let dim = n_space + has_time as usize;
        let center = vec![0.0; dim];
        let konst = |c: f64| Poly::constant(center.clone(), c, 0);
        let var = |axis: usize| {
            let mut m = BTreeMap::new();
            m.insert(MultiIndex::axis(dim, axis, 1), 1.0);
            Poly::new(center.clone(), m, 1).ok()
        };
        let rec = |e: &Expr| e.to_poly(n_space, has_time, params);
        match self {
            Expr::Num(v) => Some(konst(*v)),
            Expr::Param(p) => params(p).map(konst),
            Expr::Coord(k) if *k < n_space => var(*k),
            Expr::Time if has_time => var(n_space),
            Expr::Add(a, b) => rec(a)?.add(&rec(b)?).ok(),
            Expr::Sub(a, b) => rec(a)?.add(&rec(b)?.scale(-1.0)).ok(),
            Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?).ok(),
            Expr::Div(a, b) => {
                let d = rec(b)?;
                if d.effective_degree() != 0 {
                    return None;
                }
                let c = d.eval(&center);
                if c == 0.0 {
                    return None;
                }
                Some(rec(a)?.scale(1.0 / c))
            }
            Expr::Neg(a) => Some(rec(a)?.scale(-1.0)),
            Expr::Pow(a, k) if *k >= 0 => {
                let base = rec(a)?;
                let mut acc = konst(1.0);
                for _ in 0..*k {
                    acc = acc.mul(&base).ok()?;
                }
                Some(acc)
            }
            _ => None,
        }
        .map(|p| {
            let d = p.effective_degree();
            p.with_degree(d).expect("effective degree always fits")
        })
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_deriv(f: &mut fmt::Formatter<'_>, unknown: &str, d: &Deriv) -> fmt::Result {
    if d.is_zero() {
        return f.write_str(unknown);
    }
    f.write_str("d")?;
    for (k, o) in d.space.iter().enumerate() {
        for _ in 0..*o {
            f.write_str("x")?;
        }
        if *o > 0 {
            write!(f, "{}", k + 1)?;
        }
    }
    for _ in 0..d.time {
        f.write_str("t")?;
    }
    write!(f, "({unknown})")
}

/// Prints in the syntax accepted by the parser, with the fewest
/// parentheses that keep the tree shape.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, op: &str, b: &Expr| {
            let p = self.precedence();
            write_operand(f, a, a.precedence() < p)?;
            write!(f, " {op} ")?;
            write_operand(f, b, b.precedence() <= p)
        };
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Param(p) => f.write_str(p),
            Expr::Coord(k) => write!(f, "x{}", k + 1),
            Expr::Time => f.write_str("t"),
            Expr::Jet { unknown, deriv } => write_deriv(f, unknown, deriv),
            Expr::Add(a, b) => binary(f, a, "+", b),
            Expr::Sub(a, b) => binary(f, a, "-", b),
            Expr::Mul(a, b) => binary(f, a, "*", b),
            Expr::Div(a, b) => binary(f, a, "/", b),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, a.precedence() < 3)
            }
            Expr::Pow(a, k) => {
                write_operand(f, a, a.precedence() < 4)?;
                write!(f, "^{k}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// Number type the expressions are evaluated in.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(self) -> f64;
    fn apply(self, f: Func) -> Self;

    fn powi(self, k: i32) -> Self {
        let mut acc = Self::from_f64(1.0);
        for _ in 0..k.unsigned_abs() {
            acc = acc * self;
        }
        if k < 0 {
            Self::from_f64(1.0) / acc
        } else {
            acc
        }
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }

    fn value(self) -> f64 {
        self
    }

    fn apply(self, f: Func) -> Self {
        match f {
            Func::Sin => libm::sin(self),
            Func::Cos => libm::cos(self),
            Func::Exp => libm::exp(self),
            Func::Abs => libm::fabs(self),
        }
    }
}

/// Forward-mode dual number `v + d·ε`, `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn new(v: f64, d: f64) -> Self {
        Dual { v, d }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.v * o.v, self.d * o.v + self.v * o.d)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual::new(self.v / o.v, (self.d * o.v - self.v * o.d) / (o.v * o.v))
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.v, -self.d)
    }
}

impl Scalar for Dual {
    fn from_f64(v: f64) -> Self {
        Dual::new(v, 0.0)
    }

    fn value(self) -> f64 {
        self.v
    }

    fn apply(self, f: Func) -> Self {
        let v = self.v.apply(f);
        let dv = match f {
            Func::Sin => libm::cos(self.v),
            Func::Cos => -libm::sin(self.v),
            Func::Exp => v,
            // one-sided choice at the kink
            Func::Abs => {
                if self.v < 0.0 {
                    -1.0
                } else {
                    1.0
                }
            }
        };
        Dual::new(v, dv * self.d)
    }
}
