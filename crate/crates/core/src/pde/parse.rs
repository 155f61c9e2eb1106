//! Line-oriented parser for operator systems.
//!
//! One equation per line, `lhs = rhs`, where `rhs` is a name or a number
//! (`= 0` when omitted). `#` starts a comment. Identifiers `t`, `x`, `x1`,
//! `x2`, ... are coordinates; identifiers starting with `u`, and `p`, are
//! unknowns; every other identifier is a parameter. Derivatives are written
//! `dt(u)`, `dx1(u)`, `dxx2(u)`, `dx1x2(u)`, with `dx`/`dxx` meaning axis 1.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::expr::{Deriv, Expr, Func};
use crate::error::{Error, Result};

/// Right-hand side label of an equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    Name(String),
    Value(f64),
}

impl fmt::Display for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Name(n) => f.write_str(n),
            Rhs::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Rhs,
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Whether an identifier names an unknown function.
pub fn is_unknown(name: &str) -> bool {
    name == "p" || name.starts_with('u')
}

/// Parses `d` + derivative letters, e.g. `dxx2`, `dx1x3`, `dt`, `dtx2`.
pub fn parse_deriv_name(name: &str) -> Option<Deriv> {
    let rest = name.strip_prefix('d')?;
    if rest.is_empty() {
        return None;
    }
    let b = rest.as_bytes();
    let (mut space, mut time) = (Vec::<u32>::new(), 0u32);
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b't' => {
                time += 1;
                i += 1;
            }
            b'x' => {
                let mut run = 0;
                while i < b.len() && b[i] == b'x' {
                    run += 1;
                    i += 1;
                }
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let axis: usize = if start == i { 1 } else { rest[start..i].parse().ok()? };
                if axis == 0 {
                    return None;
                }
                if space.len() < axis {
                    space.resize(axis, 0);
                }
                space[axis - 1] += run;
            }
            _ => return None,
        }
    }
    Some(Deriv::new(space, time))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    line: usize,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str, line: usize) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, line, toks: Vec::new() };
        lx.scan()?;
        Ok(lx.toks)
    }

    fn err(&self, col: usize, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col, msg: msg.into() }
    }

    fn scan(&mut self) -> Result<()> {
        let chars: Vec<(usize, char)> = self.src.char_indices().collect();
        let col_of = |k: usize| k + 1;
        let mut k = 0;
        while k < chars.len() {
            let (pos, c) = chars[k];
            if c.is_whitespace() {
                k += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = pos;
                let mut j = k;
                let mut seen_e = false;
                while j < chars.len() {
                    let ch = chars[j].1;
                    let sign_after_e = (ch == '+' || ch == '-') && j > k && matches!(chars[j - 1].1, 'e' | 'E');
                    if ch.is_ascii_digit() || ch == '.' || sign_after_e {
                        j += 1;
                    } else if (ch == 'e' || ch == 'E') && !seen_e {
                        seen_e = true;
                        j += 1;
                    } else {
                        break;
                    }
                }
                let end = if j < chars.len() { chars[j].0 } else { self.src.len() };
                let text = &self.src[start..end];
                let v: f64 = text.parse().map_err(|_| self.err(col_of(k), format!("bad number '{text}'")))?;
                self.toks.push((Tok::Num(v), col_of(k)));
                k = j;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut j = k;
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    j += 1;
                }
                let end = if j < chars.len() { chars[j].0 } else { self.src.len() };
                self.toks.push((Tok::Ident(self.src[pos..end].to_string()), col_of(k)));
                k = j;
            } else if "+-*/^()=,".contains(c) {
                self.toks.push((Tok::Sym(c), col_of(k)));
                k += 1;
            } else {
                return Err(self.err(col_of(k), format!("unexpected character '{c}'")));
            }
        }
        self.toks.push((Tok::End, chars.len() + 1));
        Ok(())
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col(), msg: msg.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}', found {}", describe(self.peek()))))
        }
    }

    fn equation(&mut self) -> Result<Equation> {
        let lhs = self.expr()?;
        let rhs = if self.eat('=') {
            let neg = self.eat('-');
            match self.bump() {
                Tok::Num(v) => Rhs::Value(if neg { -v } else { v }),
                Tok::Ident(n) if !neg => Rhs::Name(n),
                t => {
                    self.pos -= usize::from(t != Tok::End);
                    return Err(self.err(format!("expected right-hand side, found {}", describe(&t))));
                }
            }
        } else {
            Rhs::Value(0.0)
        };
        if *self.peek() != Tok::End {
            return Err(self.err(format!("unexpected {}", describe(self.peek()))));
        }
        Ok(Equation { lhs, rhs })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(match self.unary()? {
                Expr::Num(v) => Expr::Num(-v),
                e => Expr::Neg(Box::new(e)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        while self.eat('^') {
            let neg = self.eat('-');
            match self.bump() {
                Tok::Num(v) if v == libm::trunc(v) && v <= i32::MAX as f64 => {
                    let k = v as i32;
                    base = Expr::Pow(Box::new(base), if neg { -k } else { k });
                }
                _ => {
                    self.pos -= 1;
                    return Err(self.err("exponent must be an integer"));
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let col = self.col();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::Sym('(') {
                    self.call(name, col)
                } else {
                    Ok(atom(name))
                }
            }
            t => {
                self.pos -= usize::from(t != Tok::End);
                Err(self.err(format!("expected operand, found {}", describe(&t))))
            }
        }
    }

    fn call(&mut self, name: String, col: usize) -> Result<Expr> {
        self.expect('(')?;
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                args.push(self.expr()?);
                if self.eat(')') {
                    break;
                }
                self.expect(',')?;
            }
        }
        let at = format!("line {}, col {col}", self.line);
        if let Some(f) = Func::from_name(&name) {
            if args.len() != 1 {
                return Err(Error::Arity(format!("{name} takes 1 argument, got {} ({at})", args.len())));
            }
            return Ok(Expr::Call(f, Box::new(args.pop().expect("one argument"))));
        }
        if let Some(deriv) = parse_deriv_name(&name) {
            return match args.as_slice() {
                [Expr::Jet { unknown, deriv: d }] if d.is_zero() => Ok(Expr::Jet { unknown: unknown.clone(), deriv }),
                _ => Err(Error::Arity(format!("{name} takes one unknown ({at})"))),
            };
        }
        Err(Error::UnknownFunction(format!("{name} ({at})")))
    }
}

fn atom(name: String) -> Expr {
    if name == "t" {
        return Expr::Time;
    }
    if name == "x" {
        return Expr::Coord(0);
    }
    if let Some(k) = name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
        if k >= 1 && !name[1..].starts_with('0') {
            return Expr::Coord(k - 1);
        }
    }
    if is_unknown(&name) {
        return Expr::Jet { unknown: name, deriv: Deriv::value() };
    }
    Expr::Param(name)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::End => "end of line".into(),
    }
}

/// Parses one expression (no `=`), e.g. a right-hand side or initial datum.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: Lexer::run(text, 1)?, pos: 0, line: 1 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(format!("unexpected {}", describe(p.peek()))));
    }
    Ok(e)
}

/// Parses a whole system, one equation per non-blank line.
pub fn parse_equations(text: &str) -> Result<Vec<Equation>> {
    let mut out = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let mut p = Parser { toks: Lexer::run(line, i + 1)?, pos: 0, line: i + 1 };
        out.push(p.equation()?);
    }
    if out.is_empty() {
        return Err(Error::Syntax { line: 1, col: 1, msg: "no equations".into() });
    }
    Ok(out)
}
