//! A small expression language for parametrizations.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := ('-' | '+') unary | power
//! power    := base ('^' exponent)?
//! exponent := ('-' | '+')? base
//! base     := number | name | '(' expr ')' | func '(' expr ')'
//! func     := exp | log | sin | cos | sqrt
//! ```
//!
//! Names are `x`, `y`, `z` or `x1`, `x2`, ... (one-based) and `pi`.
//! Numbers are decimals (`0.25`, `1e-3`), read exactly; a quotient of two
//! constants is folded into a rational constant, as is a negated constant.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::combin::{multi_factorial, multi_indices};
use crate::error::{Error, Result};
use crate::heights::RealAlgebraic;
use crate::interval::Interval;
use crate::multipoly::MultiPoly;

/// Highest supported jet order.
pub const JET_ORDER_CAP: u32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exponent {
    Rational(Rational),
    /// A real algebraic exponent such as `sqrt(2)`.
    Algebraic(RealAlgebraic),
    Expr(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Rational),
    Pi,
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Call(Func, Box<Expr>),
}

// ---------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Name(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = col;
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token {
                tok,
                line,
                column: start,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let j0 = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[j0..i].iter().collect();
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let f0 = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                frac = chars[f0..i].iter().collect();
            }
            if int_part.is_empty() && frac.is_empty() {
                return Err(syntax(line, start, "malformed number"));
            }
            let mut exp10: i64 = 0;
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut k = i + 1;
                let mut neg = false;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    neg = chars[k] == '-';
                    k += 1;
                }
                let e0 = k;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
                if k > e0 {
                    let s: String = chars[e0..k].iter().collect();
                    let v: i64 = s
                        .parse()
                        .map_err(|_| syntax(line, start, "exponent too large"))?;
                    if v > 10_000 {
                        return Err(syntax(line, start, "exponent too large"));
                    }
                    exp10 = if neg { -v } else { v };
                    i = k;
                }
            }
            let digits = format!("{int_part}{frac}");
            let mantissa: Integer = digits.parse().expect("digit string");
            let scale = exp10 - frac.len() as i64;
            let p = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs() as u32));
            let q = if scale >= 0 {
                Rational::from(mantissa * p)
            } else {
                Rational::from((mantissa, p))
            };
            col += i - j0;
            out.push(Token {
                tok: Tok::Num(q),
                line,
                column: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let j0 = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - j0;
            out.push(Token {
                tok: Tok::Name(chars[j0..i].iter().collect()),
                line,
                column: start,
            });
            continue;
        }
        return Err(syntax(line, start, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

// --------------------------------------------------------------- parsing

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    arity: Option<usize>,
}

fn var_index(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => {
            let rest = name.strip_prefix('x')?;
            if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            rest.parse::<usize>().ok().map(|k| k - 1)
        }
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(syntax(t.line, t.column, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.next();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    let at = self.next();
                    let rhs = self.unary()?;
                    lhs = match (lhs, rhs) {
                        (Expr::Const(a), Expr::Const(b)) => {
                            if b == 0 {
                                return Err(syntax(at.line, at.column, "division by zero"));
                            }
                            Expr::Const(a / b)
                        }
                        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
                    };
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek().tok {
            Tok::Minus => {
                self.next();
                Ok(match self.unary()? {
                    Expr::Const(q) => Expr::Const(-q),
                    e => Expr::Neg(Box::new(e)),
                })
            }
            Tok::Plus => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.next();
        let ex = match self.peek().tok {
            Tok::Minus => {
                self.next();
                match self.base()? {
                    Expr::Const(q) => Expr::Const(-q),
                    e => Expr::Neg(Box::new(e)),
                }
            }
            Tok::Plus => {
                self.next();
                self.base()?
            }
            _ => self.base()?,
        };
        Ok(Expr::Pow(Box::new(base), classify_exponent(ex)?))
    }

    fn base(&mut self) -> Result<Expr> {
        let t = self.next();
        match t.tok {
            Tok::Num(q) => Ok(Expr::Const(q)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Name(name) => {
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                match var_index(&name) {
                    Some(j) if self.arity.is_none_or(|a| j < a) => Ok(Expr::Var(j)),
                    _ => Err(Error::Arity {
                        name,
                        arity: self.arity.unwrap_or(0),
                    }),
                }
            }
            Tok::End => Err(syntax(t.line, t.column, "unexpected end of input")),
            _ => Err(syntax(t.line, t.column, "expected a number, name or `(`")),
        }
    }
}

/// Exact value of a variable-free expression built from rationals.
fn const_value(e: &Expr) -> Option<Rational> {
    Some(match e {
        Expr::Const(q) => q.clone(),
        Expr::Neg(a) => -const_value(a)?,
        Expr::Add(a, b) => const_value(a)? + const_value(b)?,
        Expr::Sub(a, b) => const_value(a)? - const_value(b)?,
        Expr::Mul(a, b) => const_value(a)? * const_value(b)?,
        Expr::Div(a, b) => {
            let d = const_value(b)?;
            if d == 0 {
                return None;
            }
            const_value(a)? / d
        }
        Expr::Pow(a, Exponent::Rational(k)) if *k.denom() == 1 => {
            let b = const_value(a)?;
            let n = k.numer().to_i32()?;
            if b == 0 && n < 0 {
                return None;
            }
            let m = n.unsigned_abs();
            let v = Rational::from((
                b.numer().clone().pow(m),
                b.denom().clone().pow(m),
            ));
            if n < 0 {
                v.recip()
            } else {
                v
            }
        }
        _ => return None,
    })
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if *q < 0 {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    if n.is_perfect_square() && d.is_perfect_square() {
        Some(Rational::from((
            Integer::from(n.sqrt_ref()),
            Integer::from(d.sqrt_ref()),
        )))
    } else {
        None
    }
}

fn surd(q: &Rational, negative: bool) -> Result<Exponent> {
    if let Some(r) = rational_sqrt(q) {
        return Ok(Exponent::Rational(if negative { -r } else { r }));
    }
    let s = RealAlgebraic::sqrt(q)?;
    Ok(Exponent::Algebraic(if negative { neg_algebraic(&s) } else { s }))
}

fn neg_algebraic(a: &RealAlgebraic) -> RealAlgebraic {
    let p = a.minpoly().reflect();
    let target = -a.enclosure(128).mid_rational();
    RealAlgebraic::root_near(&p, &target).expect("reflected polynomial has the negated root")
}

fn classify_exponent(e: Expr) -> Result<Exponent> {
    if let Some(q) = const_value(&e) {
        return Ok(Exponent::Rational(q));
    }
    match &e {
        Expr::Call(Func::Sqrt, a) => {
            if let Some(q) = const_value(a) {
                if q < 0 {
                    return Err(Error::DomainViolation("sqrt of a negative constant".into()));
                }
                return surd(&q, false);
            }
        }
        Expr::Neg(inner) => {
            if let Expr::Call(Func::Sqrt, a) = inner.as_ref() {
                if let Some(q) = const_value(a) {
                    if q >= 0 {
                        return surd(&q, true);
                    }
                }
            }
        }
        _ => {}
    }
    Ok(Exponent::Expr(Box::new(e)))
}

/// Parses an expression, inferring the arity from the variables used.
pub fn parse(src: &str) -> Result<Expr> {
    parse_inner(src, None)
}

/// Parses an expression in at most `arity` variables.
pub fn parse_with_arity(src: &str, arity: usize) -> Result<Expr> {
    parse_inner(src, Some(arity))
}

fn parse_inner(src: &str, arity: Option<usize>) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, arity };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.line, t.column, "unexpected trailing input"));
    }
    Ok(e)
}

// -------------------------------------------------------------- printing

fn const_prec(q: &Rational) -> u8 {
    if *q.denom() != 1 {
        2
    } else if *q < 0 {
        3
    } else {
        5
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Const(q) => const_prec(q),
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Pi | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    /// One more than the largest variable index used.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Pi => 0,
            Expr::Var(j) => j + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
            Expr::Pow(a, Exponent::Expr(b)) => a.arity().max(b.arity()),
            Expr::Pow(a, _) => a.arity(),
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, wide: bool, min: u8) -> fmt::Result {
        let paren = self.prec() < min;
        if paren {
            write!(f, "(")?;
        }
        let name = |j: usize| {
            if wide {
                format!("x{}", j + 1)
            } else {
                ["x", "y", "z"][j].to_string()
            }
        };
        match self {
            Expr::Const(q) => write!(f, "{q}")?,
            Expr::Pi => write!(f, "pi")?,
            Expr::Var(j) => write!(f, "{}", name(*j))?,
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write(f, wide, 3)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write(f, wide, 1)?;
                write!(f, " {} ", if matches!(self, Expr::Add(..)) { "+" } else { "-" })?;
                b.write(f, wide, 2)?;
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write(f, wide, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                b.write(f, wide, 3)?;
            }
            Expr::Pow(a, e) => {
                a.write(f, wide, 5)?;
                write!(f, "^")?;
                match e {
                    Exponent::Rational(q) if const_prec(q) == 5 => write!(f, "{q}")?,
                    Exponent::Rational(q) => write!(f, "({q})")?,
                    Exponent::Algebraic(a) => write!(f, "{}", surd_text(a))?,
                    Exponent::Expr(b) => {
                        write!(f, "(")?;
                        b.write(f, wide, 0)?;
                        write!(f, ")")?;
                    }
                }
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, wide, 0)?;
                write!(f, ")")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

// Quadratic surds `±sqrt(c)` print in source form; anything else falls back
// to a 60-bit dyadic approximation.
fn surd_text(a: &RealAlgebraic) -> String {
    let p = a.minpoly();
    if p.deg() == 2 && p.coeff(1) == 0 {
        let c = Rational::from((-p.coeff(0), p.coeff(2)));
        if a.sign() == std::cmp::Ordering::Less {
            format!("(-sqrt({c}))")
        } else {
            format!("sqrt({c})")
        }
    } else {
        format!("({})", a.refined(60).enclosure(128).mid_rational())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.arity() > 3, 0)
    }
}

// ------------------------------------------------------------------ boxes

/// A closed axis-parallel box with rational corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    #[serde(with = "crate::serde_util::rational_vec")]
    lo: Vec<Rational>,
    #[serde(with = "crate::serde_util::rational_vec")]
    hi: Vec<Rational>,
}

impl Domain {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Invalid("box corners differ in dimension".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Invalid("empty box".into()));
        }
        Ok(Domain { lo, hi })
    }

    /// `[0,1]^k`.
    pub fn unit(k: usize) -> Self {
        Domain {
            lo: vec![Rational::new(); k],
            hi: vec![Rational::from(1); k],
        }
    }

    pub fn from_pairs(pairs: &[(Rational, Rational)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.0.clone()).collect(),
            pairs.iter().map(|p| p.1.clone()).collect(),
        )
    }

    pub fn point(x: &[Rational]) -> Self {
        Domain {
            lo: x.to_vec(),
            hi: x.to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn intervals(&self, prec: u32) -> Vec<Interval> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| Interval::from_rationals(prec, a, b))
            .collect()
    }

    pub fn mid(&self) -> Vec<Rational> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| Rational::from(a + b) / 2u32)
            .collect()
    }

    pub fn width(&self, j: usize) -> Rational {
        Rational::from(&self.hi[j] - &self.lo[j])
    }

    pub fn widest(&self) -> usize {
        (0..self.dim())
            .max_by(|&a, &b| self.width(a).cmp(&self.width(b)).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim() && x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn bisect(&self, j: usize) -> (Domain, Domain) {
        let m = Rational::from(&self.lo[j] + &self.hi[j]) / 2u32;
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[j] = m.clone();
        right.lo[j] = m;
        (left, right)
    }

    /// The intersection with another box, if nonempty.
    pub fn intersect(&self, o: &Domain) -> Option<Domain> {
        let lo: Vec<Rational> = self.lo.iter().zip(&o.lo).map(|(a, b)| a.max(b).clone()).collect();
        let hi: Vec<Rational> = self.hi.iter().zip(&o.hi).map(|(a, b)| a.min(b).clone()).collect();
        Domain::new(lo, hi).ok()
    }

    /// A uniform grid of `n^dim` sub-boxes, first coordinate slowest.
    pub fn grid(&self, n: usize) -> Vec<Domain> {
        let n = n.max(1);
        let mut out = vec![self.clone()];
        for j in 0..self.dim() {
            let w = self.width(j) / n as u32;
            let mut next = Vec::with_capacity(out.len() * n);
            for b in &out {
                for i in 0..n {
                    let mut c = b.clone();
                    c.lo[j] = Rational::from(&self.lo[j] + Rational::from(&w * i as u32));
                    c.hi[j] = if i + 1 == n {
                        self.hi[j].clone()
                    } else {
                        Rational::from(&self.lo[j] + Rational::from(&w * (i as u32 + 1)))
                    };
                    next.push(c);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.dim() {
            if j > 0 {
                write!(f, " x ")?;
            }
            write!(f, "[{}, {}]", self.lo[j], self.hi[j])?;
        }
        Ok(())
    }
}

// ------------------------------------------------------ interval evaluation

fn domain_err(what: &str) -> Error {
    Error::DomainViolation(what.to_string())
}

fn algebraic_enclosure(a: &RealAlgebraic, prec: u32) -> Interval {
    a.refined(prec + 8).enclosure(prec)
}

impl Expr {
    /// Enclosure of the range over a box given as intervals.
    ///
    /// Where a denominator vanishes only on the boundary of the box the
    /// result encloses the closure of the range over the rest of the box,
    /// provided that is bounded.
    pub fn eval_intervals(&self, x: &[Interval]) -> Result<Interval> {
        let prec = x.iter().map(Interval::prec).max().unwrap_or(128);
        let v = self.ev(x, prec)?;
        if !v.is_finite() {
            return Err(domain_err("unbounded on the box"));
        }
        Ok(v)
    }

    fn ev(&self, x: &[Interval], prec: u32) -> Result<Interval> {
        let v = self.ev_node(x, prec)?;
        if v.has_nan() {
            return Err(domain_err("indeterminate form on the box"));
        }
        Ok(v)
    }

    fn ev_node(&self, x: &[Interval], prec: u32) -> Result<Interval> {
        Ok(match self {
            Expr::Const(q) => Interval::point(prec, q),
            Expr::Pi => Interval::pi(prec),
            Expr::Var(j) => x
                .get(*j)
                .cloned()
                .ok_or_else(|| Error::Arity {
                    name: format!("x{}", j + 1),
                    arity: x.len(),
                })?,
            Expr::Neg(a) => a.ev(x, prec)?.neg(),
            Expr::Add(a, b) => a.ev(x, prec)?.add(&b.ev(x, prec)?),
            Expr::Sub(a, b) => a.ev(x, prec)?.sub(&b.ev(x, prec)?),
            Expr::Mul(a, b) => {
                let (u, v) = (a.ev(x, prec)?, b.ev(x, prec)?);
                if a == b {
                    u.sqr()
                } else {
                    u.mul(&v)
                }
            }
            Expr::Div(a, b) => {
                let (u, v) = (a.ev(x, prec)?, b.ev(x, prec)?);
                match u.div(&v) {
                    Some(w) => w,
                    // Zero on the boundary of the denominator: the quotient
                    // is a half-line, which later operations (exp, say) may
                    // bring back to a finite closure enclosure.
                    None if !u.contains_zero() => u.mul(
                        &v.recip_extended()
                            .ok_or_else(|| domain_err("denominator interval contains 0"))?,
                    ),
                    None => return Err(domain_err("denominator interval contains 0")),
                }
            }
            Expr::Pow(a, e) => {
                let base = a.ev(x, prec)?;
                match e {
                    Exponent::Rational(q) if *q.denom() == 1 => {
                        let n = q
                            .numer()
                            .to_i64()
                            .ok_or_else(|| Error::Invalid("integer exponent too large".into()))?;
                        base.powi(n)
                            .ok_or_else(|| domain_err("negative power of an interval containing 0"))?
                    }
                    Exponent::Rational(q) => base
                        .pow(&Interval::point(prec, q))
                        .ok_or_else(|| domain_err("fractional power of a non-positive base"))?,
                    Exponent::Algebraic(c) => base
                        .pow(&algebraic_enclosure(c, prec))
                        .ok_or_else(|| domain_err("real power of a non-positive base"))?,
                    Exponent::Expr(c) => {
                        let l = base
                            .ln()
                            .ok_or_else(|| domain_err("real power of a non-positive base"))?;
                        l.mul(&c.ev(x, prec)?).exp()
                    }
                }
            }
            Expr::Call(f, a) => {
                let v = a.ev(x, prec)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => v.ln().ok_or_else(|| domain_err("log of a non-positive interval"))?,
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => v.sqrt().ok_or_else(|| domain_err("sqrt of a negative interval"))?,
                }
            }
        })
    }

    /// Value at a rational point, enclosed at `prec` bits.
    pub fn eval_point(&self, x: &[Rational], prec: u32) -> Result<Interval> {
        let xs: Vec<Interval> = x.iter().map(|q| Interval::point(prec, q)).collect();
        self.eval_intervals(&xs)
    }
}

impl Expr {
    /// Plain floating-point value; NaN outside the domain.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(q) => q.to_f64(),
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(j) => x.get(*j).copied().unwrap_or(f64::NAN),
            Expr::Neg(a) => -a.eval_f64(x),
            Expr::Add(a, b) => a.eval_f64(x) + b.eval_f64(x),
            Expr::Sub(a, b) => a.eval_f64(x) - b.eval_f64(x),
            Expr::Mul(a, b) => a.eval_f64(x) * b.eval_f64(x),
            Expr::Div(a, b) => a.eval_f64(x) / b.eval_f64(x),
            Expr::Pow(a, e) => {
                let v = a.eval_f64(x);
                match e {
                    Exponent::Rational(q) if *q.denom() == 1 => v.powi(q.numer().to_i32().unwrap_or(i32::MAX)),
                    Exponent::Rational(q) => v.powf(q.to_f64()),
                    Exponent::Algebraic(c) => v.powf(c.to_f64()),
                    Exponent::Expr(c) => v.powf(c.eval_f64(x)),
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval_f64(x);
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => v.ln(),
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    /// The expression as a polynomial with integer coefficients in `nvars`
    /// variables, after clearing denominators; `None` unless it is built
    /// from constants, variables, `+ - *`, division by constants and
    /// non-negative integer powers.
    pub fn to_polynomial(&self, nvars: usize) -> Option<MultiPoly> {
        let terms = self.poly_terms(nvars)?;
        let mut l = Integer::from(1);
        for c in terms.values() {
            l.lcm_mut(c.denom());
        }
        Some(MultiPoly::from_terms(
            nvars,
            terms.into_iter().map(|(e, c)| (e, Rational::from(c * &l).numer().clone())),
        ))
    }

    fn poly_terms(&self, n: usize) -> Option<BTreeMap<Vec<u32>, Rational>> {
        let constant = |q: Rational| {
            let mut m = BTreeMap::new();
            if q != 0 {
                m.insert(vec![0; n], q);
            }
            m
        };
        let add = |mut a: BTreeMap<Vec<u32>, Rational>, b: BTreeMap<Vec<u32>, Rational>, sign: i32| {
            for (e, c) in b {
                let v = a.entry(e.clone()).or_insert_with(Rational::new);
                *v += c * sign;
                if *v == 0 {
                    a.remove(&e);
                }
            }
            a
        };
        let mul = |a: &BTreeMap<Vec<u32>, Rational>, b: &BTreeMap<Vec<u32>, Rational>| {
            let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
            for (e1, c1) in a {
                for (e2, c2) in b {
                    let e: Vec<u32> = e1.iter().zip(e2).map(|(u, v)| u + v).collect();
                    *out.entry(e).or_insert_with(Rational::new) += Rational::from(c1 * c2);
                }
            }
            out.retain(|_, c| *c != 0);
            out
        };
        Some(match self {
            Expr::Const(q) => constant(q.clone()),
            Expr::Var(j) if *j < n => {
                let mut e = vec![0; n];
                e[*j] = 1;
                let mut m = BTreeMap::new();
                m.insert(e, Rational::from(1));
                m
            }
            Expr::Neg(a) => add(BTreeMap::new(), a.poly_terms(n)?, -1),
            Expr::Add(a, b) => add(a.poly_terms(n)?, b.poly_terms(n)?, 1),
            Expr::Sub(a, b) => add(a.poly_terms(n)?, b.poly_terms(n)?, -1),
            Expr::Mul(a, b) => mul(&a.poly_terms(n)?, &b.poly_terms(n)?),
            Expr::Div(a, b) => match &**b {
                Expr::Const(q) if *q != 0 => {
                    let inv = constant(Rational::from(q.recip_ref()));
                    mul(&a.poly_terms(n)?, &inv)
                }
                _ => return None,
            },
            Expr::Pow(a, Exponent::Rational(q)) if *q.denom() == 1 && *q >= 0 => {
                let k = q.numer().to_u32()?;
                let base = a.poly_terms(n)?;
                let mut acc = constant(Rational::from(1));
                for _ in 0..k {
                    acc = mul(&acc, &base);
                }
                acc
            }
            _ => return None,
        })
    }
}

/// Enclosure of the range of `f` on `dom`.
pub fn eval_interval(f: &Expr, dom: &Domain, prec: u32) -> Result<Interval> {
    f.eval_intervals(&dom.intervals(prec))
}

// ----------------------------------------------------------------- jets

/// Index bookkeeping shared by all jets with the same shape. A jet of
/// order `b` in `k` variables stores `D_k(b) = C(k+b, k)` enclosures.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    order: u32,
    indices: Vec<Vec<u32>>,
    lookup: HashMap<Vec<u32>, usize>,
    // (i, j, i+j) for all pairs whose product stays within the order.
    products: Vec<(u32, u32, u32)>,
}

impl JetSpace {
    pub fn new(nvars: usize, order: u32) -> Result<Arc<Self>> {
        if order > JET_ORDER_CAP {
            return Err(Error::Invalid(format!(
                "jet order {order} exceeds the cap {JET_ORDER_CAP}"
            )));
        }
        let indices = multi_indices(nvars, order as usize);
        let lookup: HashMap<Vec<u32>, usize> =
            indices.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        let degrees: Vec<u32> = indices.iter().map(|a| a.iter().sum()).collect();
        let mut products = Vec::new();
        for (i, a) in indices.iter().enumerate() {
            for (j, b) in indices.iter().enumerate() {
                if degrees[i] + degrees[j] > order {
                    continue;
                }
                let s: Vec<u32> = a.iter().zip(b).map(|(u, v)| u + v).collect();
                products.push((i as u32, j as u32, lookup[&s] as u32));
            }
        }
        Ok(Arc::new(JetSpace {
            nvars,
            order,
            indices,
            lookup,
            products,
        }))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }
}

/// Truncated Taylor expansion: coefficient `α` encloses `∂^α f / α!`.
#[derive(Clone, Debug)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<Interval>,
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, c: Interval) -> Jet {
        let mut coeffs = vec![Interval::zero(c.prec()); space.len()];
        coeffs[0] = c;
        Jet {
            space: space.clone(),
            coeffs,
        }
    }

    /// The coordinate function `z_j` expanded around `center`.
    pub fn var(space: &Arc<JetSpace>, j: usize, center: Interval) -> Jet {
        let prec = center.prec();
        let mut jet = Jet::constant(space, center);
        if space.order > 0 {
            let mut e = vec![0u32; space.nvars];
            e[j] = 1;
            jet.coeffs[space.lookup[&e]] = Interval::one(prec);
        }
        jet
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &[u32]) -> Option<&Interval> {
        self.space.position(alpha).map(|i| &self.coeffs[i])
    }

    pub fn value(&self) -> &Interval {
        &self.coeffs[0]
    }

    fn prec(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(Interval::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Interval) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|a| a.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let prec = self.prec();
        let mut coeffs = vec![Interval::zero(prec); self.coeffs.len()];
        for &(i, j, t) in &self.space.products {
            let (a, b) = (&self.coeffs[i as usize], &o.coeffs[j as usize]);
            if a.is_zero_point() || b.is_zero_point() {
                continue;
            }
            coeffs[t as usize] = coeffs[t as usize].add(&a.mul(b));
        }
        Jet {
            space: self.space.clone(),
            coeffs,
        }
    }

    pub fn powi(&self, n: u32) -> Jet {
        let mut acc = Jet::constant(&self.space, Interval::one(self.prec()));
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `Σ_m c_m h^m` where `h` is this jet minus its constant term, i.e. the
    /// composition `g ∘ self` given the scaled derivatives `c_m = g^(m)/m!`
    /// at the constant term.
    fn compose(&self, c: &[Interval]) -> Jet {
        let mut h = self.clone();
        h.coeffs[0] = Interval::zero(self.prec());
        let top = c.len() - 1;
        let mut acc = Jet::constant(&self.space, c[top].clone());
        for m in (0..top).rev() {
            acc = acc.mul(&h);
            acc.coeffs[0] = acc.coeffs[0].add(&c[m]);
        }
        acc
    }

    fn order(&self) -> usize {
        self.space.order as usize
    }

    pub fn exp(&self) -> Jet {
        let prec = self.prec();
        let e0 = self.coeffs[0].exp();
        let mut c = Vec::with_capacity(self.order() + 1);
        let mut cur = e0;
        for m in 0..=self.order() {
            if m > 0 {
                cur = cur.div(&Interval::from_int(prec, m as i64)).expect("m > 0");
            }
            c.push(cur.clone());
        }
        self.compose(&c)
    }

    pub fn ln(&self) -> Result<Jet> {
        let prec = self.prec();
        let g0 = &self.coeffs[0];
        let l0 = g0.ln().ok_or_else(|| domain_err("log of a non-positive value"))?;
        let inv = g0.recip().expect("positive");
        let mut c = vec![l0];
        let mut p = Interval::one(prec);
        for m in 1..=self.order() {
            p = p.mul(&inv);
            let t = p.div(&Interval::from_int(prec, m as i64)).expect("m > 0");
            c.push(if m % 2 == 1 { t } else { t.neg() });
        }
        Ok(self.compose(&c))
    }

    fn trig(&self, is_sin: bool) -> Jet {
        let prec = self.prec();
        let g0 = &self.coeffs[0];
        let (s, co) = (g0.sin(), g0.cos());
        // Derivative cycle of sin: sin, cos, -sin, -cos; cos starts one later.
        let cycle = [s.clone(), co.clone(), s.neg(), co.neg()];
        let shift = if is_sin { 0 } else { 1 };
        let mut c = Vec::with_capacity(self.order() + 1);
        let mut fact = Interval::one(prec);
        for m in 0..=self.order() {
            if m > 0 {
                fact = fact.mul_int(m as i64);
            }
            c.push(cycle[(m + shift) % 4].div(&fact).expect("factorial > 0"));
        }
        self.compose(&c)
    }

    pub fn sin(&self) -> Jet {
        self.trig(true)
    }

    pub fn cos(&self) -> Jet {
        self.trig(false)
    }

    pub fn recip(&self) -> Result<Jet> {
        let g0 = &self.coeffs[0];
        let inv = g0
            .recip()
            .ok_or_else(|| domain_err("reciprocal of a value containing 0"))?;
        let mut c = vec![inv.clone()];
        for _ in 1..=self.order() {
            let last = c.last().expect("nonempty").clone();
            c.push(last.mul(&inv).neg());
        }
        Ok(self.compose(&c))
    }

    pub fn div(&self, o: &Jet) -> Result<Jet> {
        Ok(self.mul(&o.recip()?))
    }

    /// `self^c` for a real exponent enclosure; the constant term must be
    /// positive.
    pub fn pow_real(&self, c: &Interval) -> Result<Jet> {
        let prec = self.prec();
        let g0 = &self.coeffs[0];
        if !g0.is_positive() {
            return Err(domain_err("real power of a base not certified positive"));
        }
        let inv = g0.recip().expect("positive");
        let mut out = vec![g0.pow(c).expect("positive base")];
        for m in 1..=self.order() {
            // binom(c, m) g0^(c-m) from the previous term.
            let k = c.sub(&Interval::from_int(prec, m as i64 - 1));
            let t = out[m - 1]
                .mul(&k)
                .mul(&inv)
                .div(&Interval::from_int(prec, m as i64))
                .expect("m > 0");
            out.push(t);
        }
        Ok(self.compose(&out))
    }
}

impl Interval {
    fn is_zero_point(&self) -> bool {
        self.lo() == &0 && self.hi() == &0
    }
}

impl Expr {
    /// Jet of the expression with each variable expanded around the given
    /// (possibly wide) enclosure.
    pub fn jet(&self, space: &Arc<JetSpace>, center: &[Interval]) -> Result<Jet> {
        let prec = center.iter().map(Interval::prec).max().unwrap_or(128);
        Ok(match self {
            Expr::Const(q) => Jet::constant(space, Interval::point(prec, q)),
            Expr::Pi => Jet::constant(space, Interval::pi(prec)),
            Expr::Var(j) => {
                let c = center.get(*j).ok_or_else(|| Error::Arity {
                    name: format!("x{}", j + 1),
                    arity: center.len(),
                })?;
                Jet::var(space, *j, c.clone())
            }
            Expr::Neg(a) => a.jet(space, center)?.neg(),
            Expr::Add(a, b) => a.jet(space, center)?.add(&b.jet(space, center)?),
            Expr::Sub(a, b) => a.jet(space, center)?.sub(&b.jet(space, center)?),
            Expr::Mul(a, b) => a.jet(space, center)?.mul(&b.jet(space, center)?),
            Expr::Div(a, b) => a.jet(space, center)?.div(&b.jet(space, center)?)?,
            Expr::Pow(a, e) => {
                let g = a.jet(space, center)?;
                match e {
                    Exponent::Rational(q) if *q.denom() == 1 => {
                        let n = q
                            .numer()
                            .to_i32()
                            .ok_or_else(|| Error::Invalid("integer exponent too large".into()))?;
                        if n >= 0 {
                            g.powi(n as u32)
                        } else {
                            g.recip()?.powi(n.unsigned_abs())
                        }
                    }
                    Exponent::Rational(q) => g.pow_real(&Interval::point(prec, q))?,
                    Exponent::Algebraic(c) => g.pow_real(&algebraic_enclosure(c, prec))?,
                    Exponent::Expr(c) => g.ln()?.mul(&c.jet(space, center)?).exp(),
                }
            }
            Expr::Call(f, a) => {
                let g = a.jet(space, center)?;
                match f {
                    Func::Exp => g.exp(),
                    Func::Log => g.ln()?,
                    Func::Sin => g.sin(),
                    Func::Cos => g.cos(),
                    Func::Sqrt => g.pow_real(&Interval::point(prec, &Rational::from((1, 2))))?,
                }
            }
        })
    }
}

/// Jet of `f` at a rational point, truncated at `order`.
pub fn eval_jet(f: &Expr, center: &[Rational], order: u32, prec: u32) -> Result<Jet> {
    let space = JetSpace::new(center.len(), order)?;
    let c: Vec<Interval> = center.iter().map(|q| Interval::point(prec, q)).collect();
    f.jet(&space, &c)
}

/// Settings for [`derivative_bound`].
#[derive(Clone, Debug)]
pub struct BoundOptions {
    /// Initial grid resolution per coordinate.
    pub pieces: usize,
    /// Maximum number of extra bisections of a failing piece.
    pub max_depth: u32,
    pub prec: u32,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            pieces: 8,
            max_depth: 12,
            prec: 128,
        }
    }
}

/// Certified `B ≥ 1` with `|∂^α φ_j| ≤ B` on `dom` for every coordinate
/// function and every `|α| ≤ order`.
pub fn derivative_bound(phi: &[Expr], dom: &Domain, order: u32, opts: &BoundOptions) -> Result<Rational> {
    let space = JetSpace::new(dom.dim(), order)?;
    let weights: Vec<Interval> = space
        .indices()
        .iter()
        .map(|a| Interval::point(opts.prec, &Rational::from(multi_factorial(a))))
        .collect();
    let mut best = Rational::from(1);
    let mut stack: Vec<(Domain, u32)> = dom.grid(opts.pieces).into_iter().map(|b| (b, 0)).collect();
    while let Some((b, depth)) = stack.pop() {
        let xs = b.intervals(opts.prec);
        let mut piece = Rational::new();
        let mut ok = true;
        for f in phi {
            match f.jet(&space, &xs) {
                Ok(j) => {
                    for (c, w) in j.coeffs().iter().zip(&weights) {
                        let m = c.mul(w).mag();
                        if !m.is_finite() {
                            ok = false;
                            break;
                        }
                        let r = m.to_rational().expect("finite");
                        if r > piece {
                            piece = r;
                        }
                    }
                }
                Err(Error::DomainViolation(_)) => ok = false,
                Err(e) => return Err(e),
            }
            if !ok {
                break;
            }
        }
        if ok {
            if piece > best {
                best = piece;
            }
            continue;
        }
        if depth >= opts.max_depth {
            return Err(Error::Diverged(format!(
                "derivative bound not certified on {b} after {depth} bisections"
            )));
        }
        let (l, r) = b.bisect(b.widest());
        stack.push((l, depth + 1));
        stack.push((r, depth + 1));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn parses_example_maps() {
        let e = parse("(exp(x)-1)*(exp(y)-1)").unwrap();
        assert_eq!(e.arity(), 2);
        assert_eq!(parse("x").unwrap(), Expr::Var(0));
        let e = parse("y^(-1) * x^sqrt(2)").unwrap();
        match e {
            Expr::Mul(a, b) => {
                assert!(matches!(*a, Expr::Pow(_, Exponent::Rational(ref r)) if *r == -1));
                assert!(matches!(*b, Expr::Pow(_, Exponent::Algebraic(_))));
            }
            _ => panic!("unexpected shape"),
        }
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("x +\n  * y") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_with_arity("x + y", 1), Err(Error::Arity { .. })));
        assert!(matches!(parse("w"), Err(Error::Arity { .. })));
    }

    #[test]
    fn printer_round_trips() {
        for s in [
            "1/2 + x",
            "-x^2",
            "x - (y - z)",
            "x/(y*z)",
            "(-1)^3 * x",
            "x^(1/3) + y^(-2)",
            "2*(1/2)",
            "exp(-1/x)",
            "x^sqrt(2) - x^(-sqrt(3))",
            "x^(y+1)",
            "0.25*pi",
            "x1*x4 + x2",
        ] {
            let a = parse(s).unwrap();
            let b = parse(&a.to_string()).unwrap();
            assert_eq!(a, b, "{s} printed as {a}");
        }
    }

    #[test]
    fn interval_examples() {
        let e = parse("exp(x)").unwrap();
        let v = eval_interval(&e, &Domain::unit(1), 64).unwrap();
        assert!(v.lo() <= &1 && v.hi() >= &2.71828);
        let v = eval_interval(&parse("1/2").unwrap(), &Domain::unit(2), 64).unwrap();
        assert_eq!(v.width_f64(), 0.0);
        let d = Domain::new(vec![q(0, 1), q(-1, 1)], vec![q(1, 1), q(0, 1)]).unwrap();
        let v = eval_interval(&parse("x*y").unwrap(), &d, 64).unwrap();
        assert!(v.lo() <= &-1 && v.hi() >= &0 && v.hi() <= &0);
        assert!(matches!(
            eval_interval(&parse("log(x)").unwrap(), &Domain::unit(1), 64),
            Err(Error::DomainViolation(_))
        ));
    }

    #[test]
    fn jet_examples() {
        let j = eval_jet(&parse("exp(x)").unwrap(), &[q(0, 1)], 3, 128).unwrap();
        let want = [1.0, 1.0, 0.5, 1.0 / 6.0];
        for (k, w) in want.iter().enumerate() {
            assert!((j.coeff(&[k as u32]).unwrap().mid_f64() - w).abs() < 1e-30);
        }
        let j = eval_jet(&parse("x^2").unwrap(), &[q(1, 1)], 2, 128).unwrap();
        let got: Vec<f64> = j.coeffs().iter().map(|c| c.mid_f64()).collect();
        assert_eq!(got, vec![1.0, 2.0, 1.0]);
        let j = eval_jet(&parse("(exp(x)-1)*(exp(y)-1)").unwrap(), &[q(0, 1), q(0, 1)], 2, 128).unwrap();
        assert!(j.coeff(&[1, 1]).unwrap().contains(&q(1, 1)));
        assert!(j.coeff(&[2, 0]).unwrap().contains(&q(0, 1)));
        assert!(j.coeff(&[0, 2]).unwrap().contains(&q(0, 1)));
    }

    #[test]
    fn derivative_bound_examples() {
        let o = BoundOptions::default();
        let b = derivative_bound(&[parse("x").unwrap()], &Domain::unit(1), 2, &o).unwrap();
        assert!(b >= 1 && b <= 2);
        let b = derivative_bound(&[parse("exp(x)").unwrap()], &Domain::unit(1), 3, &o).unwrap();
        let e = std::f64::consts::E;
        assert!(b.to_f64() >= e && b.to_f64() <= 2.0 * e);
        let b = derivative_bound(&[parse("x").unwrap(), parse("x^2").unwrap()], &Domain::unit(1), 2, &o).unwrap();
        assert!(b >= 2 && b.to_f64() < 2.5);
    }
}
