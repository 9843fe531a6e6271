//! Expression grammar shared by every command-line argument:
//!
//! ```text
//! expr    = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
//! term    = factor { ( "*" | "/" ) factor } ;
//! factor  = primary [ "^" uint ] ;
//! primary = number [ "i" ] | "i" | var | "sqrt" "(" uint ")" | "(" expr ")" ;
//! number  = uint [ "." digits ] | uint "/" uint ;
//! var     = "z" | "w" | "X" | "t0" ;
//! ```
//!
//! A literal `p/q` written without spaces is one rational token, so `2/3i`
//! is `(2/3)i`. Decimals are read as exact rationals. Every error carries
//! the byte offset of the offending token.

use std::collections::BTreeMap;
use std::fmt;

use rug::{Integer, Rational};

use crate::algebraic::{AlgebraError, BivarPoly, GaussRat, XPoly};
use crate::hartogs::ExactPoint;
use crate::numeric::ExactReal;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

fn perr<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: Rational, integer: bool },
    Imag(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn digits(b: &[u8], mut i: usize) -> usize {
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    i
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let mut end = digits(b, i);
                let whole: Integer = src[i..end].parse().expect("digits");
                let mut integer = true;
                let mut value = Rational::from(whole);
                if end + 1 < b.len() && b[end] == b'.' && b[end + 1].is_ascii_digit() {
                    let fend = digits(b, end + 1);
                    let frac: Integer = src[end + 1..fend].parse().expect("digits");
                    let scale = Integer::from(Integer::u_pow_u(10, (fend - end - 1) as u32));
                    value += Rational::from((frac, scale));
                    integer = false;
                    end = fend;
                } else if end + 1 < b.len() && b[end] == b'/' && b[end + 1].is_ascii_digit() {
                    let dend = digits(b, end + 1);
                    let den: Integer = src[end + 1..dend].parse().expect("digits");
                    if den == 0 {
                        return perr(end + 1, "zero denominator");
                    }
                    value /= Rational::from(den);
                    integer = false;
                    end = dend;
                }
                let imag = end < b.len() && b[end] == b'i' && !b.get(end + 1).is_some_and(|c| c.is_ascii_alphanumeric());
                i = end;
                if imag {
                    i += 1;
                    Tok::Imag(value)
                } else {
                    out.push((start, Tok::Num { value, integer }));
                    continue;
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = i;
                while end < b.len() && b[end].is_ascii_alphanumeric() {
                    end += 1;
                }
                i = end;
                let word = &src[start..end];
                if !matches!(word, "z" | "w" | "X" | "t0" | "i" | "sqrt") {
                    return perr(start, format!("unknown name `{word}`"));
                }
                out.push((start, Tok::Ident(word.to_string())));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().expect("in bounds");
                return perr(start, format!("unexpected character `{ch}`"));
            }
        };
        if !matches!(tok, Tok::Imag(_)) {
            i += 1;
        }
        out.push((start, tok));
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Z,
    W,
    X,
    T0,
}

#[derive(Clone, Debug)]
enum Node {
    Num(Rational),
    Imag(Rational),
    Sqrt(Integer),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug)]
struct Expr {
    at: usize,
    node: Node,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn at(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let at = self.at();
        let mut lhs = match self.peek() {
            Tok::Minus => {
                self.bump();
                Expr { at, node: Node::Neg(Box::new(self.term()?)) }
            }
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            let at = self.at();
            let sub = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = Box::new(self.term()?);
            let node = if sub { Node::Sub(Box::new(lhs), rhs) } else { Node::Add(Box::new(lhs), rhs) };
            lhs = Expr { at, node };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let at = self.at();
            let div = match self.peek() {
                Tok::Star => false,
                Tok::Slash => true,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = Box::new(self.factor()?);
            let node = if div { Node::Div(Box::new(lhs), rhs) } else { Node::Mul(Box::new(lhs), rhs) };
            lhs = Expr { at, node };
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let at = self.at();
        self.bump();
        let (eat, tok) = self.bump();
        match tok {
            Tok::Num { value, integer: true } => {
                let e = value.numer().to_u32().filter(|&e| e <= 4096);
                match e {
                    Some(e) => Ok(Expr { at, node: Node::Pow(Box::new(base), e) }),
                    None => perr(eat, "exponent too large"),
                }
            }
            _ => perr(eat, "expected a nonnegative integer exponent"),
        }
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (at, tok) = self.bump();
        let node = match tok {
            Tok::Num { value, .. } => Node::Num(value),
            Tok::Imag(v) => Node::Imag(v),
            Tok::Ident(name) => match name.as_str() {
                "i" => Node::Imag(Rational::from(1)),
                "z" => Node::Var(Var::Z),
                "w" => Node::Var(Var::W),
                "X" => Node::Var(Var::X),
                "t0" => Node::Var(Var::T0),
                _ => {
                    self.expect(Tok::LParen, "expected `(` after sqrt")?;
                    let (kat, k) = self.bump();
                    let Tok::Num { value, integer: true } = k else {
                        return perr(kat, "sqrt takes a nonnegative integer literal");
                    };
                    self.expect(Tok::RParen, "expected `)`")?;
                    Node::Sqrt(value.numer().clone())
                }
            },
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "expected `)`")?;
                return Ok(inner);
            }
            Tok::End => return perr(at, "unexpected end of input"),
            _ => return perr(at, "expected a number, variable or `(`"),
        };
        Ok(Expr { at, node })
    }

    fn expect(&mut self, want: Tok, msg: &str) -> Result<(), ParseError> {
        let at = self.at();
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            perr(at, msg)
        }
    }
}

fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return perr(p.at(), "unexpected trailing input");
    }
    Ok(e)
}

// ---- exact reals ----

fn real_value(e: &Expr) -> Result<ExactReal, ParseError> {
    let lift = |r: Result<ExactReal, crate::numeric::ExactError>| r.or_else(|err| perr(e.at, err.to_string()));
    match &e.node {
        Node::Num(v) => Ok(ExactReal::rational(v.clone())),
        Node::Imag(_) => perr(e.at, "imaginary value where a real is expected"),
        Node::Var(_) => perr(e.at, "variable where a number is expected"),
        Node::Sqrt(k) => match k.to_i64() {
            Some(k) => lift(ExactReal::sqrt(k)),
            None => perr(e.at, "radicand too large"),
        },
        Node::Neg(a) => Ok(real_value(a)?.neg()),
        Node::Add(a, b) => lift(real_value(a)?.add(&real_value(b)?)),
        Node::Sub(a, b) => lift(real_value(a)?.sub(&real_value(b)?)),
        Node::Mul(a, b) => lift(real_value(a)?.mul(&real_value(b)?)),
        Node::Div(a, b) => lift(real_value(a)?.div(&real_value(b)?)),
        Node::Pow(a, k) => lift(real_value(a)?.pow(*k)),
    }
}

/// A real number of the form `a + b sqrt(m)`, e.g. `1/2 + 1/4*sqrt(5)`.
pub fn parse_real(src: &str) -> Result<ExactReal, ParseError> {
    real_value(&parse_expr(src)?)
}

/// A point `x*t0 + y` of the complex plane with exact real `x`, `y`.
pub fn parse_point(src: &str) -> Result<ExactPoint, ParseError> {
    fn lin(e: &Expr) -> Result<(ExactReal, ExactReal), ParseError> {
        let lift = |r: Result<ExactReal, crate::numeric::ExactError>| r.or_else(|err| perr(e.at, err.to_string()));
        let zero = ExactReal::from_i64(0);
        match &e.node {
            Node::Var(Var::T0) => Ok((ExactReal::from_i64(1), zero)),
            Node::Var(_) => perr(e.at, "only t0 may appear in a point"),
            Node::Neg(a) => {
                let (x, y) = lin(a)?;
                Ok((x.neg(), y.neg()))
            }
            Node::Add(a, b) | Node::Sub(a, b) => {
                let ((x1, y1), (x2, y2)) = (lin(a)?, lin(b)?);
                let (x2, y2) = if matches!(e.node, Node::Sub(..)) { (x2.neg(), y2.neg()) } else { (x2, y2) };
                Ok((lift(x1.add(&x2))?, lift(y1.add(&y2))?))
            }
            Node::Mul(a, b) => {
                let ((x1, y1), (x2, y2)) = (lin(a)?, lin(b)?);
                if !x1.is_zero() && !x2.is_zero() {
                    return perr(e.at, "point must be linear in t0");
                }
                let x = lift(lift(x1.mul(&y2))?.add(&lift(x2.mul(&y1))?))?;
                Ok((x, lift(y1.mul(&y2))?))
            }
            Node::Div(a, b) => {
                let (x1, y1) = lin(a)?;
                let d = real_value(b)?;
                Ok((lift(x1.div(&d))?, lift(y1.div(&d))?))
            }
            _ => Ok((zero, real_value(e)?)),
        }
    }
    let (x, y) = lin(&parse_expr(src)?)?;
    Ok(ExactPoint::new(x, y))
}

// ---- polynomials over Q(i) ----

type Mono = (u32, u32, u32);
type Poly = BTreeMap<Mono, GaussRat>;

fn poly_const(c: GaussRat) -> Poly {
    let mut p = Poly::new();
    if !c.is_zero() {
        p.insert((0, 0, 0), c);
    }
    p
}

fn poly_add(a: &Poly, b: &Poly, sign: i64) -> Poly {
    let mut out = a.clone();
    for (k, c) in b {
        let c = if sign < 0 { c.neg() } else { c.clone() };
        let v = out.get(k).map_or(c.clone(), |o| o.add(&c));
        if v.is_zero() {
            out.remove(k);
        } else {
            out.insert(*k, v);
        }
    }
    out
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ka, ca) in a {
        for (kb, cb) in b {
            let k = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
            out = poly_add(&out, &BTreeMap::from([(k, ca.mul(cb))]), 1);
        }
    }
    out
}

fn poly_value(e: &Expr) -> Result<Poly, ParseError> {
    match &e.node {
        Node::Num(v) => Ok(poly_const(GaussRat::from_rational(v.clone()))),
        Node::Imag(v) => Ok(poly_const(GaussRat::new(Rational::new(), v.clone()))),
        Node::Var(Var::T0) => perr(e.at, "t0 is only allowed in points"),
        Node::Var(v) => {
            let k = match v {
                Var::Z => (1, 0, 0),
                Var::W => (0, 1, 0),
                _ => (0, 0, 1),
            };
            Ok(BTreeMap::from([(k, GaussRat::one())]))
        }
        Node::Sqrt(k) => {
            if k.is_perfect_square() {
                Ok(poly_const(GaussRat::from_rational(Rational::from(k.clone().sqrt()))))
            } else {
                perr(e.at, "sqrt of a non-square is not a Gaussian rational")
            }
        }
        Node::Neg(a) => Ok(poly_add(&Poly::new(), &poly_value(a)?, -1)),
        Node::Add(a, b) => Ok(poly_add(&poly_value(a)?, &poly_value(b)?, 1)),
        Node::Sub(a, b) => Ok(poly_add(&poly_value(a)?, &poly_value(b)?, -1)),
        Node::Mul(a, b) => Ok(poly_mul(&poly_value(a)?, &poly_value(b)?)),
        Node::Div(a, b) => {
            let d = poly_value(b)?;
            let c = match d.len() {
                1 => d.get(&(0, 0, 0)).cloned(),
                _ => None,
            };
            let Some(c) = c else { return perr(b.at, "divisor must be a nonzero constant") };
            let inv = poly_const(c.recip());
            Ok(poly_mul(&poly_value(a)?, &inv))
        }
        Node::Pow(a, k) => {
            let base = poly_value(a)?;
            Ok((0..*k).fold(poly_const(GaussRat::one()), |acc, _| poly_mul(&acc, &base)))
        }
    }
}

/// A Gaussian rational `a+bi`, e.g. `2+0i`, `1/2-3i`, `0.25i`.
pub fn parse_complex(src: &str) -> Result<GaussRat, ParseError> {
    let e = parse_expr(src)?;
    let p = poly_value(&e)?;
    match p.len() {
        0 => Ok(GaussRat::zero()),
        1 if p.contains_key(&(0, 0, 0)) => Ok(p[&(0, 0, 0)].clone()),
        _ => perr(e.at, "expected a constant"),
    }
}

/// A polynomial in `z`, `w` only.
pub fn parse_bivar(src: &str) -> Result<BivarPoly, ParseError> {
    let e = parse_expr(src)?;
    let p = poly_value(&e)?;
    if p.keys().any(|k| k.2 > 0) {
        return perr(e.at, "X is not allowed here");
    }
    Ok(p.iter().fold(BivarPoly::zero(), |acc, ((dz, dw, _), c)| acc.add(&BivarPoly::monomial(*dz, *dw, c.clone()))))
}

/// Errors of [`parse_poly`]: a syntax error or an invalid relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    Parse(ParseError),
    Relation(AlgebraError),
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Parse(e) => e.fmt(f),
            Self::Relation(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for PolyError {}

impl From<ParseError> for PolyError {
    fn from(e: ParseError) -> Self {
        Self::Parse(e)
    }
}

/// A relation `sum_j Phi_j(z, w) X^(t-j)`, collected by powers of `X`.
pub fn parse_poly(src: &str) -> Result<XPoly, PolyError> {
    let p = poly_value(&parse_expr(src)?)?;
    let t = p.keys().map(|k| k.2).max().unwrap_or(0) as usize;
    let mut by_power = vec![BivarPoly::zero(); t + 1];
    for ((dz, dw, dx), c) in &p {
        let slot = &mut by_power[*dx as usize];
        *slot = slot.add(&BivarPoly::monomial(*dz, *dw, c.clone()));
    }
    if t == 0 {
        return Err(PolyError::Relation(AlgebraError::NotPolynomialInX));
    }
    XPoly::from_powers(by_power).map_err(PolyError::Relation)
}
