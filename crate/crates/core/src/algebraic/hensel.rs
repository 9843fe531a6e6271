use std::io::Write;

use rug::Float;

use super::{AlgebraError, GaussRat, RatFunc, UPoly, XPoly};
use crate::numeric::{with_restarts, Ball, BallComplex, PrecisionBudget};

/// Truncated power series `f_0 + f_1 w + ... + f_N w^N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesInW<C> {
    coeffs: Vec<C>,
}

/// Coefficients are reduced rational functions of `z`.
pub type ExactSeries = SeriesInW<RatFunc>;
/// Coefficients are enclosures at a fixed `z0`.
pub type NumericSeries = SeriesInW<BallComplex>;

impl<C> SeriesInW<C> {
    /// Panics on an empty coefficient list.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least f_0");
        Self { coeffs }
    }

    /// The truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &C {
        &self.coeffs[n]
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }
}

impl ExactSeries {
    /// Values `f_n(z0)`; `None` if some `f_n` has a pole at `z0`.
    pub fn specialize(&self, z0: &GaussRat) -> Option<Vec<GaussRat>> {
        self.coeffs.iter().map(|f| f.eval(z0)).collect()
    }
}

/// The ring operations the Newton step needs, fallible so that exact
/// blow-up and ball division by zero surface as errors.
trait Coeff: Clone {
    fn zero_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn times(&self, o: &Self) -> Result<Self, AlgebraError>;
    fn negated(&self) -> Self;
    fn inverse(&self) -> Result<Self, AlgebraError>;
    fn certainly_zero(&self) -> bool;
}

impl Coeff for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::zero()
    }
    fn plus(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.add(o)
    }
    fn times(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.mul(o)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn inverse(&self) -> Result<Self, AlgebraError> {
        self.recip()
    }
    fn certainly_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Coeff for BallComplex {
    fn zero_like(&self) -> Self {
        BallComplex::zero(self.prec())
    }
    fn plus(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.add(o))
    }
    fn times(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(o))
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn inverse(&self) -> Result<Self, AlgebraError> {
        self.recip().map_err(|_| AlgebraError::PrecisionExhausted { bits: self.prec() })
    }
    fn certainly_zero(&self) -> bool {
        self.is_exact_zero()
    }
}

/// `a * b mod w^len`.
fn mul_trunc<C: Coeff>(a: &[C], b: &[C], len: usize, zero: &C) -> Result<Vec<C>, AlgebraError> {
    let mut out = vec![zero.clone(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.certainly_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j].plus(&ai.times(bj)?)?;
        }
    }
    Ok(out)
}

/// `a + b mod w^len`, padding the shorter operand with zeros.
fn add_trunc<C: Coeff>(a: &[C], b: &[C], len: usize, zero: &C) -> Result<Vec<C>, AlgebraError> {
    (0..len)
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x.plus(y),
            (Some(x), None) | (None, Some(x)) => Ok(x.clone()),
            (None, None) => Ok(zero.clone()),
        })
        .collect()
}

/// `1/a mod w^len`; `a_0` must be invertible.
fn inverse_trunc<C: Coeff>(a: &[C], len: usize) -> Result<Vec<C>, AlgebraError> {
    let g0 = a[0].inverse()?;
    let minus_g0 = g0.negated();
    let mut g = Vec::with_capacity(len);
    g.push(g0);
    for n in 1..len {
        let mut acc = g[0].zero_like();
        for j in 1..=n.min(a.len() - 1) {
            if !a[j].certainly_zero() {
                acc = acc.plus(&a[j].times(&g[n - j])?)?;
            }
        }
        g.push(minus_g0.times(&acc)?);
    }
    Ok(g)
}

/// `(Phi(F), dPhi/dX(F)) mod w^len` by Horner in `X`; `phi[j]` is the
/// `w`-series of the coefficient of `X^(t-j)`.
fn relation_at<C: Coeff>(phi: &[Vec<C>], f: &[C], len: usize) -> Result<(Vec<C>, Vec<C>), AlgebraError> {
    let zero = f[0].zero_like();
    let mut p = add_trunc(&phi[0], &[], len, &zero)?;
    let mut dp = vec![zero.clone(); len];
    for c in &phi[1..] {
        dp = add_trunc(&mul_trunc(&dp, f, len, &zero)?, &p, len, &zero)?;
        p = add_trunc(&mul_trunc(&p, f, len, &zero)?, c, len, &zero)?;
    }
    Ok((p, dp))
}

/// Newton iteration `F <- F - Phi(F)/Phi'(F)`, doubling the valid order per
/// step. With `Phi(F) = w^k R` only `R * (1/Phi'(F) mod w^k)` is needed for
/// the new coefficients `k..2k`; the old ones are already final.
fn newton<C: Coeff>(phi: &[Vec<C>], f0: C, order: usize) -> Result<Vec<C>, AlgebraError> {
    let zero = f0.zero_like();
    let target = order + 1;
    let mut f = vec![f0];
    while f.len() < target {
        let k = f.len();
        let k2 = (2 * k).min(target);
        let (p, dp) = relation_at(phi, &f, k2)?;
        let g = inverse_trunc(&dp, k2 - k)?;
        let delta = mul_trunc(&p[k..k2], &g, k2 - k, &zero)?;
        f.extend(delta.iter().map(Coeff::negated));
    }
    Ok(f)
}

fn exact_coefficients(phi: &XPoly) -> Vec<Vec<RatFunc>> {
    phi.coeffs().iter().map(|c| c.by_w().into_iter().map(RatFunc::from_poly).collect()).collect()
}

fn ball_coefficients(phi: &XPoly, z0: &BallComplex) -> Vec<Vec<BallComplex>> {
    phi.coeffs().iter().map(|c| c.specialize_z(z0)).collect()
}

/// The branch `F` of `Phi(z, w, F) = 0` with `F(z, 0) = f0`, through `w^order`,
/// over exact rational functions of `z`.
///
/// The seed must be a simple root: `Phi(z, 0, f0) = 0` and
/// `dPhi/dX(z, 0, f0) != 0` as rational functions.
pub fn hensel_lift_exact(phi: &XPoly, f0: &RatFunc, order: usize) -> Result<ExactSeries, AlgebraError> {
    let coeffs = exact_coefficients(phi);
    let (p, dp) = relation_at(&coeffs, std::slice::from_ref(f0), 1)?;
    if !p[0].is_zero() {
        return Err(AlgebraError::NotARoot);
    }
    if dp[0].is_zero() {
        return Err(AlgebraError::SingularInitialRoot);
    }
    Ok(SeriesInW::new(newton(&coeffs, f0.clone(), order)?))
}

/// Coefficients of `Phi(z, w, F) mod w^(N+1)`; all zero for a correct lift.
pub fn residual_exact(phi: &XPoly, f: &ExactSeries) -> Result<Vec<RatFunc>, AlgebraError> {
    Ok(relation_at(&exact_coefficients(phi), f.coeffs(), f.order() + 1)?.0)
}

/// Enclosures of the coefficients of `Phi(z0, w, F) mod w^(N+1)`.
pub fn residual_numeric(phi: &XPoly, z0: &BallComplex, f: &NumericSeries) -> Vec<BallComplex> {
    let coeffs = ball_coefficients(phi, &z0.round_to(f.coeff(0).prec()));
    relation_at(&coeffs, f.coeffs(), f.order() + 1).expect("ball ring operations are total").0
}

/// A lifted branch at a sample point.
#[derive(Clone, Debug)]
pub struct NumericLift {
    pub series: NumericSeries,
    /// Certified enclosure of the simple root `F(z0, 0)`.
    pub root: BallComplex,
    /// Working precision of the successful attempt.
    pub bits: u32,
}

fn horner(p: &[BallComplex], x: &BallComplex) -> BallComplex {
    p.iter().rev().fold(BallComplex::zero(x.prec()), |acc, c| acc.mul(x).add(c))
}

fn strictly_inside(inner: &BallComplex, outer: &BallComplex) -> bool {
    let part = |a: &Ball, b: &Ball| a.lower() > b.lower() && a.upper() < b.upper();
    part(&inner.re, &outer.re) && part(&inner.im, &outer.im)
}

/// Refines `x0` by midpoint Newton steps, then certifies a unique simple
/// root of `p` (coefficients lowest power first) in a small box `X` around
/// the refined point by the Krawczyk test
/// `m - Y p(m) + (1 - Y p'(X)) (X - m)` strictly inside `X`.
///
/// A seed with positive radius must contain the certified box; an exact
/// seed is only a starting guess.
pub(crate) fn certify_root(p: &[BallComplex], x0: &BallComplex, prec: u32) -> Result<BallComplex, AlgebraError> {
    let dp: Vec<BallComplex> = p.iter().enumerate().skip(1).map(|(k, c)| c.mul_i64(k as i64)).collect();
    if dp.is_empty() {
        return Err(AlgebraError::RootNotCertified);
    }
    let eps = Float::with_val(64, Float::i_exp(1, -(prec as i32 - 8)));
    let mut m = x0.round_to(prec).center();
    for _ in 0..(2 * prec.ilog2() + 40) {
        let step = horner(p, &m).center().div(&horner(&dp, &m).center()).map_err(|_| AlgebraError::RootNotCertified)?;
        m = m.sub(&step.center()).round_to(prec).center();
        let size = step.center().abs().upper();
        if size <= Float::with_val(64, &eps * (Float::with_val(64, 1) + m.abs().upper())) {
            break;
        }
    }
    let y = horner(&dp, &m).center().recip().map_err(|_| AlgebraError::RootNotCertified)?.center();
    let ypm = y.mul(&horner(p, &m));
    let one = BallComplex::one(prec);
    let floor = Float::with_val(64, &eps * (Float::with_val(64, 1) + m.abs().upper()));
    let mut r = Float::with_val(64, ypm.abs().upper() * 4u32).max(&floor);
    for _ in 0..8 {
        let xb = m.inflate(&r);
        let contraction = one.sub(&y.mul(&horner(&dp, &xb)));
        let k = m.sub(&ypm).add(&contraction.mul(&xb.sub(&m)));
        if strictly_inside(&k, &xb) {
            let seeded = x0.radius_upper() > 0;
            if seeded && !x0.contains(&k) {
                return Err(AlgebraError::RootNotCertified);
            }
            // An exact root stays exact, so vanishing coefficients stay exact zeros.
            return Ok(if ypm.is_exact_zero() { m } else { k });
        }
        r *= 16u32;
    }
    Err(AlgebraError::RootNotCertified)
}

/// A coefficient is usable if it is an exact zero, certainly nonzero, or
/// pinned to half the working precision.
fn resolved(c: &BallComplex, bits: u32) -> bool {
    if c.is_exact_zero() || !c.contains_zero() {
        return true;
    }
    c.radius_upper() < Float::with_val(64, Float::i_exp(1, -(bits as i32 / 2)))
}

/// The branch of `Phi(z0, w, F) = 0` through the simple root of
/// `Phi(z0, 0, X)` near `x0`, as coefficient enclosures through `w^order`.
///
/// The ball Newton iteration encloses the exact iteration started from the
/// true root, so every coefficient ball contains the true Taylor
/// coefficient. A residual ball that excludes zero, or a coefficient that
/// lost all its precision, triggers a restart at doubled precision.
pub fn hensel_lift_numeric(
    phi: &XPoly,
    z0: &BallComplex,
    x0: &BallComplex,
    order: usize,
    budget: &PrecisionBudget,
) -> Result<NumericLift, AlgebraError> {
    with_restarts(
        budget,
        |bits| {
            let z = z0.round_to(bits);
            let coeffs = ball_coefficients(phi, &z);
            let at_zero: Vec<BallComplex> = coeffs
                .iter()
                .rev()
                .map(|c| c.first().cloned().unwrap_or_else(|| BallComplex::zero(bits)))
                .collect();
            let root = certify_root(&at_zero, x0, bits)?;
            let f = newton(&coeffs, root.clone(), order)?;
            if !f.iter().all(|c| resolved(c, bits)) {
                return Err(AlgebraError::PrecisionExhausted { bits });
            }
            let series = SeriesInW::new(f);
            let res = relation_at(&coeffs, series.coeffs(), order + 1)?.0;
            if !res.iter().all(BallComplex::contains_zero) {
                return Err(AlgebraError::PrecisionExhausted { bits });
            }
            Ok(NumericLift { series, root, bits })
        },
        AlgebraError::wants_precision,
    )
}

fn write_poly(p: &UPoly, out: &mut String) {
    for (k, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.push_str(&format!(" {k}:{c}"));
        }
    }
}

/// Line-oriented text form of an exact lift:
///
/// ```text
/// order 2
/// 0 num 0:1 den 0:1
/// 1 num 1:1/2 den 0:1
/// 2 num 2:-1/8 den 0:1
/// ```
///
/// Each `f_n` is `num/den` with both polynomials in `z` written as
/// `degree:coefficient` terms; lines starting with `#` are comments.
pub fn write_exact_lift(f: &ExactSeries, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "order {}", f.order())?;
    for (n, c) in f.coeffs().iter().enumerate() {
        let mut line = format!("{n} num");
        write_poly(c.num(), &mut line);
        line.push_str(" den");
        write_poly(c.den(), &mut line);
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Inverse of [`write_exact_lift`].
pub fn parse_exact_lift(src: &str) -> Result<ExactSeries, AlgebraError> {
    let err = |line: usize, msg: &str| AlgebraError::Format { line, msg: msg.to_string() };
    let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (ln, head) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let order: usize = head
        .strip_prefix("order ")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| err(ln + 1, "expected `order <N>`"))?;
    let mut coeffs = Vec::with_capacity(order + 1);
    for (ln, line) in lines {
        let ln = ln + 1;
        let mut tok = line.split_whitespace();
        let n: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err(ln, "expected an index"))?;
        if n != coeffs.len() {
            return Err(err(ln, "indices must run 0, 1, 2, ..."));
        }
        if tok.next() != Some("num") {
            return Err(err(ln, "expected `num`"));
        }
        let mut num = Vec::new();
        let mut den = Vec::new();
        let mut in_den = false;
        for t in tok {
            if t == "den" && !in_den {
                in_den = true;
                continue;
            }
            let (k, c) = t.split_once(':').ok_or_else(|| err(ln, "expected `degree:coefficient`"))?;
            let k: usize = k.parse().map_err(|_| err(ln, "bad degree"))?;
            let c: GaussRat = c.parse().map_err(|m: String| err(ln, &m))?;
            let dst = if in_den { &mut den } else { &mut num };
            if dst.len() <= k {
                dst.resize(k + 1, GaussRat::zero());
            }
            dst[k] = c;
        }
        if !in_den {
            return Err(err(ln, "expected `den`"));
        }
        let f = RatFunc::new(UPoly::new(num), UPoly::new(den)).map_err(|e| err(ln, &e.to_string()))?;
        coeffs.push(f);
    }
    if coeffs.len() != order + 1 {
        return Err(err(src.lines().count(), "coefficient count does not match the order"));
    }
    Ok(SeriesInW::new(coeffs))
}
