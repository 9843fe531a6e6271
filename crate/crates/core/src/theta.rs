//! The odd Jacobi theta function
//!
//! ```text
//! theta11(z; tau) = sum over m in Z of exp(pi i ((m + 1/2)^2 tau + 2 (m + 1/2)(z + 1/2)))
//! ```
//!
//! evaluated with certified tails, its values at astronomically large
//! arguments through lattice reduction in the log domain, and a certified
//! lower bound for `|theta11(z)/z|` on the fundamental cell.

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::diophantine::{lattice_reduce, DiophantineError};
use crate::numeric::{unit_exp, Ball, BallComplex, PrecisionBudget};

/// Largest number of half-integers summed per sign.
pub const MAX_TERMS: u32 = 100_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ThetaError {
    #[error("imaginary part of tau is not certified positive")]
    NonpositiveImTau,
    #[error("direct summation would need more than {MAX_TERMS} terms; reduce the argument first")]
    CutoffOverflow,
    #[error("lattice reduction straddles a half-integer; more precision is needed")]
    TieStraddle,
    #[error("enclosure of theta contains zero; more precision is needed")]
    ContainsZero,
}

impl From<DiophantineError> for ThetaError {
    fn from(e: DiophantineError) -> Self {
        match e {
            DiophantineError::NonpositiveImTau => ThetaError::NonpositiveImTau,
            _ => ThetaError::TieStraddle,
        }
    }
}

/// A fixed `tau0` in the upper half plane, held exactly as a Gaussian
/// rational, and the precision to evaluate at.
#[derive(Clone, Debug)]
pub struct ThetaContext {
    tau_re: Rational,
    tau_im: Rational,
    budget: PrecisionBudget,
}

impl ThetaContext {
    pub fn new(tau_re: Rational, tau_im: Rational, budget: PrecisionBudget) -> Result<Self, ThetaError> {
        if tau_im <= 0 {
            return Err(ThetaError::NonpositiveImTau);
        }
        Ok(Self { tau_re, tau_im, budget })
    }

    /// `tau0 = i`.
    pub fn imaginary_unit(budget: PrecisionBudget) -> Self {
        Self { tau_re: Rational::new(), tau_im: Rational::from(1), budget }
    }

    pub fn tau_re(&self) -> &Rational {
        &self.tau_re
    }

    pub fn tau_im(&self) -> &Rational {
        &self.tau_im
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    pub fn bits(&self) -> u32 {
        self.budget.bits()
    }

    /// Same `tau0` at another budget.
    pub fn with_budget(&self, budget: PrecisionBudget) -> Self {
        Self { budget, ..self.clone() }
    }

    pub fn tau(&self, prec: u32) -> BallComplex {
        BallComplex::from_rationals(&self.tau_re, &self.tau_im, prec)
    }

    /// `|tau0|^2`, exactly.
    pub fn tau_norm_sq(&self) -> Rational {
        Rational::from(&self.tau_re * &self.tau_re) + Rational::from(&self.tau_im * &self.tau_im)
    }

    /// `M = Im(tau0) * min(1, 1/|tau0|)`, the constant with
    /// `|z| >= M max(|x(z)|, |y(z)|)`.
    pub fn m_constant(&self, prec: u32) -> Ball {
        let im = Ball::from_rational(&self.tau_im, prec);
        if self.tau_norm_sq() <= 1 {
            return im;
        }
        let abs = Ball::from_rational(&self.tau_norm_sq(), prec).sqrt_nonneg();
        im.div(&abs).expect("|tau0| > 1")
    }
}

/// `log|value|`, with the exact zero kept apart.
#[derive(Clone, Debug)]
pub enum LogMagnitude {
    NegInfinity,
    Finite(Ball),
}

impl LogMagnitude {
    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, LogMagnitude::NegInfinity)
    }

    pub fn ball(&self) -> Option<&Ball> {
        match self {
            LogMagnitude::Finite(b) => Some(b),
            LogMagnitude::NegInfinity => None,
        }
    }

    /// Midpoint as `f64`, `-inf` for the zero value.
    pub fn to_f64(&self) -> f64 {
        match self {
            LogMagnitude::Finite(b) => b.to_f64(),
            LogMagnitude::NegInfinity => f64::NEG_INFINITY,
        }
    }

    /// `self + b` (zero stays zero).
    pub fn add(&self, b: &Ball) -> Self {
        match self {
            LogMagnitude::Finite(a) => LogMagnitude::Finite(a.add(b)),
            LogMagnitude::NegInfinity => LogMagnitude::NegInfinity,
        }
    }
}

/// The half-integer `j + 1/2`.
fn half_int(j: u32) -> Rational {
    Rational::from((2 * j as u64 + 1, 2u64))
}

/// Upper bound on `2 * sum_{k >= k0, k in Z + 1/2} (2 pi k)^j exp(-pi (k^2 T - 2 k Y))`
/// with `k0 = n + 1/2`, or `None` when the terms have not started to
/// decrease geometrically at `k0`.
fn tail_bound(j: u32, n: u32, t: &Float, y: &Float) -> Option<Float> {
    const P: u32 = 64;
    let k = Ball::from_rational(&half_int(n), P);
    let pi = Ball::pi(P);
    let tb = Ball::with_radius(Float::with_val(P, t), &Float::new(P));
    let yb = Ball::with_radius(Float::with_val(P, y), &Float::new(P));
    let exponent = k.sqr().mul(&tb).sub(&k.mul(&yb).mul_i64(2)).mul(&pi).neg();
    let mut term = exponent.exp();
    let mut growth = Ball::one(P);
    if j > 0 {
        let two_pi_k = pi.mul(&k).mul_i64(2);
        for _ in 0..j {
            term = term.mul(&two_pi_k);
        }
        let k1 = k.add(&Ball::one(P));
        let g = k1.div(&k).ok()?;
        for _ in 0..j {
            growth = growth.mul(&g);
        }
    }
    let ratio_exp = k.mul_i64(2).add(&Ball::one(P)).mul(&tb).sub(&yb.mul_i64(2)).mul(&pi).neg();
    let ratio = growth.mul(&ratio_exp.exp());
    if ratio.upper() >= 1 {
        return None;
    }
    let denom = Ball::one(P).sub(&ratio);
    Some(term.mul_i64(2).div(&denom).ok()?.upper())
}

/// Number of half-integers per sign so that the `j`-th derivative tail is
/// below `2^-tol_bits`, together with that tail bound.
fn cutoff(j: u32, t: &Float, y: &Float, tol_bits: u32) -> Result<(u32, Float), ThetaError> {
    let tf = t.to_f64();
    let yf = y.to_f64();
    let target = -((tol_bits + 4) as f64) * std::f64::consts::LN_2;
    let mut n = ((yf / tf).ceil() as u32).saturating_add(1);
    loop {
        if n > MAX_TERMS {
            return Err(ThetaError::CutoffOverflow);
        }
        let k = n as f64 + 0.5;
        let log_term = -std::f64::consts::PI * (k * k * tf - 2.0 * k * yf)
            + j as f64 * (2.0 * std::f64::consts::PI * k).ln();
        if log_term < target {
            if let Some(bound) = tail_bound(j, n, t, y) {
                return Ok((n, bound));
            }
        }
        n += 1;
    }
}

fn im_bounds(z: &BallComplex, tau: &BallComplex) -> Result<(Float, Float), ThetaError> {
    if !tau.im.is_positive() {
        return Err(ThetaError::NonpositiveImTau);
    }
    let t = Float::with_val_round(64, tau.im.lower(), Round::Down).0;
    let y = Float::with_val_round(64, z.im.abs().upper(), Round::Up).0;
    Ok((t, y))
}

fn with_tail(v: BallComplex, tail: &Float) -> BallComplex {
    v.inflate(tail)
}

/// `theta11(z; tau)` and its first `order` derivatives in `z`, by direct
/// summation with the tail of each series bounded by `2^-tol_bits`.
pub fn theta11_jet_tol(
    z: &BallComplex,
    tau: &BallComplex,
    prec: u32,
    order: u32,
    tol_bits: u32,
) -> Result<Vec<BallComplex>, ThetaError> {
    let (t, y) = im_bounds(z, tau)?;
    let mut n = 0;
    let mut tails = Vec::with_capacity(order as usize + 1);
    for j in 0..=order {
        let (nj, tail) = cutoff(j, &t, &y, tol_bits)?;
        n = n.max(nj);
        tails.push(tail);
    }
    // Tails were computed at each derivative's own cutoff; recompute at the
    // common (larger) one so every bound matches the summed range.
    for (j, tail) in tails.iter_mut().enumerate() {
        if let Some(b) = tail_bound(j as u32, n, &t, &y) {
            *tail = b;
        }
    }
    let pi = Ball::pi(prec);
    let zz = z.add(&BallComplex::from_f64(0.5, 0.0, prec));
    let mut acc = vec![BallComplex::zero(prec); order as usize + 1];
    for j in 0..n {
        let k = Ball::from_rational(&half_int(j), prec);
        let k2 = k.sqr();
        for sign in [1i64, -1] {
            let ks = if sign > 0 { k.clone() } else { k.neg() };
            let s = tau.scale(&k2).add(&zz.scale(&ks.mul_i64(2)));
            let term = unit_exp(&s);
            // d/dz multiplies each term by 2 pi i k.
            let factor = BallComplex::new(Ball::zero(prec), pi.mul(&ks).mul_i64(2));
            let mut cur = term;
            for slot in acc.iter_mut() {
                *slot = slot.add(&cur);
                cur = cur.mul(&factor);
            }
        }
    }
    Ok(acc.into_iter().zip(tails.iter()).map(|(v, tail)| with_tail(v, tail)).collect())
}

/// `theta11(z; tau)` and derivatives, with the tail below the working precision.
pub fn theta11_jet(z: &BallComplex, tau: &BallComplex, prec: u32, order: u32) -> Result<Vec<BallComplex>, ThetaError> {
    theta11_jet_tol(z, tau, prec, order, prec)
}

/// `theta11(z; tau)` by direct summation.
pub fn theta11_direct(z: &BallComplex, tau: &BallComplex, prec: u32) -> Result<BallComplex, ThetaError> {
    Ok(theta11_jet(z, tau, prec, 0)?.pop().expect("order 0"))
}

/// `theta11(z; tau)` with the summation tail bounded by `2^-tol_bits`.
pub fn theta11_direct_tol(z: &BallComplex, tau: &BallComplex, prec: u32, tol_bits: u32) -> Result<BallComplex, ThetaError> {
    Ok(theta11_jet_tol(z, tau, prec, 0, tol_bits)?.pop().expect("order 0"))
}

/// `sin(u)/u` from its Taylor series, valid on any ball.
fn sinc(u: &BallComplex, prec: u32) -> BallComplex {
    let r = u.abs().upper().to_f64();
    let r2 = u.abs_sq();
    let u2 = u.sqr();
    let mut term = BallComplex::one(prec);
    let mut sum = BallComplex::one(prec);
    let target = -(prec as f64 + 8.0) * std::f64::consts::LN_2;
    let mut log_mag = 0.0f64;
    let mut i = 1u32;
    loop {
        // term_i = (-1)^i u^{2i} / (2i+1)!
        let d = (2 * i) as i64 * (2 * i + 1) as i64;
        term = term.mul(&u2).neg().scale(&Ball::from_i64(d, prec).recip().expect("nonzero"));
        sum = sum.add(&term);
        log_mag += 2.0 * r.max(1e-300).ln() - ((2 * i) as f64 * (2 * i + 1) as f64).ln();
        i += 1;
        let next = (2 * i) as f64 * (2 * i + 1) as f64;
        if r * r < next / 2.0 && log_mag < target {
            break;
        }
    }
    // Remainder: |term_i| * |u|^2/((2i)(2i+1)) / (1 - ratio) with ratio <= 1/2.
    let d = Ball::from_i64((2 * i) as i64 * (2 * i + 1) as i64, prec);
    let next = term.abs().mul(&r2).div(&d).expect("nonzero").mul_i64(2);
    sum.inflate(&next.upper())
}

/// `g(z) = theta11(z; tau)/z`, continued holomorphically through `z = 0`.
pub fn g_at(z: &BallComplex, ctx: &ThetaContext) -> Result<BallComplex, ThetaError> {
    g_at_prec(z, ctx, ctx.bits())
}

fn g_at_prec(z: &BallComplex, ctx: &ThetaContext, prec: u32) -> Result<BallComplex, ThetaError> {
    let tau = ctx.tau(prec);
    let far = z.abs().lower() >= 0.25;
    if far {
        let th = theta11_direct(z, &tau, prec)?;
        return th.div(z).map_err(|_| ThetaError::ContainsZero);
    }
    // theta(z)/z = -2 pi sum_m (-1)^m (2m+1) q_m sinc((2m+1) pi z)
    let (t, y) = im_bounds(z, &tau)?;
    let (n, tail) = cutoff(1, &t, &y, prec)?;
    let guard = prec + 16 + (2.0 * (n as f64) * std::f64::consts::PI * 0.25 * 1.45) as u32;
    let pi = Ball::pi(guard);
    let zg = BallComplex::new(z.re.round_to(guard), z.im.round_to(guard));
    let taug = ctx.tau(guard);
    let mut sum = BallComplex::zero(guard);
    for m in 0..n {
        let k = Ball::from_rational(&half_int(m), guard);
        let q = unit_exp(&taug.scale(&k.sqr()));
        let odd = 2 * m as i64 + 1;
        let s = sinc(&zg.scale(&pi.mul_i64(odd)), guard);
        let mut term = q.mul(&s).mul_i64(odd);
        if m % 2 == 1 {
            term = term.neg();
        }
        sum = sum.add(&term);
    }
    let v = sum.scale(&pi).mul_i64(-2).inflate(&tail);
    Ok(BallComplex::new(v.re.round_to(prec), v.im.round_to(prec)))
}

/// `log|theta11(z; tau0)|` for any `z`, through lattice reduction.
///
/// Writing `z = a tau0 + b + d` with `d` in the fundamental cell and `x(d)`
/// its first lattice coordinate, `log|theta11(z)| = pi (a^2 + 2 a x(d)) Im tau0
/// + log|theta11(d)|`.
pub fn log_abs_theta(z: &BallComplex, ctx: &ThetaContext) -> Result<LogMagnitude, ThetaError> {
    let prec = ctx.bits();
    let r = lattice_reduce(z, &ctx.tau(prec))?;
    log_abs_theta_reduced(&r.a, &r.dx, &r.dy, ctx)
}

/// `log|theta11(a tau0 + b + d; tau0)|` from the lattice part `a` and the
/// reduced coordinates `d = dx tau0 + dy` (`b` does not affect the modulus).
pub fn log_abs_theta_reduced(a: &Integer, dx: &Ball, dy: &Ball, ctx: &ThetaContext) -> Result<LogMagnitude, ThetaError> {
    if dx.is_exact_zero() && dy.is_exact_zero() {
        return Ok(LogMagnitude::NegInfinity);
    }
    let prec = ctx.bits().max(2 * a.significant_bits() + 64);
    let tau = ctx.tau(prec);
    let d = tau.scale(dx).add(&BallComplex::from_real(dy.clone()));
    let th = theta11_direct(&d, &tau, prec)?;
    if th.contains_zero() {
        return Err(ThetaError::ContainsZero);
    }
    let local = th.ln_abs().map_err(|_| ThetaError::ContainsZero)?;
    Ok(LogMagnitude::Finite(local.add(&lattice_exponent(a, dx, ctx, prec))))
}

/// `pi (a^2 + 2 a dx) Im tau0`, with `a^2` formed exactly.
pub fn lattice_exponent(a: &Integer, dx: &Ball, ctx: &ThetaContext, prec: u32) -> Ball {
    if *a == 0 {
        return Ball::zero(prec);
    }
    let a2 = Ball::from_integer(&Integer::from(a * a), prec);
    let cross = dx.mul(&Ball::from_integer(a, prec)).mul_i64(2);
    a2.add(&cross).mul(&Ball::from_rational(&ctx.tau_im, prec)).mul(&Ball::pi(prec))
}

/// `theta11(z + a tau + b) / (exp(-pi i (a^2 tau + 2 a z)) theta11(z))`,
/// the unimodular factor in the quasi-periodicity relation. Direct summation
/// gives `(-1)^(a+b)`.
pub fn quasi_period_phase(z: &BallComplex, a: i64, b: i64, ctx: &ThetaContext) -> Result<BallComplex, ThetaError> {
    let prec = ctx.bits();
    let tau = ctx.tau(prec);
    let shifted = z.add(&tau.mul_i64(a)).add(&BallComplex::from_f64(b as f64, 0.0, prec));
    let lhs = theta11_direct(&shifted, &tau, prec)?;
    let arg = tau.mul_i64(a * a).add(&z.mul_i64(2 * a)).neg();
    let rhs = unit_exp(&arg).mul(&theta11_direct(z, &tau, prec)?);
    lhs.div(&rhs).map_err(|_| ThetaError::ContainsZero)
}

/// Certified lower bound for `min |g|` over the fundamental cell, with the
/// sampled evidence that the minimum sits on the boundary.
#[derive(Clone, Debug)]
pub struct CConstant {
    /// Exact ball at the certified lower bound; positive.
    pub c: Ball,
    pub level: u32,
    pub segments: usize,
    /// Smallest sampled `|g|` on the boundary and its lattice coordinates.
    pub boundary_min: f64,
    pub boundary_argmin: (f64, f64),
    /// Smallest sampled `|g|` at strictly interior grid points.
    pub interior_min: f64,
    pub interior_argmin: (f64, f64),
}

impl CConstant {
    pub fn lower(&self) -> Float {
        self.c.lower()
    }

    /// The sampled minimum over the closed cell is attained on the boundary.
    pub fn minimizer_on_boundary(&self) -> bool {
        self.boundary_min <= self.interior_min
    }
}

/// One boundary segment: centre `xc tau0 + yc`, direction `tau0` (x varies)
/// or `1` (y varies), half-length `h` in that coordinate.
struct Segment {
    xc: Rational,
    yc: Rational,
    along_x: bool,
}

struct SegmentBound {
    lower: Float,
    sample: f64,
    at: (f64, f64),
}

/// `sum_k (2 pi |k|)^j exp(-pi (k^2 T - 2 |k| Y))` over all half-integers,
/// an upper bound for `|theta11^{(j)}|` on the strip `|Im z| <= Y`.
fn derivative_bound(j: u32, t: &Float, y: &Float, prec: u32) -> Result<Ball, ThetaError> {
    let (n, tail) = cutoff(j, t, y, prec)?;
    let pi = Ball::pi(prec);
    let tb = Ball::with_radius(Float::with_val(prec, t), &Float::new(64));
    let yb = Ball::with_radius(Float::with_val(prec, y), &Float::new(64));
    let mut sum = Ball::zero(prec);
    for m in 0..n {
        let k = Ball::from_rational(&half_int(m), prec);
        let e = k.sqr().mul(&tb).sub(&k.mul(&yb).mul_i64(2)).mul(&pi).neg().exp();
        let mut term = e.mul_i64(2);
        for _ in 0..j {
            term = term.mul(&pi.mul(&k).mul_i64(2));
        }
        sum = sum.add(&term);
    }
    Ok(Ball::from_interval(&sum.lower(), &Float::with_val_round(prec, sum.upper() + &tail, Round::Up).0, prec))
}

fn segment_bound(
    s: &Segment,
    h: &Rational,
    m2: &Ball,
    ctx: &ThetaContext,
    prec: u32,
) -> Result<SegmentBound, ThetaError> {
    let tau = ctx.tau(prec);
    let xc = Ball::from_rational(&s.xc, prec);
    let yc = Ball::from_rational(&s.yc, prec);
    let zc = tau.scale(&xc).add(&BallComplex::from_real(yc));
    let jet = theta11_jet(&zc, &tau, prec, 1)?;
    let g = jet[0].div(&zc).map_err(|_| ThetaError::ContainsZero)?;
    let gp = jet[1].mul(&zc).sub(&jet[0]).div(&zc.sqr()).map_err(|_| ThetaError::ContainsZero)?;
    let dir = if s.along_x { tau.clone() } else { BallComplex::one(prec) };
    let b = gp.mul(&dir);
    let hb = Ball::from_rational(h, prec);
    // Distance from 0 to the segment {g + b t : |t| <= h}.
    let dist = segment_distance(&g, &b, &hb);
    let rem = m2.mul(&dir.abs_sq()).mul(&hb.sqr()).mul_2si(-1);
    let lower = Float::with_val_round(prec, dist.lower() - rem.upper(), Round::Down).0;
    Ok(SegmentBound { lower, sample: g.abs().to_f64(), at: (s.xc.to_f64(), s.yc.to_f64()) })
}

fn segment_distance(a: &BallComplex, b: &BallComplex, h: &Ball) -> Ball {
    let bb = b.abs_sq();
    if !bb.is_positive() {
        return a.abs().sub(&b.abs().mul(h)).clamp_nonneg();
    }
    // Closest parameter on the full line: t* = -Re(a conj b)/|b|^2.
    let ab = a.mul(&b.conj());
    let t_star = ab.re.neg().div(&bb).expect("positive");
    let line = ab.im.abs().div(&bb.sqrt_nonneg()).expect("positive");
    if t_star.certainly_gt(h) || t_star.neg().certainly_gt(h) {
        let plus = a.add(&b.scale(h)).abs();
        let minus = a.sub(&b.scale(h)).abs();
        plus.min(&minus)
    } else {
        line
    }
}

/// Certified positive lower bound for `min |theta11(z; tau0)/z|` over the
/// cell `|x(z)|, |y(z)| <= 1/2`.
///
/// The minimum of a zero-free holomorphic function's modulus is attained on
/// the boundary, so only the four edges are certified, each split into
/// `16 * 2^level` segments. On a segment `|g| >= dist(0, g(c) + g'(c) t) -
/// M2 h^2 / 2` with `M2` bounding `|g''|` on the boundary.
pub fn c_constant(ctx: &ThetaContext, level: u32) -> Result<CConstant, ThetaError> {
    let prec = ctx.bits();
    let per_edge = 16u32 << level;
    let h = Rational::from((1, 2 * per_edge as u64));
    let half = Rational::from((1, 2));
    let mut segments = Vec::with_capacity(4 * per_edge as usize);
    for i in 0..per_edge {
        let c = Rational::from((2 * i as i64 + 1 - per_edge as i64, 2 * per_edge as i64));
        for sgn in [-1, 1] {
            let edge = Rational::from(&half * sgn);
            segments.push(Segment { xc: edge.clone(), yc: c.clone(), along_x: false });
            segments.push(Segment { xc: c.clone(), yc: edge, along_x: true });
        }
    }

    // |Im z| <= Im(tau0)/2 on the cell; |z| >= M/2 on its boundary.
    let tau = ctx.tau(prec);
    let t = Float::with_val_round(64, tau.im.lower(), Round::Down).0;
    let y = Float::with_val_round(64, tau.im.upper(), Round::Up).0 / 2u32;
    let r = ctx.m_constant(prec).mul_2si(-1);
    let r = Ball::with_radius(r.lower(), &Float::new(64));
    let b0 = derivative_bound(0, &t, &y, prec)?;
    let b1 = derivative_bound(1, &t, &y, prec)?;
    let b2 = derivative_bound(2, &t, &y, prec)?;
    let m2 = b2
        .div(&r)
        .and_then(|v| Ok(v.add(&b1.mul_i64(2).div(&r.sqr())?)))
        .and_then(|v| Ok(v.add(&b0.mul_i64(2).div(&r.sqr().mul(&r))?)))
        .map_err(|_| ThetaError::ContainsZero)?;
    let m2 = Ball::with_radius(m2.upper(), &Float::new(64));

    let bounds: Vec<SegmentBound> = segments
        .par_iter()
        .map(|s| segment_bound(s, &h, &m2, ctx, prec))
        .collect::<Result<_, _>>()?;

    let mut lower = bounds[0].lower.clone();
    let mut boundary_min = f64::INFINITY;
    let mut boundary_argmin = (0.0, 0.0);
    for b in &bounds {
        if b.lower < lower {
            lower = b.lower.clone();
        }
        if b.sample < boundary_min {
            boundary_min = b.sample;
            boundary_argmin = b.at;
        }
    }

    let grid = 8u32 << level;
    let points: Vec<(Rational, Rational)> = (1..grid)
        .flat_map(|i| (1..grid).map(move |j| (i, j)))
        .map(|(i, j)| {
            let x = Rational::from((i as i64, grid as i64)) - &half;
            let y = Rational::from((j as i64, grid as i64)) - &half;
            (x, y)
        })
        .collect();
    let samples: Vec<(f64, (f64, f64))> = points
        .par_iter()
        .map(|(x, y)| {
            let z = tau
                .scale(&Ball::from_rational(x, prec))
                .add(&BallComplex::from_real(Ball::from_rational(y, prec)));
            let g = g_at_prec(&z, ctx, prec)?;
            Ok((g.abs().to_f64(), (x.to_f64(), y.to_f64())))
        })
        .collect::<Result<_, ThetaError>>()?;
    let (interior_min, interior_argmin) = samples
        .into_iter()
        .fold((f64::INFINITY, (0.0, 0.0)), |acc, s| if s.0 < acc.0 { s } else { acc });

    Ok(CConstant {
        c: Ball::with_radius(lower, &Float::new(64)),
        level,
        segments: bounds.len(),
        boundary_min,
        boundary_argmin,
        interior_min,
        interior_argmin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ThetaContext {
        ThetaContext::imaginary_unit(PrecisionBudget::new(128, 2))
    }

    fn c(re: f64, im: f64) -> BallComplex {
        BallComplex::from_f64(re, im, 128)
    }

    #[test]
    fn zero_at_origin_and_not_at_half() {
        let tau = ctx().tau(128);
        let t0 = theta11_direct(&c(0.0, 0.0), &tau, 128).unwrap();
        assert!(t0.contains_zero());
        let th = theta11_direct(&c(0.5, 0.0), &tau, 128).unwrap();
        assert!(!th.contains_zero());
    }

    #[test]
    fn sine_form_matches_direct_sum() {
        // theta11(z) = -2 sum (-1)^m q^{(m+1/2)^2} sin((2m+1) pi z), q = e^{-pi} at tau = i.
        let z = 0.3f64;
        let q = (-std::f64::consts::PI).exp();
        let mut expect = 0.0;
        for m in 0..10 {
            let k = m as f64 + 0.5;
            expect += -2.0 * (-1f64).powi(m) * q.powf(k * k) * ((2 * m + 1) as f64 * std::f64::consts::PI * z).sin();
        }
        let th = theta11_direct(&c(z, 0.0), &ctx().tau(128), 128).unwrap();
        assert!((th.re.to_f64() - expect).abs() < 1e-14);
        assert!(th.im.to_f64().abs() < 1e-14);
    }

    #[test]
    fn jet_derivative_matches_difference_quotient() {
        let tau = ctx().tau(128);
        let z = c(0.2, 0.1);
        let jet = theta11_jet(&z, &tau, 128, 1).unwrap();
        let h = 1e-7;
        let a = theta11_direct(&c(0.2 + h, 0.1), &tau, 128).unwrap();
        let b = theta11_direct(&c(0.2 - h, 0.1), &tau, 128).unwrap();
        let fd = a.sub(&b).to_f64();
        let (re, im) = jet[1].to_f64();
        assert!((fd.0 / (2.0 * h) - re).abs() < 1e-6 && (fd.1 / (2.0 * h) - im).abs() < 1e-6);
    }

    #[test]
    fn g_is_continuous_through_zero() {
        let ctx = ctx();
        let g0 = g_at(&c(0.0, 0.0), &ctx).unwrap();
        assert!(!g0.contains_zero());
        let small = g_at(&c(1e-9, 0.0), &ctx).unwrap();
        assert!((g0.re.to_f64() - small.re.to_f64()).abs() < 1e-6);
        let z = c(0.25, 0.0);
        let q = theta11_direct(&z, &ctx.tau(128), 128).unwrap().div(&z).unwrap();
        assert!(g_at(&z, &ctx).unwrap().overlaps(&q));
        // Both evaluation paths agree just inside the switch radius.
        let z = c(0.2, 0.1);
        let q = theta11_direct(&z, &ctx.tau(128), 128).unwrap().div(&z).unwrap();
        assert!(g_at(&z, &ctx).unwrap().overlaps(&q));
    }

    #[test]
    fn m_constant_for_i() {
        assert!(ctx().m_constant(64).contains_f64(1.0));
        let t = ThetaContext::new(Rational::from(1), Rational::from(1), PrecisionBudget::default()).unwrap();
        assert!((t.m_constant(64).to_f64() - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reduced_log_matches_direct_on_the_cell() {
        let ctx = ctx();
        let z = c(0.3, -0.2);
        let direct = theta11_direct(&z, &ctx.tau(128), 128).unwrap().ln_abs().unwrap();
        let reduced = log_abs_theta(&z, &ctx).unwrap();
        assert!(reduced.ball().unwrap().overlaps(&direct));
    }

    #[test]
    fn lattice_points_have_neg_infinite_log() {
        let ctx = ctx();
        let z = BallComplex::from_f64(7.0, 5.0, 128);
        assert!(log_abs_theta(&z, &ctx).unwrap().is_neg_infinity());
    }

    #[test]
    fn cutoff_overflow_for_huge_imaginary_part() {
        let tau = ctx().tau(64);
        let z = c(0.0, 1e7);
        assert_eq!(theta11_direct(&z, &tau, 64).unwrap_err(), ThetaError::CutoffOverflow);
    }
}
