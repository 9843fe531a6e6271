//! Nearest integers, factoradic expansions and the growth witnesses of
//! `d(n!x)`.
//!
//! For a real `x`, `e(x)` is the nearest integer with ties rounded down and
//! `d(x) = x - e(x)` lies in `[-1/2, 1/2]`. Iterating `b_k = d(k * b_{k-1})`
//! yields digits `a_k = e(k * b_{k-1})` with `x = sum a_k / k! + b_K / K!`,
//! and the remainder `b_n` is exactly `d(n! x)`. The product `n! x` is never
//! formed in floating point; its integer part is tracked exactly instead.

use rug::float::Round;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::numeric::{log2_factorial_bits, with_restarts, Ball, BallComplex, ExactReal, PrecisionBudget};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DiophantineError {
    #[error("ball straddles a half-integer; more precision is needed")]
    TieStraddle,
    #[error("input is rational; the statement needs an irrational number")]
    RationalInput,
    #[error("imaginary part of tau0 is not certified positive")]
    NonpositiveImTau,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("precision exhausted at {bits} bits")]
    PrecisionExhausted { bits: u32 },
}

/// `(e(x), d(x))` for an exact rational.
pub fn nearest_int_exact(x: &Rational) -> (Integer, Rational) {
    let shifted = x - Rational::from((1, 2));
    let e = shifted.ceil().into_numer_denom().0;
    let d = Rational::from(x - &e);
    (e, d)
}

/// `(e(x), d(x))` for every point of the ball `x`.
///
/// Fails with [`DiophantineError::TieStraddle`] unless all points of the ball
/// share the same nearest integer. The remainder is intersected with
/// `[-1/2, 1/2]`, which contains it by construction.
pub fn nearest_int(x: &Ball) -> Result<(Integer, Ball), DiophantineError> {
    let prec = x.prec();
    let half = Float::with_val(prec, 0.5);
    let lo = Float::with_val_round(prec, x.lower() - &half, Round::Down).0.ceil();
    let hi = Float::with_val_round(prec, x.upper() - &half, Round::Up).0.ceil();
    if lo != hi {
        return Err(DiophantineError::TieStraddle);
    }
    let e = lo.to_integer().expect("finite ball");
    let d = x.sub(&Ball::from_integer(&e, prec)).clamp(&Float::with_val(prec, -0.5), &half);
    Ok((e, d))
}

/// One step of the factoradic recurrence.
#[derive(Clone, Debug)]
pub struct FactoradicState {
    pub k: u32,
    /// Digit `a_k`.
    pub a: Integer,
    /// Remainder `b_k = d(k! x)`, certified inside `[-1/2, 1/2]`.
    pub b: Ball,
    /// `b_k` exactly, for rational seeds.
    pub b_exact: Option<Rational>,
    /// `e(k! x)`, so that `k! x = e + b_k`.
    pub e: Integer,
}

/// The first `K` states of the factoradic expansion of a seed.
#[derive(Clone, Debug)]
pub struct Factoradic {
    seed: ExactReal,
    bits: u32,
    states: Vec<FactoradicState>,
}

impl Factoradic {
    pub fn seed(&self) -> &ExactReal {
        &self.seed
    }

    /// Working precision of the ball recurrence.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn depth(&self) -> u32 {
        self.states.len() as u32
    }

    pub fn states(&self) -> &[FactoradicState] {
        &self.states
    }

    /// State `k` (1-based).
    pub fn state(&self, k: u32) -> &FactoradicState {
        &self.states[k as usize - 1]
    }

    pub fn digits(&self) -> Vec<Integer> {
        self.states.iter().map(|s| s.a.clone()).collect()
    }

    pub fn remainder(&self) -> &Ball {
        &self.states.last().expect("depth >= 1").b
    }

    /// `sum_{k <= K} a_k / k!` as an exact rational.
    pub fn partial_sum(&self) -> Rational {
        let mut fact = Integer::from(1);
        let mut sum = Rational::new();
        for s in &self.states {
            fact *= s.k;
            sum += Rational::from((s.a.clone(), fact.clone()));
        }
        sum
    }
}

fn expand_exact(x: &Rational, depth: u32, bits: u32) -> Vec<FactoradicState> {
    let mut states = Vec::with_capacity(depth as usize);
    let (a, b) = nearest_int_exact(x);
    let mut e = a.clone();
    states.push(FactoradicState { k: 1, a, b: Ball::from_rational(&b, bits), b_exact: Some(b.clone()), e: e.clone() });
    let mut prev = b;
    for k in 2..=depth {
        let (a, b) = nearest_int_exact(&Rational::from(&prev * k));
        e = e * k + &a;
        states.push(FactoradicState { k, a, b: Ball::from_rational(&b, bits), b_exact: Some(b.clone()), e: e.clone() });
        prev = b;
    }
    states
}

fn expand_ball(x: &ExactReal, depth: u32, bits: u32) -> Result<Vec<FactoradicState>, DiophantineError> {
    let mut states = Vec::with_capacity(depth as usize);
    let (a, b) = nearest_int(&x.eval_bits(bits))?;
    let mut e = a.clone();
    states.push(FactoradicState { k: 1, a, b: b.clone(), b_exact: None, e: e.clone() });
    let mut prev = b;
    for k in 2..=depth {
        let (a, b) = nearest_int(&prev.mul_i64(k as i64))?;
        e = e * k + &a;
        states.push(FactoradicState { k, a, b: b.clone(), b_exact: None, e: e.clone() });
        prev = b;
    }
    Ok(states)
}

/// Working precision that keeps `b_K` accurate to about 64 bits: each step
/// multiplies the absolute error by `k`.
pub fn bits_for_depth(depth: u32, budget: &PrecisionBudget) -> u32 {
    budget.bits().max(log2_factorial_bits(depth) + 64)
}

/// The first `depth` factoradic states of `x`.
///
/// Rational seeds are expanded exactly. Surd seeds run the ball recurrence
/// and restart from the seed at doubled precision when a step straddles a
/// half-integer.
pub fn factoradic_expand(
    x: &ExactReal,
    depth: u32,
    budget: &PrecisionBudget,
) -> Result<Factoradic, DiophantineError> {
    if depth == 0 {
        return Err(DiophantineError::ZeroDepth);
    }
    let base = budget.at_least(bits_for_depth(depth, budget));
    if let Some(r) = x.as_rational() {
        return Ok(Factoradic { seed: x.clone(), bits: base.bits(), states: expand_exact(r, depth, base.bits()) });
    }
    let mut used = base.bits();
    let states = with_restarts(
        &base,
        |bits| {
            used = bits;
            expand_ball(x, depth, bits)
        },
        |e| *e == DiophantineError::TieStraddle,
    )
    .map_err(|_| DiophantineError::PrecisionExhausted { bits: used })?;
    Ok(Factoradic { seed: x.clone(), bits: used, states })
}

/// `(d(n! x), e(n! x))`.
pub fn d_factorial(x: &ExactReal, n: u32, budget: &PrecisionBudget) -> Result<(Ball, Integer), DiophantineError> {
    let f = factoradic_expand(x, n, budget)?;
    let s = f.state(n);
    Ok((s.b.clone(), s.e.clone()))
}

/// `(d(n! x), e(n! x))` for a rational `x`, computed exactly.
pub fn d_factorial_exact(x: &Rational, n: u32) -> (Rational, Integer) {
    assert!(n >= 1, "depth must be at least 1");
    let s = expand_exact(x, n, 64).pop().expect("nonempty");
    (s.b_exact.expect("exact state"), s.e)
}

/// An index `n` with `|d(n! x)| >= 1/(2(n+1))`, certified on the whole ball.
#[derive(Clone, Debug)]
pub struct Witness {
    pub n: u32,
    /// Enclosure of `|d(n! x)|`.
    pub d_bound: Ball,
    /// `1/(2(n+1))`.
    pub threshold: Rational,
}

pub fn witness_threshold(n: u32) -> Rational {
    Rational::from((1, 2 * (n as u64 + 1)))
}

fn collect_witnesses(f: &Factoradic, n_max: u32) -> Result<Vec<Witness>, DiophantineError> {
    let mut out = Vec::new();
    for s in &f.states()[..n_max as usize] {
        let threshold = witness_threshold(s.k);
        let d_bound = s.b.abs();
        if d_bound.lower() >= threshold {
            out.push(Witness { n: s.k, d_bound, threshold });
        } else if d_bound.upper() >= threshold {
            // |d| is irrational and the threshold rational, so more bits decide.
            return Err(DiophantineError::TieStraddle);
        }
    }
    Ok(out)
}

/// Every `n <= n_max` with `|d(n! x)| >= 1/(2(n+1))`, for irrational `x`.
///
/// The inequality is checked on the certified ball, so the result contains
/// every `n` whose next digit `a_{n+1}` is nonzero, and no `n` that fails it.
pub fn witness_search(x: &ExactReal, n_max: u32, budget: &PrecisionBudget) -> Result<Vec<Witness>, DiophantineError> {
    if x.is_rational() {
        return Err(DiophantineError::RationalInput);
    }
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let base = budget.at_least(bits_for_depth(n_max, budget));
    let mut used = base.bits();
    with_restarts(
        &base,
        |bits| {
            used = bits;
            let f = factoradic_expand(x, n_max, &PrecisionBudget::new(bits, 0))?;
            collect_witnesses(&f, n_max)
        },
        |e| *e == DiophantineError::TieStraddle,
    )
    .map_err(|e| match e {
        DiophantineError::TieStraddle => DiophantineError::PrecisionExhausted { bits: used },
        other => other,
    })
}

/// Differences between consecutive witness indices.
pub fn witness_gaps(ws: &[Witness]) -> Vec<u32> {
    ws.windows(2).map(|p| p[1].n - p[0].n).collect()
}

/// Real coordinates `(x, y)` of `z = x tau0 + y`.
#[derive(Clone, Debug)]
pub struct LatticeCoords {
    pub x: Ball,
    pub y: Ball,
}

pub fn lattice_coords(z: &BallComplex, tau0: &BallComplex) -> Result<LatticeCoords, DiophantineError> {
    if !tau0.im.is_positive() {
        return Err(DiophantineError::NonpositiveImTau);
    }
    let x = z.im.div(&tau0.im).map_err(|_| DiophantineError::NonpositiveImTau)?;
    let y = z.re.sub(&x.mul(&tau0.re));
    Ok(LatticeCoords { x, y })
}

/// `z = (a tau0 + b) + d` with `d` in the fundamental cell.
#[derive(Clone, Debug)]
pub struct ReducedPoint {
    pub a: Integer,
    pub b: Integer,
    /// Lattice coordinates of `d`, each in `[-1/2, 1/2]`.
    pub dx: Ball,
    pub dy: Ball,
    pub d: BallComplex,
}

impl ReducedPoint {
    /// `a tau0 + b + d`.
    pub fn reconstruct(&self, tau0: &BallComplex) -> BallComplex {
        let prec = tau0.prec().max(self.d.prec());
        let a = Ball::from_integer(&self.a, prec);
        let b = Ball::from_integer(&self.b, prec);
        tau0.scale(&a).add(&BallComplex::from_real(b)).add(&self.d)
    }
}

pub fn lattice_reduce(z: &BallComplex, tau0: &BallComplex) -> Result<ReducedPoint, DiophantineError> {
    let c = lattice_coords(z, tau0)?;
    let (a, dx) = nearest_int(&c.x)?;
    let (b, dy) = nearest_int(&c.y)?;
    let d = tau0.scale(&dx).add(&BallComplex::from_real(dy.clone()));
    Ok(ReducedPoint { a, b, dx, dy, d })
}
