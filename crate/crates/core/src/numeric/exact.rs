use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use super::{Ball, PrecisionBudget};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("negative radicand {0}: only real quadratic surds are supported")]
    NegativeRadicand(Integer),
    #[error("radicand {0} is too large to factor (limit 2^64)")]
    RadicandTooLarge(Integer),
    #[error("cannot combine surds with different radicands ({0} and {1})")]
    MixedRadicands(Integer, Integer),
    #[error("division by zero")]
    DivisionByZero,
}

/// An exact real: a rational, or a quadratic surd `a + b*sqrt(m)` with `b != 0`
/// and `m >= 2` squarefree.
///
/// Construction always canonicalizes, so structural equality is value
/// equality and the value is irrational exactly when the variant is `Surd`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactReal {
    Rational(Rational),
    Surd { a: Rational, b: Rational, m: Integer },
}

/// Splits `m` as `s^2 * core` with `core` squarefree.
fn squarefree_split(m: u64) -> (u64, u64) {
    let mut rem = m;
    let mut square = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p).saturating_mul(p) <= rem {
        if rem.is_multiple_of(p) {
            let mut e = 0;
            while rem.is_multiple_of(p) {
                rem /= p;
                e += 1;
            }
            square *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // Every prime factor of `rem` now exceeds its cube root, so `rem` is
    // 1, a prime, a product of two distinct primes, or a prime square.
    let r = (rem as f64).sqrt() as u64;
    let root = (r.saturating_sub(1)..=r + 1).find(|&s| s.checked_mul(s) == Some(rem));
    match root {
        Some(s) if rem > 1 => square *= s,
        _ => core *= rem,
    }
    (square, core)
}

impl ExactReal {
    pub fn rational(r: Rational) -> Self {
        ExactReal::Rational(r)
    }

    pub fn from_i64(v: i64) -> Self {
        ExactReal::Rational(Rational::from(v))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactReal::Rational(Rational::from((num, den)))
    }

    /// `sqrt(m)`.
    pub fn sqrt(m: i64) -> Result<Self, ExactError> {
        Self::surd(Rational::new(), Rational::from(1), Integer::from(m))
    }

    /// Canonical form of `a + b*sqrt(m)`.
    pub fn surd(a: Rational, b: Rational, m: Integer) -> Result<Self, ExactError> {
        if m < 0 {
            return Err(ExactError::NegativeRadicand(m));
        }
        if b == 0 || m == 0 {
            return Ok(ExactReal::Rational(a));
        }
        let mu = m.to_u64().ok_or_else(|| ExactError::RadicandTooLarge(m.clone()))?;
        let (s, core) = squarefree_split(mu);
        let b = b * Integer::from(s);
        if core == 1 {
            return Ok(ExactReal::Rational(a + b));
        }
        Ok(ExactReal::Surd { a, b, m: Integer::from(core) })
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactReal::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            ExactReal::Rational(r) => Some(r),
            ExactReal::Surd { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactReal::Rational(r) if *r == 0)
    }

    /// `(a, b, m)` with `m = 0` for rationals.
    fn parts(&self) -> (Rational, Rational, Integer) {
        match self {
            ExactReal::Rational(r) => (r.clone(), Rational::new(), Integer::new()),
            ExactReal::Surd { a, b, m } => (a.clone(), b.clone(), m.clone()),
        }
    }

    fn common_radicand(&self, other: &Self) -> Result<Integer, ExactError> {
        match (self, other) {
            (ExactReal::Surd { m: m1, .. }, ExactReal::Surd { m: m2, .. }) if m1 != m2 => {
                Err(ExactError::MixedRadicands(m1.clone(), m2.clone()))
            }
            (ExactReal::Surd { m, .. }, _) | (_, ExactReal::Surd { m, .. }) => Ok(m.clone()),
            _ => Ok(Integer::new()),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(Rational::from(-r)),
            ExactReal::Surd { a, b, m } => {
                ExactReal::Surd { a: Rational::from(-a), b: Rational::from(-b), m: m.clone() }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExactError> {
        let m = self.common_radicand(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        Self::surd(a1 + a2, b1 + b2, m)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ExactError> {
        let m = self.common_radicand(other)?;
        let (a1, b1, _) = self.parts();
        let (a2, b2, _) = other.parts();
        let a = Rational::from(&a1 * &a2) + Rational::from(&b1 * &b2) * &m;
        let b = Rational::from(&a1 * &b2) + Rational::from(&a2 * &b1);
        Self::surd(a, b, m)
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        match self {
            ExactReal::Rational(r) if *r == 0 => Err(ExactError::DivisionByZero),
            ExactReal::Rational(r) => Ok(ExactReal::Rational(Rational::from(r.recip_ref()))),
            ExactReal::Surd { a, b, m } => {
                // (a - b sqrt m) / (a^2 - b^2 m); the norm is nonzero for irrationals.
                let norm = Rational::from(a * a) - Rational::from(b * b) * m;
                Self::surd(
                    Rational::from(a / &norm),
                    -Rational::from(b / &norm) ,
                    m.clone(),
                )
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        self.mul(&other.recip()?)
    }

    pub fn pow(&self, e: u32) -> Result<Self, ExactError> {
        let mut acc = ExactReal::from_i64(1);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn mul_integer(&self, k: &Integer) -> Self {
        match self {
            ExactReal::Rational(r) => ExactReal::Rational(Rational::from(r * k)),
            ExactReal::Surd { a, b, m } => {
                if *k == 0 {
                    return ExactReal::Rational(Rational::new());
                }
                ExactReal::Surd { a: Rational::from(a * k), b: Rational::from(b * k), m: m.clone() }
            }
        }
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        match self {
            ExactReal::Rational(r) => r.cmp0(),
            ExactReal::Surd { a, b, m } => {
                let sa = a.cmp0();
                let sb = b.cmp0();
                if sa == sb || sa == Ordering::Equal {
                    return sb;
                }
                // Opposite signs: compare a^2 with b^2 m.
                let lhs = Rational::from(a * a);
                let rhs = Rational::from(b * b) * m;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    _ => sb,
                }
            }
        }
    }

    /// Certified enclosure at `budget.bits()` bits.
    ///
    /// The radius satisfies `rad <= 2^(1-bits) * (1 + |mid|)`.
    pub fn eval(&self, budget: &PrecisionBudget) -> Ball {
        self.eval_bits(budget.bits())
    }

    pub fn eval_bits(&self, bits: u32) -> Ball {
        match self {
            ExactReal::Rational(r) => Ball::from_rational(r, bits),
            ExactReal::Surd { a, b, m } => {
                let guard = 64
                    + a.numer().significant_bits()
                    + a.denom().significant_bits()
                    + b.numer().significant_bits()
                    + b.denom().significant_bits();
                let w = bits + guard;
                let lo = Float::with_val_round(w, m, Round::Down).0.sqrt_round_owned(Round::Down);
                let hi = Float::with_val_round(w, m, Round::Up).0.sqrt_round_owned(Round::Up);
                let root = Ball::from_interval(&lo, &hi, w);
                let v = Ball::from_rational(a, w).add(&Ball::from_rational(b, w).mul(&root));
                v.round_to(bits)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.eval_bits(64).to_f64()
    }
}

trait SqrtOwned {
    fn sqrt_round_owned(self, round: Round) -> Self;
}

impl SqrtOwned for Float {
    fn sqrt_round_owned(mut self, round: Round) -> Self {
        self.sqrt_round(round);
        self
    }
}

/// Eval entry point mirroring the ball-arithmetic API.
pub fn eval_exact(x: &ExactReal, budget: &PrecisionBudget) -> Ball {
    x.eval(budget)
}

fn fmt_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(r) => write!(f, "{}", fmt_rational(r)),
            ExactReal::Surd { a, b, m } => {
                let root = if *b == 1 {
                    format!("sqrt({m})")
                } else if *b == -1 {
                    format!("-sqrt({m})")
                } else {
                    format!("{}*sqrt({m})", fmt_rational(b))
                };
                if *a == 0 {
                    write!(f, "{root}")
                } else if b.cmp0() == Ordering::Less {
                    let pos = Rational::from(-b);
                    let mag = if pos == 1 { format!("sqrt({m})") } else { format!("{}*sqrt({m})", fmt_rational(&pos)) };
                    write!(f, "{} - {mag}", fmt_rational(a))
                } else {
                    write!(f, "{} + {root}", fmt_rational(a))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn squarefree_split_examples() {
        assert_eq!(squarefree_split(12), (2, 3));
        assert_eq!(squarefree_split(49), (7, 1));
        assert_eq!(squarefree_split(2 * 3 * 5 * 7), (1, 210));
        assert_eq!(squarefree_split(1_000_003 * 1_000_003), (1_000_003, 1));
        assert_eq!(squarefree_split(999_983 * 1_000_003), (1, 999_983 * 1_000_003));
    }

    #[test]
    fn canonicalization_collapses_square_radicands() {
        assert_eq!(ExactReal::sqrt(4).unwrap(), ExactReal::from_i64(2));
        assert_eq!(
            ExactReal::sqrt(8).unwrap(),
            ExactReal::Surd { a: q(0, 1), b: q(2, 1), m: Integer::from(2) }
        );
        assert!(ExactReal::surd(q(1, 2), q(0, 1), Integer::from(5)).unwrap().is_rational());
        assert!(ExactReal::sqrt(-3).is_err());
    }

    #[test]
    fn field_operations_stay_canonical() {
        let s2 = ExactReal::sqrt(2).unwrap();
        assert_eq!(s2.mul(&s2).unwrap(), ExactReal::from_i64(2));
        let phi = ExactReal::from_i64(1).add(&ExactReal::sqrt(5).unwrap()).unwrap().div(&ExactReal::from_i64(2)).unwrap();
        // phi^2 = phi + 1
        assert_eq!(phi.mul(&phi).unwrap(), phi.add(&ExactReal::from_i64(1)).unwrap());
        let inv = phi.recip().unwrap();
        assert_eq!(inv.mul(&phi).unwrap(), ExactReal::from_i64(1));
        assert!(s2.add(&ExactReal::sqrt(3).unwrap()).is_err());
    }

    #[test]
    fn exact_sign() {
        let x = ExactReal::surd(q(3, 2), q(-1, 1), Integer::from(2)).unwrap();
        assert_eq!(x.signum(), Ordering::Greater);
        let y = ExactReal::surd(q(7, 5), q(-1, 1), Integer::from(2)).unwrap();
        assert_eq!(y.signum(), Ordering::Less);
    }

    #[test]
    fn eval_rational_radius_bound() {
        let b = ExactReal::ratio(1, 3).eval_bits(64);
        assert!(b.contains_rational(&q(1, 3)));
        assert!(b.rad_f64() <= 2f64.powi(-63));
        let z = ExactReal::from_i64(0).eval_bits(64);
        assert!(z.is_exact_zero());
    }

    #[test]
    fn display_roundtrips_by_eye() {
        assert_eq!(ExactReal::ratio(-1, 3).to_string(), "-1/3");
        let x = ExactReal::surd(q(1, 2), q(1, 4), Integer::from(5)).unwrap();
        assert_eq!(x.to_string(), "1/2 + 1/4*sqrt(5)");
        let y = ExactReal::surd(q(1, 1), q(-1, 1), Integer::from(2)).unwrap();
        assert_eq!(y.to_string(), "1 - sqrt(2)");
    }
}
