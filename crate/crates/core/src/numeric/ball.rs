use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};

use super::NumericError;

/// Precision of radii. Radii are upper bounds, so a short mantissa rounded
/// upward loses nothing but a little sharpness.
pub(crate) const RAD_PREC: u32 = 64;

fn zero_rad() -> Float {
    Float::new(RAD_PREC)
}

fn add_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a + b, Round::Up).0
}

fn mul_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a * b, Round::Up).0
}

fn abs_up(a: &Float) -> Float {
    Float::with_val_round(RAD_PREC, &*a.as_abs(), Round::Up).0
}

/// Bound on the error of a round-to-nearest result: one ulp of `value`, or
/// zero when MPFR reported the result as exact.
fn rounding_error(value: &Float, ord: Ordering) -> Float {
    if ord == Ordering::Equal {
        return zero_rad();
    }
    match value.get_exp() {
        Some(e) => {
            let mut r = Float::with_val(RAD_PREC, 1u32);
            r <<= e - value.prec() as i32;
            r
        }
        // An inexact zero can only come from underflow.
        None => {
            let mut r = Float::with_val(RAD_PREC, 1u32);
            r <<= rug::float::exp_min();
            r
        }
    }
}

/// A real enclosure `[mid - rad, mid + rad]`.
///
/// The midpoint carries the working precision; the radius is kept at a fixed
/// short precision and is always rounded up. Binary operations work at the
/// larger of the two operand precisions.
#[derive(Clone, Debug)]
pub struct Ball {
    mid: Float,
    rad: Float,
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Self { mid: Float::new(prec), rad: zero_rad() }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Self { mid, rad }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "ball from non-finite f64");
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Self { mid, rad }
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Self { mid, rad }
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, v, Round::Nearest);
        let rad = rounding_error(&mid, ord);
        Self { mid, rad }
    }

    /// A ball from an explicit midpoint and radius; the radius is rounded up.
    pub fn with_radius(mid: Float, rad: &Float) -> Self {
        assert!(mid.is_finite() && rad.is_finite() && *rad >= 0, "invalid ball");
        Self { mid, rad: abs_up(rad) }
    }

    /// Smallest ball (at `prec`) containing the interval `[lo, hi]`.
    pub fn from_interval(lo: &Float, hi: &Float, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        let (mut mid, _) = Float::with_val_round(prec, lo + hi, Round::Nearest);
        mid >>= 1u32;
        let r1 = Float::with_val_round(RAD_PREC, hi - &mid, Round::Up).0;
        let r2 = Float::with_val_round(RAD_PREC, &mid - lo, Round::Up).0;
        let rad = if r1 > r2 { r1 } else { r2 };
        Self { mid, rad: rad.max(&zero_rad()) }
    }

    /// Enclosure of pi at `prec` bits.
    pub fn pi(prec: u32) -> Self {
        let lo = Float::with_val_round(prec, Constant::Pi, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Pi, Round::Up).0;
        Self::from_interval(&lo, &hi, prec)
    }

    /// Enclosure of ln 2 at `prec` bits.
    pub fn ln2(prec: u32) -> Self {
        let lo = Float::with_val_round(prec, Constant::Log2, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Log2, Round::Up).0;
        Self::from_interval(&lo, &hi, prec)
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Radius as an `f64`, rounded up (saturates to infinity).
    pub fn rad_f64(&self) -> f64 {
        let f = Float::with_val_round(53, &self.rad, Round::Up).0;
        f.to_f64()
    }

    /// Lower endpoint, rounded down.
    pub fn lower(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid - &self.rad, Round::Down).0
    }

    /// Upper endpoint, rounded up.
    pub fn upper(&self) -> Float {
        Float::with_val_round(self.prec(), &self.mid + &self.rad, Round::Up).0
    }

    /// Re-rounds the midpoint to `prec` bits, growing the radius accordingly.
    pub fn round_to(&self, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, &self.mid, Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.rad.is_zero() && self.mid.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.lower() <= 0 && self.upper() >= 0
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains_zero()
    }

    pub fn contains_f64(&self, v: f64) -> bool {
        self.lower() <= v && self.upper() >= v
    }

    pub fn contains_rational(&self, v: &Rational) -> bool {
        self.lower() <= *v && self.upper() >= *v
    }

    pub fn contains_float(&self, v: &Float) -> bool {
        self.lower() <= *v && self.upper() >= *v
    }

    /// Whether `other` lies entirely inside `self`.
    pub fn contains_ball(&self, other: &Ball) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    /// The two balls share at least one point.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Every point of `self` is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lower() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.upper() < 0
    }

    /// Every point of `self` is `>=` every point of `other`.
    pub fn certainly_ge(&self, other: &Ball) -> bool {
        self.lower() >= other.upper()
    }

    pub fn certainly_gt(&self, other: &Ball) -> bool {
        self.lower() > other.upper()
    }

    fn prec2(&self, other: &Ball) -> u32 {
        self.prec().max(other.prec())
    }

    pub fn neg(&self) -> Self {
        Self { mid: Float::with_val(self.prec(), -&self.mid), rad: self.rad.clone() }
    }

    pub fn add(&self, other: &Ball) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec2(other), &self.mid + &other.mid, Round::Nearest);
        let rad = add_up(&add_up(&self.rad, &other.rad), &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    pub fn sub(&self, other: &Ball) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec2(other), &self.mid - &other.mid, Round::Nearest);
        let rad = add_up(&add_up(&self.rad, &other.rad), &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    pub fn mul(&self, other: &Ball) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec2(other), &self.mid * &other.mid, Round::Nearest);
        let mut rad = mul_up(&abs_up(&self.mid), &other.rad);
        rad = add_up(&rad, &mul_up(&abs_up(&other.mid), &self.rad));
        rad = add_up(&rad, &mul_up(&self.rad, &other.rad));
        rad = add_up(&rad, &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec(), &self.mid * k, Round::Nearest);
        let kf = Float::with_val(RAD_PREC, k.unsigned_abs());
        let rad = add_up(&mul_up(&self.rad, &kf), &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    /// Multiplies by `2^k` (exact).
    pub fn mul_2si(&self, k: i32) -> Self {
        let mut mid = self.mid.clone();
        let mut rad = self.rad.clone();
        mid <<= k;
        rad <<= k;
        Self { mid, rad }
    }

    pub fn div(&self, other: &Ball) -> Result<Self, NumericError> {
        let bm = abs_up(&other.mid);
        let bm_down = Float::with_val_round(RAD_PREC, &*other.mid.as_abs(), Round::Down).0;
        let gap = Float::with_val_round(RAD_PREC, &bm_down - &other.rad, Round::Down).0;
        if gap <= 0 {
            return Err(NumericError::DivisorStraddlesZero);
        }
        let (mid, ord) = Float::with_val_round(self.prec2(other), &self.mid / &other.mid, Round::Nearest);
        let num = add_up(&mul_up(&abs_up(&self.mid), &other.rad), &mul_up(&bm, &self.rad));
        let den = Float::with_val_round(RAD_PREC, &bm_down * &gap, Round::Down).0;
        let rad = Float::with_val_round(RAD_PREC, &num / &den, Round::Up).0;
        let rad = add_up(&rad, &rounding_error(&mid, ord));
        Ok(Self { mid, rad })
    }

    pub fn recip(&self) -> Result<Self, NumericError> {
        Ball::one(self.prec()).div(self)
    }

    /// `x^2`, with the lower end clamped at zero.
    pub fn sqr(&self) -> Self {
        let (mid, ord) = Float::with_val_round(self.prec(), self.mid.square_ref(), Round::Nearest);
        let m = abs_up(&self.mid);
        let two_m = mul_up(&m, &Float::with_val(RAD_PREC, 2u32));
        let mut rad = add_up(&mul_up(&two_m, &self.rad), &mul_up(&self.rad, &self.rad));
        rad = add_up(&rad, &rounding_error(&mid, ord));
        Self { mid, rad }.clamp_nonneg()
    }

    /// Intersects with `[0, inf)`; callers use this only for quantities known
    /// to be nonnegative.
    pub fn clamp_nonneg(self) -> Self {
        let lo = self.lower();
        if lo >= 0 {
            return self;
        }
        let hi = self.upper();
        let zero = Float::new(self.prec());
        if hi <= 0 {
            return Ball::zero(self.prec());
        }
        Ball::from_interval(&zero, &hi, self.prec())
    }

    /// Intersects with `[lo, hi]` when the true value is known to lie there.
    pub fn clamp(self, lo: &Float, hi: &Float) -> Self {
        let a = self.lower();
        let b = self.upper();
        if a >= *lo && b <= *hi {
            return self;
        }
        let prec = self.prec();
        let a = if a < *lo { lo.clone() } else { a };
        let b = if b > *hi { hi.clone() } else { b };
        if a > b {
            // Disjoint: the caller's claim was wrong; keep the original ball.
            return self;
        }
        Ball::from_interval(&a, &b, prec)
    }

    pub fn abs(&self) -> Self {
        let lo = self.lower();
        let hi = self.upper();
        if lo >= 0 {
            self.clone()
        } else if hi <= 0 {
            self.neg()
        } else {
            let neg_lo = Float::with_val(self.prec(), -&lo);
            let m = if neg_lo > hi { neg_lo } else { hi };
            Ball::from_interval(&Float::new(self.prec()), &m, self.prec())
        }
    }

    pub fn max(&self, other: &Ball) -> Self {
        let prec = self.prec2(other);
        let lo = self.lower().max(&other.lower());
        let hi = self.upper().max(&other.upper());
        Ball::from_interval(&lo, &hi, prec)
    }

    pub fn min(&self, other: &Ball) -> Self {
        let prec = self.prec2(other);
        let lo = self.lower().min(&other.lower());
        let hi = self.upper().min(&other.upper());
        Ball::from_interval(&lo, &hi, prec)
    }

    /// Smallest ball containing both.
    pub fn union(&self, other: &Ball) -> Self {
        let prec = self.prec2(other);
        let lo = self.lower().min(&other.lower());
        let hi = self.upper().max(&other.upper());
        Ball::from_interval(&lo, &hi, prec)
    }

    fn monotone(&self, lo: Float, hi: Float, f: impl Fn(&mut Float, Round) -> Ordering) -> Self {
        let mut lo = lo;
        let mut hi = hi;
        f(&mut lo, Round::Down);
        f(&mut hi, Round::Up);
        Ball::from_interval(&lo, &hi, self.prec())
    }

    pub fn exp(&self) -> Self {
        self.monotone(self.lower(), self.upper(), |x, r| x.exp_round(r))
    }

    pub fn ln(&self) -> Result<Self, NumericError> {
        if !self.is_positive() {
            return Err(NumericError::LogOfNonpositive);
        }
        Ok(self.monotone(self.lower(), self.upper(), |x, r| x.ln_round(r)))
    }

    pub fn sqrt(&self) -> Result<Self, NumericError> {
        if self.lower() < 0 {
            return Err(NumericError::SqrtOfNegative);
        }
        Ok(self.monotone(self.lower(), self.upper(), |x, r| x.sqrt_round(r)))
    }

    /// Square root of a quantity known to be nonnegative (negative parts of
    /// the ball are rounding artefacts and are discarded).
    pub fn sqrt_nonneg(&self) -> Self {
        // Not via clamp_nonneg: rebuilding [0, hi] as mid/rad rounds the
        // radius up, which can push the lower end just below zero again.
        let zero = Float::new(self.prec());
        let lo = self.lower().max(&zero);
        let hi = self.upper().max(&zero);
        self.monotone(lo, hi, |x, r| x.sqrt_round(r))
    }

    pub fn sin(&self) -> Self {
        let mut mid = self.mid.clone();
        let ord = mid.sin_round(Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    pub fn cos(&self) -> Self {
        let mut mid = self.mid.clone();
        let ord = mid.cos_round(Round::Nearest);
        let rad = add_up(&self.rad, &rounding_error(&mid, ord));
        Self { mid, rad }
    }

    /// `atan2(self, x)`; requires the point `(x, self)` to stay away from the
    /// origin. Uses the Lipschitz bound `1/|(x, y)|` of atan2.
    pub fn atan2(&self, x: &Ball) -> Result<Self, NumericError> {
        let r2 = self.sqr().add(&x.sqr());
        if !r2.is_positive() {
            return Err(NumericError::DivisorStraddlesZero);
        }
        let r = r2.sqrt_nonneg();
        let mut mid = Float::with_val(self.prec2(x), &self.mid);
        let ord = mid.atan2_round(&x.mid, Round::Nearest);
        let spread = add_up(&self.rad, &x.rad);
        let rmin = Float::with_val_round(RAD_PREC, &r.lower(), Round::Down).0;
        let rad = Float::with_val_round(RAD_PREC, &spread / &rmin, Round::Up).0;
        let rad = add_up(&rad, &rounding_error(&mid, ord));
        Ok(Self { mid, rad })
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        write!(f, "[{} +/- {:.3e}]", self.mid.to_string_radix(10, Some(digits)), self.rad_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(mid: f64, rad: f64) -> Ball {
        Ball::with_radius(Float::with_val(64, mid), &Float::with_val(RAD_PREC, rad))
    }

    #[test]
    fn add_accumulates_radii() {
        let s = b(1.0, 0.1).add(&b(2.0, 0.1));
        assert!(s.contains_f64(3.0));
        assert!(s.contains_f64(3.2 - 1e-12) && s.contains_f64(2.8 + 1e-12));
        assert!(s.rad_f64() < 0.2 + 1e-15);
    }

    #[test]
    fn exact_products_stay_exact() {
        let p = b(2.0, 0.0).mul(&b(3.0, 0.0));
        assert!(p.is_exact());
        assert_eq!(p.to_f64(), 6.0);
    }

    #[test]
    fn division_by_straddling_ball_fails() {
        assert_eq!(b(1.0, 0.0).div(&b(0.0, 0.5)).unwrap_err(), NumericError::DivisorStraddlesZero);
        assert_eq!(b(1.0, 0.0).div(&b(0.5, 0.5)).unwrap_err(), NumericError::DivisorStraddlesZero);
    }

    #[test]
    fn division_encloses_all_quotients() {
        let q = b(1.0, 0.1).div(&b(2.0, 0.1)).unwrap();
        for (x, y) in [(0.95, 1.95), (1.05, 1.95), (0.95, 2.05), (1.05, 2.05)] {
            assert!(q.contains_f64(x / y));
        }
    }

    #[test]
    fn log_requires_positive_ball() {
        assert_eq!(b(0.1, 0.2).ln().unwrap_err(), NumericError::LogOfNonpositive);
        let l = b(1.0, 0.0).ln().unwrap();
        assert!(l.contains_f64(0.0));
    }

    #[test]
    fn exp_log_roundtrip_contains_input() {
        let x = Ball::from_rational(&Rational::from((7, 3)), 200);
        let y = x.exp().ln().unwrap();
        assert!(y.contains_rational(&Rational::from((7, 3))));
        assert!(y.rad_f64() < 1e-55);
    }

    #[test]
    fn pi_is_tight() {
        let p = Ball::pi(256);
        assert!((p.to_f64() - std::f64::consts::PI).abs() < 1e-15);
        assert!(p.rad_f64() < 1e-75);
    }

    #[test]
    fn abs_of_straddling_ball_starts_at_zero() {
        let a = b(-0.1, 0.3).abs();
        assert!(a.contains_f64(0.0) && a.contains_f64(0.39) && !a.contains_f64(0.41) && !a.contains_f64(-0.01));
    }

    #[test]
    fn sqr_never_goes_negative() {
        let s = b(0.0, 0.5).sqr();
        assert!(s.lower() >= 0);
        assert!(s.contains_f64(0.25));
    }

    #[test]
    fn atan2_encloses_quadrants() {
        let y = b(1.0, 0.0);
        let x = b(-1.0, 0.0);
        let a = y.atan2(&x).unwrap();
        assert!((a.to_f64() - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(a.rad_f64() < 1e-15);
    }
}
