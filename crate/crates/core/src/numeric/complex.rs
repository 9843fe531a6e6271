use std::fmt;

use rug::{Float, Rational};

use super::{Ball, NumericError};

/// Rectangular complex enclosure: independent real and imaginary balls.
#[derive(Clone, Debug)]
pub struct BallComplex {
    pub re: Ball,
    pub im: Ball,
}

impl BallComplex {
    pub fn new(re: Ball, im: Ball) -> Self {
        Self { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        Self { re: Ball::zero(prec), im: Ball::zero(prec) }
    }

    pub fn one(prec: u32) -> Self {
        Self { re: Ball::one(prec), im: Ball::zero(prec) }
    }

    pub fn from_real(re: Ball) -> Self {
        let prec = re.prec();
        Self { re, im: Ball::zero(prec) }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        Self { re: Ball::from_f64(re, prec), im: Ball::from_f64(im, prec) }
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        Self { re: Ball::from_rational(re, prec), im: Ball::from_rational(im, prec) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Both parts rounded to `prec` bits, radii widened to cover the rounding.
    pub fn round_to(&self, prec: u32) -> Self {
        Self { re: self.re.round_to(prec), im: self.im.round_to(prec) }
    }

    /// Exact midpoint of the rectangle.
    pub fn center(&self) -> Self {
        let z = |b: &Ball| Ball::with_radius(b.mid().clone(), &Float::new(64));
        Self { re: z(&self.re), im: z(&self.im) }
    }

    /// Upper bound on the distance from the center to any point of the box.
    pub fn radius_upper(&self) -> Float {
        let r = Ball::with_radius(self.re.rad().clone(), &Float::new(64))
            .sqr()
            .add(&Ball::with_radius(self.im.rad().clone(), &Float::new(64)).sqr());
        r.sqrt_nonneg().upper()
    }

    /// Box `[c - r, c + r]` in both coordinates around an exact center.
    pub fn inflate(&self, r: &Float) -> Self {
        let grow = |b: &Ball| {
            let rad = Float::with_val_round(64, b.rad() + r, rug::float::Round::Up).0;
            Ball::with_radius(b.mid().clone(), &rad)
        };
        Self { re: grow(&self.re), im: grow(&self.im) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains_f64(&self, re: f64, im: f64) -> bool {
        self.re.contains_f64(re) && self.im.contains_f64(im)
    }

    pub fn overlaps(&self, other: &BallComplex) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains(&self, other: &BallComplex) -> bool {
        self.re.contains_ball(&other.re) && self.im.contains_ball(&other.im)
    }

    pub fn neg(&self) -> Self {
        Self { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn add(&self, o: &BallComplex) -> Self {
        Self { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &BallComplex) -> Self {
        Self { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &BallComplex) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        Self { re, im }
    }

    pub fn scale(&self, k: &Ball) -> Self {
        Self { re: self.re.mul(k), im: self.im.mul(k) }
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Self { re: self.re.mul_i64(k), im: self.im.mul_i64(k) }
    }

    pub fn mul_i(&self) -> Self {
        Self { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    /// `|z|^2`, clamped to be nonnegative.
    pub fn abs_sq(&self) -> Ball {
        self.re.sqr().add(&self.im.sqr()).clamp_nonneg()
    }

    pub fn abs(&self) -> Ball {
        self.abs_sq().sqrt_nonneg()
    }

    pub fn ln_abs(&self) -> Result<Ball, NumericError> {
        Ok(self.abs_sq().ln()?.mul_2si(-1))
    }

    /// Principal argument.
    pub fn arg(&self) -> Result<Ball, NumericError> {
        self.im.atan2(&self.re)
    }

    pub fn recip(&self) -> Result<Self, NumericError> {
        let d = self.abs_sq();
        if !d.is_positive() {
            return Err(NumericError::DivisorStraddlesZero);
        }
        Ok(Self { re: self.re.div(&d)?, im: self.im.neg().div(&d)? })
    }

    pub fn div(&self, o: &BallComplex) -> Result<Self, NumericError> {
        // Divide by |o|^2 once, avoiding the wider box of self * (1/o).
        let d = o.abs_sq();
        if !d.is_positive() {
            return Err(NumericError::DivisorStraddlesZero);
        }
        let n = self.mul(&o.conj());
        Ok(Self { re: n.re.div(&d)?, im: n.im.div(&d)? })
    }

    pub fn pow_u32(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = BallComplex::one(self.prec());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Self { re: m.mul(&self.im.cos()), im: m.mul(&self.im.sin()) }
    }

    /// `exp(pi * i * s)`.
    pub fn unit_exp(s: &BallComplex) -> Self {
        let pi = Ball::pi(s.prec());
        let angle = s.re.mul(&pi);
        let modulus = s.im.mul(&pi).neg().exp();
        Self { re: modulus.mul(&angle.cos()), im: modulus.mul(&angle.sin()) }
    }
}

impl fmt::Display for BallComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {} i", self.re, self.im)
    }
}

/// `exp(pi * i * s)`; every summand of the theta series has this shape.
pub fn unit_exp(s: &BallComplex) -> BallComplex {
    BallComplex::unit_exp(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_exp_at_landmarks() {
        let e0 = unit_exp(&BallComplex::zero(128));
        assert!(e0.re.is_exact() && e0.re.to_f64() == 1.0 && e0.im.is_exact_zero());
        let e1 = unit_exp(&BallComplex::from_f64(1.0, 0.0, 128));
        assert!(e1.contains_f64(-1.0, 0.0));
        assert!(e1.re.rad_f64() < 1e-30 && e1.im.contains_zero());
        let eh = unit_exp(&BallComplex::from_f64(0.5, 0.0, 128));
        assert!(eh.contains_f64(0.0, 1.0));
    }

    #[test]
    fn unit_exp_of_real_has_unit_modulus() {
        for s in [0.1, 0.37, -2.25, 13.0] {
            let e = unit_exp(&BallComplex::from_f64(s, 0.0, 96));
            assert!(e.abs().contains_f64(1.0));
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = BallComplex::from_f64(1.5, -2.0, 128);
        let b = BallComplex::from_f64(0.25, 3.0, 128);
        let q = a.mul(&b).div(&b).unwrap();
        assert!(q.contains_f64(1.5, -2.0));
        assert!(BallComplex::zero(64).recip().is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let z = BallComplex::from_f64(0.5, 0.75, 128);
        let p = z.pow_u32(5);
        let q = z.mul(&z).mul(&z).mul(&z).mul(&z);
        assert!(p.overlaps(&q));
    }
}
