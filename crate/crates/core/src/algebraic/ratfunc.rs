use std::fmt;

use super::{AlgebraError, GaussRat, UPoly};

/// Largest number of monomials a reduced rational function may carry.
pub const MAX_MONOMIALS: usize = 10_000;

/// A rational function of `z` over `Q(i)`, always reduced: `gcd(num, den) = 1`
/// and `den` is monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UPoly,
    den: UPoly,
}

impl RatFunc {
    pub fn new(num: UPoly, den: UPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::reduce(num, den)
    }

    fn reduce(num: UPoly, den: UPoly) -> Result<Self, AlgebraError> {
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() { (num, den) } else { (num.div_rem(&g).0, den.div_rem(&g).0) }
        };
        let lead = den.leading();
        let (num, den) = if lead.is_one() { (num, den) } else {
            let inv = lead.recip();
            (num.scale(&inv), den.scale(&inv))
        };
        if num.terms() + den.terms() > MAX_MONOMIALS {
            return Err(AlgebraError::Blowup(MAX_MONOMIALS));
        }
        Ok(Self { num, den })
    }

    pub fn zero() -> Self {
        Self { num: UPoly::zero(), den: UPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(UPoly::one())
    }

    pub fn from_poly(p: UPoly) -> Self {
        Self { num: p, den: UPoly::one() }
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_poly(UPoly::constant(c))
    }

    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add(&self, o: &Self) -> Result<Self, AlgebraError> {
        if self.den == o.den {
            if self.den.is_one() {
                return Ok(Self::from_poly(self.num.add(&o.num)));
            }
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, AlgebraError> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        if self.den.is_one() && o.den.is_one() {
            let p = self.num.mul(&o.num);
            if p.terms() > MAX_MONOMIALS {
                return Err(AlgebraError::Blowup(MAX_MONOMIALS));
            }
            return Ok(Self::from_poly(p));
        }
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Self::reduce(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        self.mul(&o.recip()?)
    }

    /// Value at `z`; `None` at a pole.
    pub fn eval(&self, z: &GaussRat) -> Option<GaussRat> {
        let d = self.den.eval(z);
        (!d.is_zero()).then(|| self.num.eval(z).div(&d))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UPoly {
        UPoly::new(cs.iter().map(|&c| GaussRat::from_i64(c)).collect())
    }

    #[test]
    fn reduction_cancels_common_factors() {
        // (z^2 - 1)/(2z - 2) = (z + 1)/2
        let r = RatFunc::new(p(&[-1, 0, 1]), p(&[-2, 2])).unwrap();
        assert_eq!(r.den(), &UPoly::one());
        assert_eq!(r.num(), &UPoly::new(vec![GaussRat::from_rational((1, 2).into()); 2]));
    }

    #[test]
    fn arithmetic_roundtrip() {
        let a = RatFunc::new(p(&[1, 1]), p(&[0, 1])).unwrap();
        let b = RatFunc::new(p(&[3]), p(&[1, 0, 1])).unwrap();
        let s = a.add(&b).unwrap().sub(&b).unwrap();
        assert_eq!(s, a);
        let q = a.mul(&b).unwrap().div(&b).unwrap();
        assert_eq!(q, a);
        assert!(RatFunc::zero().recip().is_err());
    }
}
