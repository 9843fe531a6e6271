use std::fmt;

use super::{AlgebraError, BivarPoly};

/// `Phi(z, w, X) = sum_{j=0..t} Phi_j(z, w) X^(t-j)` with `t >= 1` and
/// `Phi_0 != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XPoly {
    coeffs: Vec<BivarPoly>,
}

/// A monic relation together with the substitution that produced it:
/// if `Phi(G) = 0` then `Phi*(scale * G) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monicized {
    pub phi: XPoly,
    pub scale: BivarPoly,
}

impl XPoly {
    /// `coeffs[j]` multiplies `X^(t-j)`; `t = coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BivarPoly>) -> Result<Self, AlgebraError> {
        if coeffs.len() < 2 {
            return Err(AlgebraError::NotPolynomialInX);
        }
        if coeffs[0].is_zero() {
            return Err(AlgebraError::ZeroLeadingCoefficient);
        }
        Ok(Self { coeffs })
    }

    /// From coefficients indexed by the power of `X` (`by_power[k]` multiplies
    /// `X^k`), dropping vanishing top powers.
    pub fn from_powers(mut by_power: Vec<BivarPoly>) -> Result<Self, AlgebraError> {
        while by_power.last().is_some_and(|p| p.is_zero()) {
            by_power.pop();
        }
        if by_power.is_empty() {
            return Err(AlgebraError::ZeroLeadingCoefficient);
        }
        by_power.reverse();
        Self::new(by_power)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `Phi_j`, the coefficient of `X^(t-j)`.
    pub fn coeff(&self, j: usize) -> &BivarPoly {
        &self.coeffs[j]
    }

    pub fn coeffs(&self) -> &[BivarPoly] {
        &self.coeffs
    }

    /// Coefficient of `X^k`.
    pub fn power(&self, k: usize) -> &BivarPoly {
        &self.coeffs[self.degree() - k]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs[0].is_one()
    }

    /// `Phi*_j = Phi_j Phi_0^(j-1)`, so that `Phi*(Phi_0 F) = Phi_0^(t-1) Phi(F)`.
    pub fn monicize(&self) -> Monicized {
        let p0 = self.coeffs[0].clone();
        let mut out = Vec::with_capacity(self.coeffs.len());
        out.push(BivarPoly::one());
        let mut pow = BivarPoly::one();
        for c in &self.coeffs[1..] {
            out.push(c.mul(&pow));
            pow = pow.mul(&p0);
        }
        Monicized { phi: XPoly { coeffs: out }, scale: p0 }
    }

    /// `d Phi / dX`, or `None` when `t = 1` would leave a constant.
    pub fn derivative_coeffs(&self) -> Vec<BivarPoly> {
        let t = self.degree();
        (0..t).map(|j| self.coeffs[j].scale(&super::GaussRat::from_i64((t - j) as i64))).collect()
    }
}

impl fmt::Display for XPoly {
    /// E.g. `X^2 + (-1 - z*w)`; parses back to the same relation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.degree();
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = t - j;
            let xpow = match k {
                0 => String::new(),
                1 => "X".to_string(),
                _ => format!("X^{k}"),
            };
            let body = if xpow.is_empty() {
                format!("({c})")
            } else if c.is_one() {
                xpow
            } else {
                format!("({c})*{xpow}")
            };
            if !first {
                f.write_str(" + ")?;
            }
            f.write_str(&body)?;
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::GaussRat;

    fn zw() -> BivarPoly {
        BivarPoly::z().mul(&BivarPoly::w())
    }

    #[test]
    fn monicize_quadratic() {
        // w X^2 + X + z  ->  X^2 + X + z w
        let phi = XPoly::new(vec![BivarPoly::w(), BivarPoly::one(), BivarPoly::z()]).unwrap();
        let m = phi.monicize();
        assert_eq!(m.phi, XPoly::new(vec![BivarPoly::one(), BivarPoly::one(), zw()]).unwrap());
        assert_eq!(m.scale, BivarPoly::w());
    }

    #[test]
    fn monic_is_unchanged() {
        let c = BivarPoly::one().add(&zw()).neg();
        let phi = XPoly::new(vec![BivarPoly::one(), BivarPoly::zero(), c]).unwrap();
        assert_eq!(phi.monicize().phi, phi);
    }

    #[test]
    fn rejects_zero_leading() {
        let e = XPoly::new(vec![BivarPoly::zero(), BivarPoly::one()]).unwrap_err();
        assert_eq!(e, AlgebraError::ZeroLeadingCoefficient);
        assert_eq!(XPoly::new(vec![BivarPoly::one()]).unwrap_err(), AlgebraError::NotPolynomialInX);
    }

    #[test]
    fn derivative() {
        let phi = XPoly::new(vec![BivarPoly::one(), BivarPoly::z(), BivarPoly::w()]).unwrap();
        let d = phi.derivative_coeffs();
        assert_eq!(d, vec![BivarPoly::constant(GaussRat::from_i64(2)), BivarPoly::z()]);
    }
}
