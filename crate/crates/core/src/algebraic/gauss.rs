use std::fmt;
use std::str::FromStr;

use rug::Rational;

use crate::numeric::BallComplex;

/// A Gaussian rational `re + im*i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn i() -> Self {
        Self { re: Rational::new(), im: Rational::from(1) }
    }

    pub fn from_i64(v: i64) -> Self {
        Self { re: Rational::from(v), im: Rational::new() }
    }

    pub fn from_rational(re: Rational) -> Self {
        Self { re, im: Rational::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_one(&self) -> bool {
        self.re == 1 && self.im == 0
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn neg(&self) -> Self {
        Self { re: Rational::from(-&self.re), im: Rational::from(-&self.im) }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Rational::from(-&self.im) }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: Rational::from(&self.re + &o.re), im: Rational::from(&self.im + &o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: Rational::from(&self.re - &o.re), im: Rational::from(&self.im - &o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.im == 0 && o.im == 0 {
            return Self::from_rational(Rational::from(&self.re * &o.re));
        }
        let re = Rational::from(&self.re * &o.re) - Rational::from(&self.im * &o.im);
        let im = Rational::from(&self.re * &o.im) + Rational::from(&self.im * &o.re);
        Self { re, im }
    }

    pub fn norm(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    /// Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        let n = self.norm();
        Self { re: Rational::from(&self.re / &n), im: (-Rational::from(&self.im / &n)) }
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_ball(&self, prec: u32) -> BallComplex {
        BallComplex::from_rationals(&self.re, &self.im, prec)
    }
}

fn fmt_q(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussRat {
    /// `a`, `bi`, `a+bi` or `a-bi`, with rational `a`, `b`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0 {
            return write!(f, "{}", fmt_q(&self.re));
        }
        let im = if self.im == 1 {
            "i".to_string()
        } else if self.im == -1 {
            "-i".to_string()
        } else {
            format!("{}i", fmt_q(&self.im))
        };
        if self.re == 0 {
            return write!(f, "{im}");
        }
        if self.im < 0 {
            write!(f, "{}{im}", fmt_q(&self.re))
        } else {
            write!(f, "{}+{im}", fmt_q(&self.re))
        }
    }
}

impl FromStr for GaussRat {
    type Err = String;

    /// Inverse of `Display`: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let q = |t: &str| t.parse::<Rational>().map_err(|_| format!("bad rational `{t}`"));
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Self::from_rational(q(s)?));
        };
        let split = body.rfind(['+', '-']).filter(|&p| p > 0);
        let (re, im) = match split {
            Some(p) => (q(&body[..p])?, &body[p..]),
            None => (Rational::new(), body),
        };
        let im = match im {
            "" | "+" => Rational::from(1),
            "-" => Rational::from(-1),
            t => q(t.strip_prefix('+').unwrap_or(t))?,
        };
        Ok(Self { re, im })
    }
}
