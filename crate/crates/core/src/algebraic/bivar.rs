use std::collections::BTreeMap;
use std::fmt;

use super::{GaussRat, UPoly};
use crate::numeric::BallComplex;

/// Sparse polynomial in `(z, w)` over `Q(i)`, keyed by `(deg_z, deg_w)`.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<(u32, u32), GaussRat>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(GaussRat::one())
    }

    pub fn z() -> Self {
        Self::monomial(1, 0, GaussRat::one())
    }

    pub fn w() -> Self {
        Self::monomial(0, 1, GaussRat::one())
    }

    pub fn monomial(dz: u32, dw: u32, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((dz, dw), c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), GaussRat> {
        &self.terms
    }

    pub fn coeff(&self, dz: u32, dw: u32) -> GaussRat {
        self.terms.get(&(dz, dw)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0, 0).is_one()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn degree_w(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    pub fn degree_z(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    fn insert_add(&mut self, key: (u32, u32), c: GaussRat) {
        let v = self.terms.get(&key).map_or(c.clone(), |old| old.add(&c));
        if v.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.insert_add(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.mul(c))).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for ((az, aw), a) in &self.terms {
            for ((bz, bw), b) in &o.terms {
                out.insert_add((az + bz, aw + bw), a.mul(b));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, z: &GaussRat, w: &GaussRat) -> GaussRat {
        self.terms
            .iter()
            .fold(GaussRat::zero(), |acc, ((dz, dw), c)| acc.add(&c.mul(&z.pow(*dz)).mul(&w.pow(*dw))))
    }

    pub fn eval_ball(&self, z: &BallComplex, w: &BallComplex) -> BallComplex {
        let prec = z.prec().max(w.prec());
        self.terms.iter().fold(BallComplex::zero(prec), |acc, ((dz, dw), c)| {
            acc.add(&c.to_ball(prec).mul(&z.pow_u32(*dz)).mul(&w.pow_u32(*dw)))
        })
    }

    /// Coefficients of `w^k` as polynomials in `z`, for `k = 0..=deg_w`.
    pub fn by_w(&self) -> Vec<UPoly> {
        let Some(dw) = self.degree_w() else { return Vec::new() };
        let mut cols: Vec<Vec<GaussRat>> = vec![Vec::new(); dw as usize + 1];
        for ((z, w), c) in &self.terms {
            let col = &mut cols[*w as usize];
            if col.len() <= *z as usize {
                col.resize(*z as usize + 1, GaussRat::zero());
            }
            col[*z as usize] = c.clone();
        }
        cols.into_iter().map(UPoly::new).collect()
    }

    /// Coefficients of `w^k` at a fixed `z`, as complex balls.
    pub fn specialize_z(&self, z: &BallComplex) -> Vec<BallComplex> {
        let prec = z.prec();
        let Some(dw) = self.degree_w() else { return Vec::new() };
        let mut out = vec![BallComplex::zero(prec); dw as usize + 1];
        for ((dz, w), c) in &self.terms {
            let k = *w as usize;
            out[k] = out[k].add(&c.to_ball(prec).mul(&z.pow_u32(*dz)));
        }
        out
    }

    /// Exact version of [`BivarPoly::specialize_z`].
    pub fn specialize_z_exact(&self, z: &GaussRat) -> UPoly {
        self.by_w().iter().map(|p| p.eval(z)).collect::<Vec<_>>().into()
    }
}

impl From<Vec<GaussRat>> for UPoly {
    fn from(v: Vec<GaussRat>) -> Self {
        UPoly::new(v)
    }
}

fn monomial_str(dz: u32, dw: u32) -> String {
    let part = |v: &str, d: u32| match d {
        0 => None,
        1 => Some(v.to_string()),
        _ => Some(format!("{v}^{d}")),
    };
    [part("z", dz), part("w", dw)].into_iter().flatten().collect::<Vec<_>>().join("*")
}

impl fmt::Display for BivarPoly {
    /// Re-parseable form, e.g. `1 + z*w` or `-(1/2+i)*z^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for ((dz, dw), c) in &self.terms {
            let (neg, mag) = if c.im == 0 && c.re < 0 { (true, c.neg()) } else { (false, c.clone()) };
            let mono = monomial_str(*dz, *dw);
            let coef = if mag.im != 0 && (mag.re != 0 || !mono.is_empty()) { format!("({mag})") } else { mag.to_string() };
            let body = match (mono.is_empty(), coef.as_str()) {
                (true, _) => coef.clone(),
                (false, "1") => mono,
                (false, _) => format!("{coef}*{mono}"),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        let p = BivarPoly::one().add(&BivarPoly::z().mul(&BivarPoly::w()));
        let sq = p.mul(&p);
        assert_eq!(sq.coeff(1, 1), GaussRat::from_i64(2));
        let v = sq.eval(&GaussRat::from_i64(2), &GaussRat::from_i64(3));
        assert_eq!(v, GaussRat::from_i64(49));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn display_is_readable() {
        let p = BivarPoly::one().add(&BivarPoly::z().mul(&BivarPoly::w())).neg();
        assert_eq!(p.to_string(), "-1 - z*w");
        let q = BivarPoly::monomial(2, 0, GaussRat::new(1.into(), 1.into()));
        assert_eq!(q.to_string(), "(1+i)*z^2");
    }
}
