use super::{AlgebraError, BivarPoly, GaussRat, XPoly};

/// Determinant of a square matrix over a commutative ring, by Berkowitz's
/// division-free recurrence for the characteristic polynomial.
pub fn berkowitz_det(a: &[Vec<BivarPoly>]) -> BivarPoly {
    let n = a.len();
    if n == 0 {
        return BivarPoly::one();
    }
    // Characteristic polynomial of the leading r x r block, highest power first.
    let mut p = vec![BivarPoly::one(), a[0][0].neg()];
    for r in 1..n {
        let row: Vec<&BivarPoly> = (0..r).map(|j| &a[r][j]).collect();
        let mut col: Vec<BivarPoly> = (0..r).map(|i| a[i][r].clone()).collect();
        // Toeplitz column: 1, -a_rr, -R C, -R M C, ..., -R M^(r-1) C.
        let mut t = Vec::with_capacity(r + 2);
        t.push(BivarPoly::one());
        t.push(a[r][r].neg());
        for _ in 0..r {
            let rc = row.iter().zip(&col).fold(BivarPoly::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
            t.push(rc.neg());
            col = (0..r)
                .map(|i| (0..r).fold(BivarPoly::zero(), |acc, j| acc.add(&a[i][j].mul(&col[j]))))
                .collect();
        }
        p = (0..r + 2)
            .map(|i| (0..=i.min(r)).fold(BivarPoly::zero(), |acc, j| acc.add(&t[i - j].mul(&p[j]))))
            .collect();
    }
    let det = p[n].clone();
    if n % 2 == 1 { det.neg() } else { det }
}

/// Sylvester matrix of two polynomials in `X`, coefficients highest power first.
pub fn sylvester(f: &[BivarPoly], g: &[BivarPoly]) -> Vec<Vec<BivarPoly>> {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BivarPoly::zero(); size];
        for (j, c) in f.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BivarPoly::zero(); size];
        for (j, c) in g.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// `Res_X(f, g)` of two polynomials with coefficients highest power first.
pub fn resultant(f: &[BivarPoly], g: &[BivarPoly]) -> BivarPoly {
    berkowitz_det(&sylvester(f, g))
}

/// `Delta(z, w) = (-1)^(t(t-1)/2) Res_X(Phi, dPhi/dX)` of a monic relation,
/// which for `X^2 + b X + c` is `b^2 - 4c`. It vanishes exactly where
/// `Phi(z, w, .)` has a repeated root.
pub fn discriminant(phi: &XPoly) -> Result<BivarPoly, AlgebraError> {
    let t = phi.degree();
    if t < 2 {
        return Err(AlgebraError::DegreeTooSmall);
    }
    if !phi.is_monic() {
        return Err(AlgebraError::NotMonic);
    }
    let r = resultant(phi.coeffs(), &phi.derivative_coeffs());
    Ok(if (t * (t - 1) / 2) % 2 == 1 { r.neg() } else { r })
}

/// Evaluates `Delta(z0, w)` at exact points, mainly for tests.
pub fn discriminant_at(delta: &BivarPoly, z: &GaussRat, w: &GaussRat) -> GaussRat {
    delta.eval(z, w)
}
