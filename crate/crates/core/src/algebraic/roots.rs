use num_complex::Complex64;
use rug::Float;

use super::AlgebraError;
use crate::numeric::{Ball, BallComplex};

/// Roots of a polynomial inside a box: `multiplicity` roots counted with
/// multiplicity lie in `enclosure` when `certified` is set.
#[derive(Clone, Debug)]
pub struct RootCluster {
    pub enclosure: BallComplex,
    pub multiplicity: usize,
    pub certified: bool,
}

fn horner(p: &[BallComplex], x: &BallComplex) -> BallComplex {
    p.iter().rev().fold(BallComplex::zero(x.prec()), |acc, c| acc.mul(x).add(c))
}

fn horner_f64(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)
}

/// Simultaneous Aberth iteration in double precision, started on a circle
/// whose radius bounds the root moduli.
fn aberth_f64(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let lead = a[n];
    let b: Vec<Complex64> = a.iter().map(|c| c / lead).collect();
    let db: Vec<Complex64> = b.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    let r = (0..n).map(|k| b[k].norm().powf(1.0 / (n - k) as f64)).fold(0.0, f64::max);
    let r = if r.is_finite() && r > 0.0 { 2.0 * r } else { 1.0 };
    let mut x: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let pv = horner_f64(&b, x[i]);
            if pv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = pv / horner_f64(&db, x[i]);
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (x[i] - x[j])).sum();
            let step = ratio / (1.0 - ratio * s);
            if step.is_finite() {
                x[i] -= step;
                worst = worst.max(step.norm() / (1.0 + x[i].norm()));
            }
        }
        if worst < 1e-15 {
            break;
        }
    }
    x
}

/// Aberth sweeps on exact midpoints at `prec` bits.
fn polish(p: &[BallComplex], mut x: Vec<BallComplex>, prec: u32) -> Vec<BallComplex> {
    let n = x.len();
    let dp: Vec<BallComplex> = p.iter().enumerate().skip(1).map(|(k, c)| c.mul_i64(k as i64)).collect();
    let pc: Vec<BallComplex> = p.iter().map(BallComplex::center).collect();
    let dpc: Vec<BallComplex> = dp.iter().map(BallComplex::center).collect();
    let tol = Float::with_val(64, Float::i_exp(1, -(prec as i32 - 12)));
    let one = BallComplex::one(prec);
    for _ in 0..(3 * prec.ilog2() + 30) {
        let mut done = true;
        for i in 0..n {
            let Ok(ratio) = horner(&pc, &x[i]).div(&horner(&dpc, &x[i])) else { continue };
            let ratio = ratio.center();
            let mut s = BallComplex::zero(prec);
            for j in (0..n).filter(|&j| j != i) {
                if let Ok(t) = x[i].sub(&x[j]).recip() {
                    s = s.add(&t.center());
                }
            }
            let Ok(step) = ratio.div(&one.sub(&ratio.mul(&s).center())) else { continue };
            let step = step.center();
            x[i] = x[i].sub(&step).round_to(prec).center();
            let size = step.abs().upper();
            if size > Float::with_val(64, &tol * (Float::with_val(64, 1) + x[i].abs().upper())) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    x
}

fn disc_box(c: &BallComplex, r: &Float) -> (Float, Float, Float, Float) {
    use rug::float::Round;
    let lo = |m: &Float| Float::with_val_round(m.prec(), m - r, Round::Down).0;
    let hi = |m: &Float| Float::with_val_round(m.prec(), m + r, Round::Up).0;
    (lo(c.re.mid()), hi(c.re.mid()), lo(c.im.mid()), hi(c.im.mid()))
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

/// Roots of `p_0 + p_1 w + ... + p_d w^d` (coefficient enclosures, lowest
/// degree first).
///
/// Trailing exact zeros are trimmed; a nonzero constant has no roots. With
/// `certify`, approximations `x_i` are turned into discs
/// `D(x_i, d |p(x_i) / (p_d prod_{j != i} (x_i - x_j))|)`: a connected group
/// of `k` discs disjoint from the rest holds exactly `k` roots of every
/// polynomial inside the coefficient balls. Each group is reported as one
/// cluster with its bounding box.
pub fn roots_univar(p: &[BallComplex], certify: bool) -> Result<Vec<RootCluster>, AlgebraError> {
    let len = p.iter().rposition(|c| !c.is_exact_zero()).map(|k| k + 1).ok_or(AlgebraError::ZeroPolynomial)?;
    let p = &p[..len];
    let d = len - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if p[d].contains_zero() {
        return Err(AlgebraError::UncertainLeadingCoefficient);
    }
    let prec = p.iter().map(BallComplex::prec).max().unwrap_or(64).max(64);
    let approx: Vec<Complex64> = p.iter().map(|c| {
        let (re, im) = c.to_f64();
        Complex64::new(re, im)
    }).collect();
    let seeds: Vec<BallComplex> = aberth_f64(&approx)
        .into_iter()
        .map(|z| {
            let finite = |v: f64| if v.is_finite() { v } else { 0.0 };
            BallComplex::from_f64(finite(z.re), finite(z.im), prec)
        })
        .collect();
    let mut x = polish(p, seeds, prec);
    x.sort_by(|a, b| {
        a.re.to_f64().total_cmp(&b.re.to_f64()).then(a.im.to_f64().total_cmp(&b.im.to_f64()))
    });
    if !certify {
        return Ok(x.into_iter().map(|e| RootCluster { enclosure: e, multiplicity: 1, certified: false }).collect());
    }

    let radii: Vec<Option<Float>> = (0..d)
        .map(|i| {
            let mut den = p[d].clone();
            for j in (0..d).filter(|&j| j != i) {
                den = den.mul(&x[i].sub(&x[j]));
            }
            let w = horner(p, &x[i]).div(&den).ok()?;
            Some(w.abs().mul(&Ball::from_i64(d as i64, prec)).upper())
        })
        .collect();
    if radii.iter().any(Option::is_none) {
        // Coincident approximations: fall back to the Cauchy bound on all roots.
        let lead = p[d].abs();
        let mut bound = Ball::one(prec);
        for c in &p[..d] {
            bound = bound.max(&c.abs().div(&lead).map_err(|_| AlgebraError::UncertainLeadingCoefficient)?.add(&Ball::one(prec)));
        }
        let enclosure = BallComplex::zero(prec).inflate(&bound.upper());
        return Ok(vec![RootCluster { enclosure, multiplicity: d, certified: true }]);
    }
    let radii: Vec<Float> = radii.into_iter().map(Option::unwrap).collect();

    let mut parent: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in i + 1..d {
            let gap = x[i].sub(&x[j]).abs().lower();
            let reach = Float::with_val_round(64, &radii[i] + &radii[j], rug::float::Round::Up).0;
            if gap <= reach {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<RootCluster> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; d];
    for i in 0..d {
        let r = find(&mut parent, i);
        let (x0, x1, y0, y1) = disc_box(&x[i], &radii[i]);
        match root_of[r] {
            Some(k) => {
                let c = &mut out[k];
                let re = c.enclosure.re.union(&Ball::from_interval(&x0, &x1, prec));
                let im = c.enclosure.im.union(&Ball::from_interval(&y0, &y1, prec));
                c.enclosure = BallComplex::new(re, im);
                c.multiplicity += 1;
            }
            None => {
                root_of[r] = Some(out.len());
                let enclosure =
                    BallComplex::new(Ball::from_interval(&x0, &x1, prec), Ball::from_interval(&y0, &y1, prec));
                out.push(RootCluster { enclosure, multiplicity: 1, certified: true });
            }
        }
    }
    Ok(out)
}
