//! Power series in `w` whose coefficients are functions of `z`, restricted
//! to a point `z = alpha`, and the radius of convergence of the restriction.
//!
//! The central example is `f_0 = 0`, `f_n(z) = n^n theta11(n! z; tau0)`.
//! Its restriction converges everywhere at points of `Q tau0 + Q` (the
//! coefficients vanish from some index on) and has radius zero elsewhere.
//! Points are given in lattice coordinates `alpha = x tau0 + y`.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use rug::float::Round;
use rug::{Float, Integer, Rational};
use thiserror::Error;

use crate::diophantine::{factoradic_expand, witness_search, DiophantineError, Factoradic, Witness};
use crate::numeric::{unit_exp, with_restarts, Ball, BallComplex, ExactError, ExactReal, PrecisionBudget};
use crate::theta::{c_constant, log_abs_theta_reduced, theta11_direct, CConstant, LogMagnitude, ThetaContext, ThetaError};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HartogsError {
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("point has an irrational coordinate")]
    IrrationalPoint,
    #[error("point lies in Q tau0 + Q")]
    RationalPoint,
    #[error("certificate link indeterminate at n = {0} after all restarts")]
    CertificationFailed(u32),
    #[error("need N >= 2 * window and window >= 1 (got N = {n}, window = {window})")]
    InvalidWindow { n: u32, window: u32 },
    #[error("grid resolution must be at least 2")]
    InvalidResolution,
}

impl HartogsError {
    fn wants_precision(&self) -> bool {
        matches!(
            self,
            HartogsError::Theta(ThetaError::ContainsZero)
                | HartogsError::Theta(ThetaError::TieStraddle)
                | HartogsError::Diophantine(DiophantineError::TieStraddle)
                | HartogsError::CertificationFailed(_)
        )
    }
}

/// `alpha = x tau0 + y` with exact coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactPoint {
    pub x: ExactReal,
    pub y: ExactReal,
}

impl ExactPoint {
    pub fn new(x: ExactReal, y: ExactReal) -> Self {
        Self { x, y }
    }

    pub fn rational(x: Rational, y: Rational) -> Self {
        Self { x: ExactReal::Rational(x), y: ExactReal::Rational(y) }
    }

    /// Whether `alpha` lies in `Q tau0 + Q`.
    pub fn is_rational_point(&self) -> bool {
        self.x.is_rational() && self.y.is_rational()
    }

    /// The irrational coordinate used for certificates, `x` first.
    pub fn irrational_coordinate(&self) -> Option<Coordinate> {
        if !self.x.is_rational() {
            Some(Coordinate::X)
        } else if !self.y.is_rational() {
            Some(Coordinate::Y)
        } else {
            None
        }
    }

    pub fn coordinate(&self, c: Coordinate) -> &ExactReal {
        match c {
            Coordinate::X => &self.x,
            Coordinate::Y => &self.y,
        }
    }

    /// Enclosure of `alpha` itself.
    pub fn to_ball(&self, ctx: &ThetaContext, prec: u32) -> BallComplex {
        ctx.tau(prec).scale(&self.x.eval_bits(prec)).add(&BallComplex::from_real(self.y.eval_bits(prec)))
    }
}

impl fmt::Display for ExactPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    X,
    Y,
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coordinate::X => "x",
            Coordinate::Y => "y",
        })
    }
}

/// A series `sum f_n(z) w^n` seen through the magnitudes `log|f_n(alpha)|`.
///
/// Providers are deterministic: the same inputs at the same budget give the
/// same enclosures.
pub trait HartogsSeries: Sync {
    fn name(&self) -> String;

    /// `log|f_n(alpha)|` for `n = 0..=n_max`.
    fn log_abs_coeffs(&self, n_max: u32, alpha: &ExactPoint, budget: &PrecisionBudget)
        -> Result<Vec<LogMagnitude>, HartogsError>;

    fn log_abs_coeff(&self, n: u32, alpha: &ExactPoint, budget: &PrecisionBudget) -> Result<LogMagnitude, HartogsError> {
        Ok(self.log_abs_coeffs(n, alpha, budget)?.pop().expect("n_max + 1 entries"))
    }
}

/// `f_0 = 0`, `f_n(z) = n^n theta11(n! z; tau0)`.
#[derive(Clone, Debug)]
pub struct CounterexampleSeries {
    ctx: ThetaContext,
}

pub fn counterexample_series(ctx: ThetaContext) -> CounterexampleSeries {
    CounterexampleSeries { ctx }
}

/// The data that determines `f_n(alpha)`: `n! alpha = (ex tau0 + ey) + (dx tau0 + dy)`.
#[derive(Clone, Debug)]
pub struct ReducedMultiple {
    pub n: u32,
    pub ex: Integer,
    pub ey: Integer,
    pub dx: Ball,
    pub dy: Ball,
}

fn reduced_multiples(x: &Factoradic, y: &Factoradic) -> Vec<ReducedMultiple> {
    x.states()
        .iter()
        .zip(y.states())
        .map(|(sx, sy)| ReducedMultiple { n: sx.k, ex: sx.e.clone(), ey: sy.e.clone(), dx: sx.b.clone(), dy: sy.b.clone() })
        .collect()
}

fn n_log_n(n: u32, prec: u32) -> Ball {
    if n <= 1 {
        return Ball::zero(prec);
    }
    Ball::from_i64(n as i64, prec).ln().expect("n >= 2").mul_i64(n as i64)
}

impl CounterexampleSeries {
    pub fn context(&self) -> &ThetaContext {
        &self.ctx
    }

    /// `n! alpha` in reduced form for `n = 1..=n_max`, never forming `n! alpha`.
    pub fn reduced_multiples(
        &self,
        n_max: u32,
        alpha: &ExactPoint,
        bits: u32,
    ) -> Result<Vec<ReducedMultiple>, HartogsError> {
        let budget = PrecisionBudget::new(bits, 0);
        let fx = factoradic_expand(&alpha.x, n_max, &budget)?;
        let fy = factoradic_expand(&alpha.y, n_max, &budget)?;
        Ok(reduced_multiples(&fx, &fy))
    }

    fn logs_at(&self, n_max: u32, alpha: &ExactPoint, bits: u32) -> Result<Vec<LogMagnitude>, HartogsError> {
        let mut out = vec![LogMagnitude::NegInfinity];
        if n_max == 0 {
            return Ok(out);
        }
        let ctx = self.ctx.with_budget(PrecisionBudget::new(bits, 0));
        for r in self.reduced_multiples(n_max, alpha, bits)? {
            let l = log_abs_theta_reduced(&r.ex, &r.dx, &r.dy, &ctx)?;
            out.push(l.add(&n_log_n(r.n, bits)));
        }
        Ok(out)
    }

    /// Unit-modulus factor `f_n(alpha)/|f_n(alpha)|`, when the enclosure is
    /// tighter than a quarter turn; `None` for zero coefficients or when the
    /// phase is lost to the size of the lattice part.
    ///
    /// Uses `theta11(d + a tau + b) = (-1)^(a+b) exp(-pi i (a^2 tau + 2 a d)) theta11(d)`.
    pub fn coefficient_phase(&self, n: u32, alpha: &ExactPoint) -> Result<Option<BallComplex>, HartogsError> {
        if n == 0 {
            return Ok(None);
        }
        let bits = self.ctx.bits();
        let r = self.reduced_multiples(n, alpha, bits)?.pop().expect("n >= 1");
        if r.dx.is_exact_zero() && r.dy.is_exact_zero() {
            return Ok(None);
        }
        let prec = bits.max(2 * r.ex.significant_bits() + 64);
        let tau = self.ctx.tau(prec);
        let d = tau.scale(&r.dx).add(&BallComplex::from_real(r.dy.clone()));
        let th = theta11_direct(&d, &tau, prec)?;
        let unit = th.div(&BallComplex::from_real(th.abs())).map_err(|_| ThetaError::ContainsZero)?;
        // a^2 Re(tau) is reduced mod 2 exactly before leaving exact arithmetic.
        let a2_re = Rational::from(Integer::from(&r.ex * &r.ex) * self.ctx.tau_re());
        let a2_re = &a2_re - Rational::from(Integer::from(a2_re.floor_ref()) / 2) * 2;
        let re_d = r.dx.mul(&Ball::from_rational(self.ctx.tau_re(), prec)).add(&r.dy);
        let angle = Ball::from_rational(&a2_re, prec).add(&re_d.mul(&Ball::from_integer(&r.ex, prec)).mul_i64(2)).neg();
        if angle.rad_f64() > 0.25 {
            return Ok(None);
        }
        let mut phase = unit_exp(&BallComplex::from_real(angle)).mul(&unit);
        if Integer::from(&r.ex + &r.ey).is_odd() {
            phase = phase.neg();
        }
        Ok(Some(phase))
    }
}

impl HartogsSeries for CounterexampleSeries {
    fn name(&self) -> String {
        format!("n^n theta11(n! z; {}+{}i)", self.ctx.tau_re(), self.ctx.tau_im())
    }

    fn log_abs_coeffs(&self, n_max: u32, alpha: &ExactPoint, budget: &PrecisionBudget)
        -> Result<Vec<LogMagnitude>, HartogsError> {
        let base = budget.at_least(self.ctx.bits());
        with_restarts(&base, |bits| self.logs_at(n_max, alpha, bits), HartogsError::wants_precision)
    }
}

/// A series given by a closed-form `log|f_n|`, independent of `alpha`.
pub struct SyntheticSeries {
    name: String,
    log_coeff: Box<dyn Fn(u32, u32) -> LogMagnitude + Send + Sync>,
}

impl SyntheticSeries {
    /// `log_coeff(n, prec)` must enclose `log|f_n|`.
    pub fn new(name: impl Into<String>, log_coeff: impl Fn(u32, u32) -> LogMagnitude + Send + Sync + 'static) -> Self {
        Self { name: name.into(), log_coeff: Box::new(log_coeff) }
    }

    /// `f_n = r^n`.
    pub fn geometric(r: Rational) -> Self {
        assert!(r > 0, "ratio must be positive");
        let name = format!("{r}^n");
        Self::new(name, move |n, prec| {
            LogMagnitude::Finite(Ball::from_rational(&r, prec).ln().expect("r > 0").mul_i64(n as i64))
        })
    }

    /// `f_n = 1/n!`.
    pub fn inverse_factorial() -> Self {
        Self::new("1/n!", |n, prec| {
            let mut s = Ball::zero(prec);
            for k in 2..=n {
                s = s.add(&Ball::from_i64(k as i64, prec).ln().expect("k >= 2"));
            }
            LogMagnitude::Finite(s.neg())
        })
    }
}

impl HartogsSeries for SyntheticSeries {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn log_abs_coeffs(&self, n_max: u32, _alpha: &ExactPoint, budget: &PrecisionBudget)
        -> Result<Vec<LogMagnitude>, HartogsError> {
        Ok((0..=n_max).map(|n| (self.log_coeff)(n, budget.bits())).collect())
    }
}

/// A series known through a finite table of coefficient enclosures,
/// independent of `alpha`.
#[derive(Clone, Debug)]
pub struct TableSeries {
    name: String,
    logs: Vec<LogMagnitude>,
}

impl TableSeries {
    pub fn new(name: impl Into<String>, logs: Vec<LogMagnitude>) -> Self {
        Self { name: name.into(), logs }
    }

    /// From complex coefficient enclosures; a coefficient whose ball is the
    /// exact zero is a zero coefficient.
    pub fn from_coefficients(name: impl Into<String>, coeffs: &[BallComplex]) -> Result<Self, HartogsError> {
        let logs = coeffs
            .iter()
            .map(|c| {
                if c.is_exact_zero() {
                    Ok(LogMagnitude::NegInfinity)
                } else {
                    c.ln_abs().map(LogMagnitude::Finite).map_err(|_| HartogsError::Theta(ThetaError::ContainsZero))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Self::new(name, logs))
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }
}

impl HartogsSeries for TableSeries {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn log_abs_coeffs(&self, n_max: u32, _alpha: &ExactPoint, _budget: &PrecisionBudget)
        -> Result<Vec<LogMagnitude>, HartogsError> {
        assert!((n_max as usize) < self.logs.len(), "table has {} coefficients", self.logs.len());
        Ok(self.logs[..=n_max as usize].to_vec())
    }
}

/// `min { n >= 1 : den(x) | n! and den(y) | n! }`; from this index on every
/// coefficient vanishes exactly.
pub fn rational_termination(alpha: &ExactPoint) -> Result<u32, HartogsError> {
    let (Some(x), Some(y)) = (alpha.x.as_rational(), alpha.y.as_rational()) else {
        return Err(HartogsError::IrrationalPoint);
    };
    let n0 = factorial_divisor_index(x.denom()).max(factorial_divisor_index(y.denom()));
    // Once both remainders vanish they stay zero, so one exact check suffices.
    let budget = PrecisionBudget::default();
    let fx = factoradic_expand(&alpha.x, n0, &budget)?;
    let fy = factoradic_expand(&alpha.y, n0, &budget)?;
    debug_assert!(fx.remainder().is_exact_zero() && fy.remainder().is_exact_zero());
    if !(fx.remainder().is_exact_zero() && fy.remainder().is_exact_zero()) {
        unreachable!("factorial divisibility and the exact recurrence disagree");
    }
    Ok(n0)
}

/// Smallest `n >= 1` with `q | n!`.
pub fn factorial_divisor_index(q: &Integer) -> u32 {
    let mut n = 1u32;
    let mut rem = q.clone();
    loop {
        rem /= Integer::from(rem.gcd_ref(&Integer::from(n)));
        if rem == 1 {
            return n;
        }
        n += 1;
    }
}

/// Outcome of the finite-N Cauchy-Hadamard estimate.
#[derive(Clone, Debug)]
pub enum RadiusVerdict {
    Zero,
    Finite(Ball),
    Infinite,
    Inconclusive,
}

impl RadiusVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            RadiusVerdict::Zero => "zero",
            RadiusVerdict::Finite(_) => "finite",
            RadiusVerdict::Infinite => "infinite",
            RadiusVerdict::Inconclusive => "inconclusive",
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RadiusVerdict::Zero)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RadiusVerdict::Infinite)
    }
}

/// Thresholds for [`radius_estimate`].
#[derive(Clone, Copy, Debug)]
pub struct RadiusConfig {
    /// Tail maxima of `log|f_n|/n` above this count as blow-up.
    pub blowup: f64,
    /// `|slope|` of the window maxima against `ln n` that counts as a trend.
    pub slope: f64,
    /// Largest change of the window maxima accepted for a finite radius.
    pub tolerance: f64,
}

impl Default for RadiusConfig {
    fn default() -> Self {
        Self { blowup: 50.0, slope: 0.5, tolerance: 0.25 }
    }
}

/// A verdict with the numbers that produced it.
#[derive(Clone, Debug)]
pub struct RadiusEstimate {
    pub verdict: RadiusVerdict,
    /// Smallest `n >= 1` after which every computed coefficient is exactly zero.
    pub n0: Option<u32>,
    /// Enclosure of the last window's maximum of `log|f_n|/n`; `None` when
    /// that window is all zeros.
    pub rho_hat: Option<Ball>,
    pub rho_prev: Option<f64>,
    /// Growth of the window maxima per unit of `ln n`.
    pub slope: Option<f64>,
    pub note: &'static str,
}

impl RadiusEstimate {
    pub fn rho_hat_f64(&self) -> f64 {
        self.rho_hat.as_ref().map_or(f64::NEG_INFINITY, |b| b.to_f64())
    }
}

/// Maximum of `log|f_n|/n` over `range`, with its argmax.
fn window_max(rho: &[Option<Ball>], range: std::ops::RangeInclusive<usize>) -> Option<(usize, Ball)> {
    let mut best: Option<(usize, Ball)> = None;
    for n in range {
        if let Some(b) = &rho[n] {
            if best.as_ref().is_none_or(|(_, m)| b.to_f64() > m.to_f64()) {
                best = Some((n, b.clone()));
            }
        }
    }
    best
}

/// Cauchy-Hadamard radius `1/limsup |f_n|^(1/n)` estimated from the last two
/// windows of `rho_n = log|f_n(alpha)|/n`, `n <= N`.
///
/// Let `m1`, `m2` be the window maxima, attained at `n1 < n2`, and
/// `s = (m2 - m1)/(ln n2 - ln n1)`.
///
/// * The last window is all exact zeros: `Infinite` (polynomial restriction).
/// * `m2 > blowup` and growing, or `s >= slope` with `m2` certified positive:
///   `Zero` (super-exponential growth).
/// * `s <= -slope` with `m2 < 0`: `Infinite` (super-exponential decay).
/// * `|s| < slope` and `|m2 - m1| <= tolerance`: `Finite(exp(-m2))`.
/// * anything else: `Inconclusive`.
///
/// A `Zero` verdict cannot separate radius zero from a radius below
/// `exp(-blowup)`.
pub fn radius_estimate(
    f: &dyn HartogsSeries,
    alpha: &ExactPoint,
    n: u32,
    window: u32,
    budget: &PrecisionBudget,
) -> Result<RadiusEstimate, HartogsError> {
    radius_estimate_with(f, alpha, n, window, budget, &RadiusConfig::default())
}

pub fn radius_estimate_with(
    f: &dyn HartogsSeries,
    alpha: &ExactPoint,
    n: u32,
    window: u32,
    budget: &PrecisionBudget,
    cfg: &RadiusConfig,
) -> Result<RadiusEstimate, HartogsError> {
    if window == 0 || n < 2 * window {
        return Err(HartogsError::InvalidWindow { n, window });
    }
    let logs = f.log_abs_coeffs(n, alpha, budget)?;
    Ok(classify(&logs, window, cfg))
}

/// The verdict for a table `logs[0..=N]`.
pub fn classify(logs: &[LogMagnitude], window: u32, cfg: &RadiusConfig) -> RadiusEstimate {
    let n = logs.len() - 1;
    let w = window as usize;
    let rho: Vec<Option<Ball>> = logs
        .iter()
        .enumerate()
        .map(|(k, l)| match l {
            LogMagnitude::Finite(b) if k > 0 => {
                Some(b.div(&Ball::from_i64(k as i64, b.prec())).expect("k > 0"))
            }
            _ => None,
        })
        .collect();
    let last_nonzero = (1..=n).rev().find(|&k| rho[k].is_some());
    let n0 = Some(last_nonzero.map_or(1, |k| k as u32 + 1)).filter(|&k| k as usize <= n);
    let w2 = window_max(&rho, n - w + 1..=n);
    let w1 = window_max(&rho, n - 2 * w + 1..=n - w);
    let mut est = RadiusEstimate { verdict: RadiusVerdict::Inconclusive, n0: None, rho_hat: None, rho_prev: None, slope: None, note: "" };
    let Some((n2, m2)) = w2 else {
        est.verdict = RadiusVerdict::Infinite;
        est.n0 = n0;
        est.note = "coefficients vanish exactly from n0 on";
        return est;
    };
    est.rho_hat = Some(m2.clone());
    let Some((n1, m1)) = w1 else {
        est.note = "earlier window is all zeros but the last is not";
        return est;
    };
    let (m1f, m2f) = (m1.to_f64(), m2.to_f64());
    let s = (m2f - m1f) / ((n2 as f64).ln() - (n1 as f64).ln());
    est.rho_prev = Some(m1f);
    est.slope = Some(s);
    if m2.lower() > cfg.blowup && m2f > m1f {
        est.verdict = RadiusVerdict::Zero;
        est.note = "blow-up: radius below exp(-threshold), reported as zero";
    } else if s >= cfg.slope && m2.is_positive() {
        est.verdict = RadiusVerdict::Zero;
        est.note = "super-exponential growth: radius below any positive bound, reported as zero";
    } else if s <= -cfg.slope && m2.is_negative() {
        est.verdict = RadiusVerdict::Infinite;
        est.note = "super-exponential decay";
    } else if s.abs() < cfg.slope && (m2f - m1f).abs() <= cfg.tolerance {
        est.verdict = RadiusVerdict::Finite(m2.neg().exp());
        est.note = "window maxima agree";
    } else {
        est.note = "windows disagree";
    }
    est
}

/// One certified inequality of the divergence chain.
#[derive(Clone, Debug)]
pub struct LinkCheck {
    pub name: &'static str,
    /// Enclosure of `lhs - rhs` (or of an expression with the same sign);
    /// certified when its lower end is `>= 0`.
    pub margin: Ball,
    pub certified: bool,
}

impl LinkCheck {
    fn new(name: &'static str, margin: Ball) -> Self {
        let certified = margin.lower() >= 0;
        Self { name, margin, certified }
    }
}

/// All links of the divergence chain at one witness index.
#[derive(Clone, Debug)]
pub struct CertifiedWitness {
    pub n: u32,
    pub coordinate: Coordinate,
    /// `|d(n! coord)|`.
    pub d_coord: Ball,
    pub threshold: Rational,
    /// `[theta at n! alpha vs reduced point, reduced point vs c|d|,
    ///   |d| vs M |d_coord|, |d_coord| vs 1/(2(n+1))]`.
    pub links: [LinkCheck; 4],
    /// `n ln n + ln(c M / (2(n+1)))`.
    pub bound: Ball,
    /// `log|f_n(alpha)|` from the series provider.
    pub log_fn: Ball,
    /// `bound <= log_fn` holds on the whole balls.
    pub dominated: bool,
    pub bits: u32,
}

impl CertifiedWitness {
    pub fn all_certified(&self) -> bool {
        self.links.iter().all(|l| l.certified) && self.dominated
    }
}

#[derive(Clone, Debug)]
pub struct DivergenceCertificate {
    pub coordinate: Coordinate,
    pub c: CConstant,
    pub m: Ball,
    pub witnesses: Vec<CertifiedWitness>,
    /// Gaps between consecutive witness indices, reported as observed.
    pub gaps: Vec<u32>,
}

/// Grid level used for the cell constant inside certificates.
pub const CERTIFICATE_C_LEVEL: u32 = 2;

/// Certifies, at every growth witness `n <= n_max` of the irrational
/// coordinate, the chain
/// `|theta(n! alpha)| >= |theta(d)| >= c |d| >= c M |d_coord| >= c M / (2(n+1))`
/// and checks that the resulting lower bound for `log|f_n(alpha)|` sits
/// below the provider's enclosure.
pub fn divergence_certificate(
    f: &CounterexampleSeries,
    alpha: &ExactPoint,
    n_max: u32,
) -> Result<DivergenceCertificate, HartogsError> {
    let Some(coordinate) = alpha.irrational_coordinate() else {
        return Err(HartogsError::RationalPoint);
    };
    let ctx = f.context();
    let c = c_constant(ctx, CERTIFICATE_C_LEVEL)?;
    let m = ctx.m_constant(ctx.bits());
    let found = witness_search(alpha.coordinate(coordinate), n_max, ctx.budget())?;
    let gaps = crate::diophantine::witness_gaps(&found);
    let witnesses = found
        .par_iter()
        .map(|w| {
            let mut last_bits = ctx.bits();
            with_restarts(
                ctx.budget(),
                |bits| {
                    last_bits = bits;
                    let cw = certify_witness(f, alpha, coordinate, w, &c, bits)?;
                    if cw.all_certified() {
                        Ok(cw)
                    } else {
                        Err(HartogsError::CertificationFailed(w.n))
                    }
                },
                HartogsError::wants_precision,
            )
            .map_err(|e| match e {
                HartogsError::CertificationFailed(_) | HartogsError::Theta(ThetaError::ContainsZero) => {
                    HartogsError::CertificationFailed(w.n)
                }
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DivergenceCertificate { coordinate, c, m, witnesses, gaps })
}

fn float_to_rational(f: &Float) -> Rational {
    f.to_rational().expect("finite")
}

fn certify_witness(
    f: &CounterexampleSeries,
    alpha: &ExactPoint,
    coordinate: Coordinate,
    w: &Witness,
    c: &CConstant,
    bits: u32,
) -> Result<CertifiedWitness, HartogsError> {
    let ctx = f.context().with_budget(PrecisionBudget::new(bits, 0));
    let r = f.reduced_multiples(w.n, alpha, bits)?.pop().expect("n >= 1");
    let prec = bits.max(2 * r.ex.significant_bits() + 64);
    let tau = ctx.tau(prec);
    let tau_re = Ball::from_rational(ctx.tau_re(), prec);
    let tau_im = Ball::from_rational(ctx.tau_im(), prec);
    let norm = ctx.tau_norm_sq();

    // |theta(n! alpha)| / |theta(d)| = exp(pi (E^2 + 2 E dx) Im tau0) >= 1
    // because E^2 + 2 E dx >= E^2 - 2 |E| |dx|, checked exactly.
    let dx_up = float_to_rational(&r.dx.abs().upper());
    let e_abs = Rational::from(r.ex.clone().abs());
    let exact_margin = Rational::from(&e_abs * &e_abs) - Rational::from(&e_abs * &dx_up) * 2;
    let link1 = LinkCheck::new("lattice shift does not decrease |theta|", Ball::from_rational(&exact_margin, prec));

    let d = tau.scale(&r.dx).add(&BallComplex::from_real(r.dy.clone()));
    let th = theta11_direct(&d, &tau, prec)?;
    let abs_th = th.abs();
    let abs_d = d.abs();
    let link2 = LinkCheck::new("|theta(d)| >= c |d|", abs_th.sub(&c.c.mul(&abs_d)));

    // |d|^2 - M^2 d_c^2 written as a sum of nonnegative terms.
    let one = Rational::from(1);
    let margin3 = match coordinate {
        Coordinate::X => {
            let k = (&one - (one.clone() / &norm)).max(Rational::new());
            let lin = r.dy.add(&r.dx.mul(&tau_re)).sqr();
            lin.add(&r.dx.sqr().mul(&tau_im.sqr()).mul(&Ball::from_rational(&k, prec)))
        }
        Coordinate::Y => {
            let k = ((one.clone() / &norm) - &one).max(Rational::new());
            let shift = r.dy.mul(&Ball::from_rational(&Rational::from(ctx.tau_re() / &norm), prec));
            let lin = r.dx.add(&shift).sqr().mul(&Ball::from_rational(&norm, prec));
            lin.add(&r.dy.sqr().mul(&tau_im.sqr()).mul(&Ball::from_rational(&k, prec)))
        }
    };
    let link3 = LinkCheck::new("|d| >= M |d_coord|", margin3);

    let d_coord = match coordinate {
        Coordinate::X => r.dx.abs(),
        Coordinate::Y => r.dy.abs(),
    };
    let link4 = LinkCheck::new("|d_coord| >= 1/(2(n+1))", d_coord.sub(&Ball::from_rational(&w.threshold, prec)));

    let m = ctx.m_constant(prec);
    let denom = Ball::from_i64(2 * (w.n as i64 + 1), prec);
    let bound = n_log_n(w.n, prec)
        .add(&c.c.ln().map_err(|_| ThetaError::ContainsZero)?)
        .add(&m.ln().map_err(|_| ThetaError::ContainsZero)?)
        .sub(&denom.ln().expect("positive"));
    let log_fn = match f.log_abs_coeff(w.n, alpha, ctx.budget())? {
        LogMagnitude::Finite(b) => b,
        LogMagnitude::NegInfinity => return Err(HartogsError::CertificationFailed(w.n)),
    };
    let dominated = bound.upper() <= log_fn.lower();
    Ok(CertifiedWitness {
        n: w.n,
        coordinate,
        d_coord,
        threshold: w.threshold.clone(),
        links: [link1, link2, link3, link4],
        bound,
        log_fn,
        dominated,
        bits,
    })
}

/// Rectangle `[x0, x1] x [y0, y1]` in lattice coordinates sampled at
/// `resolution` nodes per axis, endpoints included.
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub x0: ExactReal,
    pub x1: ExactReal,
    pub y0: ExactReal,
    pub y1: ExactReal,
    pub resolution: u32,
}

impl GridSpec {
    fn axis(a: &ExactReal, b: &ExactReal, res: u32) -> Result<Vec<ExactReal>, HartogsError> {
        let step = b.sub(a)?.div(&ExactReal::from_i64(res as i64 - 1))?;
        (0..res).map(|i| Ok(a.add(&step.mul_integer(&Integer::from(i)))?)).collect()
    }

    /// Nodes in row-major order: `y` outer, `x` inner.
    pub fn nodes(&self) -> Result<Vec<ExactPoint>, HartogsError> {
        if self.resolution < 2 {
            return Err(HartogsError::InvalidResolution);
        }
        let xs = Self::axis(&self.x0, &self.x1, self.resolution)?;
        let ys = Self::axis(&self.y0, &self.y1, self.resolution)?;
        Ok(ys.iter().flat_map(|y| xs.iter().map(move |x| ExactPoint::new(x.clone(), y.clone()))).collect())
    }
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub point: ExactPoint,
    pub estimate: RadiusEstimate,
    /// Growth witnesses `n <= N` of the irrational coordinate (0 at rational points).
    pub witness_count: usize,
}

/// Default tail window for scans and certificates.
pub const DEFAULT_WINDOW: u32 = 8;

/// One row per grid node, row-major. Rational nodes are classified by exact
/// termination, the others by [`radius_estimate`].
pub fn scan_grid(
    f: &CounterexampleSeries,
    grid: &GridSpec,
    n: u32,
    window: u32,
) -> Result<Vec<ScanRow>, HartogsError> {
    if window == 0 || n < 2 * window {
        return Err(HartogsError::InvalidWindow { n, window });
    }
    let nodes = grid.nodes()?;
    nodes
        .par_iter()
        .map(|p| {
            if p.is_rational_point() {
                let n0 = rational_termination(p)?;
                let estimate = RadiusEstimate {
                    verdict: RadiusVerdict::Infinite,
                    n0: Some(n0),
                    rho_hat: None,
                    rho_prev: None,
                    slope: None,
                    note: "exact termination",
                };
                return Ok(ScanRow { point: p.clone(), estimate, witness_count: 0 });
            }
            let estimate = radius_estimate(f, p, n, window, f.context().budget())?;
            let coord = p.irrational_coordinate().expect("irrational point");
            let witness_count = witness_search(p.coordinate(coord), n, f.context().budget())?.len();
            Ok(ScanRow { point: p.clone(), estimate, witness_count })
        })
        .collect()
}

pub const CSV_HEADER: &str = "x,y,verdict,n0_or_blank,rho_hat,witness_count";

/// 17 significant digits; `-inf` for the zero coefficient's log.
pub fn format_number(v: f64) -> String {
    if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else {
        // Normalizes -0.
        format!("{:.16e}", v + 0.0)
    }
}

pub fn write_csv(rows: &[ScanRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let n0 = r.estimate.n0.map(|n| n.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            format_number(r.point.x.to_f64()),
            format_number(r.point.y.to_f64()),
            r.estimate.verdict.label(),
            n0,
            format_number(r.estimate.rho_hat_f64()),
            r.witness_count
        )?;
    }
    Ok(())
}

/// Round-down `f64` of a ball's lower end, for reports.
pub fn lower_f64(b: &Ball) -> f64 {
    Float::with_val_round(53, b.lower(), Round::Down).0.to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ThetaContext {
        ThetaContext::imaginary_unit(PrecisionBudget::new(128, 3))
    }

    fn q(n: i64, d: i64) -> ExactReal {
        ExactReal::ratio(n, d)
    }

    #[test]
    fn first_coefficient_is_zero() {
        let f = counterexample_series(ctx());
        let p = ExactPoint::new(ExactReal::sqrt(2).unwrap(), q(0, 1));
        assert!(f.log_abs_coeff(0, &p, &PrecisionBudget::default()).unwrap().is_neg_infinity());
    }

    #[test]
    fn half_half_vanishes_at_two() {
        let f = counterexample_series(ctx());
        let p = ExactPoint::new(q(1, 2), q(1, 2));
        let logs = f.log_abs_coeffs(2, &p, &PrecisionBudget::default()).unwrap();
        assert!(!logs[1].is_neg_infinity());
        assert!(logs[2].is_neg_infinity());
    }

    #[test]
    fn first_coefficient_at_sqrt2_is_theta() {
        let ctx = ctx();
        let f = counterexample_series(ctx.clone());
        let p = ExactPoint::new(ExactReal::sqrt(2).unwrap(), q(0, 1));
        let l = f.log_abs_coeff(1, &p, &PrecisionBudget::default()).unwrap();
        let z = p.to_ball(&ctx, 128);
        let direct = theta11_direct(&z, &ctx.tau(128), 128).unwrap().ln_abs().unwrap();
        assert!(l.ball().unwrap().overlaps(&direct));
    }

    #[test]
    fn phase_matches_direct_evaluation() {
        let ctx = ctx();
        let f = counterexample_series(ctx.clone());
        let p = ExactPoint::new(ExactReal::ratio(7, 5), ExactReal::sqrt(3).unwrap());
        for n in 1..=3u32 {
            let fact = (1..=n as i64).product::<i64>();
            let z = p.to_ball(&ctx, 128).mul_i64(fact);
            let th = theta11_direct(&z, &ctx.tau(128), 128).unwrap();
            let unit = th.div(&BallComplex::from_real(th.abs())).unwrap();
            let phase = f.coefficient_phase(n, &p).unwrap().unwrap();
            assert!(phase.overlaps(&unit), "n = {n}");
        }
    }

    #[test]
    fn termination_indices() {
        let t = |x: (i64, i64), y: (i64, i64)| rational_termination(&ExactPoint::new(q(x.0, x.1), q(y.0, y.1))).unwrap();
        assert_eq!(t((1, 3), (1, 2)), 3);
        assert_eq!(t((0, 1), (0, 1)), 1);
        assert_eq!(t((1, 8), (0, 1)), 4);
        assert_eq!(t((1, 9), (0, 1)), 6);
        let e = rational_termination(&ExactPoint::new(ExactReal::sqrt(2).unwrap(), q(0, 1))).unwrap_err();
        assert_eq!(e, HartogsError::IrrationalPoint);
    }

    #[test]
    fn synthetic_verdicts() {
        let p = ExactPoint::new(q(0, 1), q(0, 1));
        let b = PrecisionBudget::default();
        let est = radius_estimate(&SyntheticSeries::geometric(Rational::from(2)), &p, 40, 8, &b).unwrap();
        match est.verdict {
            RadiusVerdict::Finite(r) => assert!(r.contains_f64(0.5)),
            v => panic!("{v:?}"),
        }
        let est = radius_estimate(&SyntheticSeries::inverse_factorial(), &p, 40, 8, &b).unwrap();
        assert!(est.verdict.is_infinite());
        assert!(radius_estimate(&SyntheticSeries::inverse_factorial(), &p, 10, 8, &b).is_err());
    }

    #[test]
    fn classify_reports_termination_index() {
        let mut logs = vec![LogMagnitude::NegInfinity];
        for _ in 1..7 {
            logs.push(LogMagnitude::Finite(Ball::from_f64(3.0, 64)));
        }
        for _ in 7..=30 {
            logs.push(LogMagnitude::NegInfinity);
        }
        let est = classify(&logs, 8, &RadiusConfig::default());
        assert!(est.verdict.is_infinite());
        assert_eq!(est.n0, Some(7));
    }

    #[test]
    fn csv_formatting() {
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
        assert_eq!(format_number(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_number(1.0 / 3.0).len(), "3.3333333333333331e-1".len());
    }
}
