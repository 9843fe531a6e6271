use rayon::prelude::*;

use super::{discriminant, hensel_lift_numeric, roots_univar, AlgebraError, GaussRat, XPoly};
use crate::hartogs::{classify, RadiusConfig, RadiusEstimate, RadiusVerdict};
use crate::numeric::{Ball, BallComplex, PrecisionBudget};
use crate::theta::LogMagnitude;

/// Distance from `w = 0` to the nearest point of the discriminant locus over
/// a fixed `z0`.
#[derive(Clone, Debug)]
pub enum SingularityRadius {
    Finite(Ball),
    Infinite,
}

impl SingularityRadius {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Finite(b) => b.to_f64(),
            Self::Infinite => f64::INFINITY,
        }
    }
}

/// `min |w|` over the roots of `Delta(z0, w)` with `|w| <= cap`, where `Delta`
/// is the discriminant of the monic form of `phi`; `Infinite` when there is
/// no such root. A relation of degree 1 in `X` has no branch collisions.
pub fn singularity_radius(phi: &XPoly, z0: &BallComplex, cap: Option<f64>) -> Result<SingularityRadius, AlgebraError> {
    if phi.degree() < 2 {
        return Ok(SingularityRadius::Infinite);
    }
    let monic = if phi.is_monic() { phi.clone() } else { phi.monicize().phi };
    let delta = discriminant(&monic)?;
    let coeffs = delta.specialize_z(z0);
    if coeffs.iter().all(BallComplex::is_exact_zero) {
        return Err(AlgebraError::DiscriminantVanishesIdentically);
    }
    let mut best: Option<Ball> = None;
    for c in roots_univar(&coeffs, true)? {
        let dist = c.enclosure.abs();
        if cap.is_some_and(|r| dist.lower() > r) {
            continue;
        }
        best = Some(match best {
            Some(b) => b.min(&dist),
            None => dist,
        });
    }
    Ok(best.map_or(SingularityRadius::Infinite, SingularityRadius::Finite))
}

/// Settings for [`theorem1_consistency`].
#[derive(Clone, Debug)]
pub struct ConsistencyConfig {
    /// Truncation order `N` of the lifted branch.
    pub order: usize,
    /// Window length of the radius estimator.
    pub window: u32,
    pub budget: PrecisionBudget,
    /// Value of `F(z0, 0)` to lift from; by default the first simple root in
    /// (real part, imaginary part) order.
    pub seed: Option<GaussRat>,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        Self { order: 512, window: 64, budget: PrecisionBudget::default(), seed: None }
    }
}

/// Outcome at one sample point.
#[derive(Clone, Debug)]
pub struct ConsistencyRow {
    pub z0: GaussRat,
    pub root: BallComplex,
    pub estimate: RadiusEstimate,
    pub singular: SingularityRadius,
    /// Estimated radius over discriminant distance, when both are finite.
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Allowed band for the estimated radius over the discriminant distance.
pub const RATIO_BAND: (f64, f64) = (0.9, 1.1);

fn seed_root(phi: &XPoly, z0: &BallComplex, cfg: &ConsistencyConfig) -> Result<BallComplex, AlgebraError> {
    let prec = z0.prec();
    if let Some(s) = &cfg.seed {
        return Ok(s.to_ball(prec));
    }
    let at_zero: Vec<BallComplex> = phi
        .coeffs()
        .iter()
        .rev()
        .map(|c| c.specialize_z(z0).into_iter().next().unwrap_or_else(|| BallComplex::zero(prec)))
        .collect();
    roots_univar(&at_zero, true)?
        .into_iter()
        .find(|c| c.multiplicity == 1)
        .map(|c| c.enclosure.center())
        .ok_or(AlgebraError::SingularInitialRoot)
}

fn check_point(phi: &XPoly, z0: &GaussRat, cfg: &ConsistencyConfig) -> Result<ConsistencyRow, AlgebraError> {
    let zb = z0.to_ball(cfg.budget.bits());
    let seed = seed_root(phi, &zb, cfg)?;
    let lift = hensel_lift_numeric(phi, &zb, &seed, cfg.order, &cfg.budget)?;
    // Coefficients pinned in a tiny ball around 0 count as zeros here;
    // the lift guarantees every other coefficient excludes 0.
    let logs: Vec<LogMagnitude> = lift
        .series
        .coeffs()
        .iter()
        .map(|c| c.ln_abs().map_or(LogMagnitude::NegInfinity, LogMagnitude::Finite))
        .collect();
    let estimate = classify(&logs, cfg.window, &RadiusConfig::default());
    let singular = singularity_radius(phi, &zb, None)?;
    let ratio = match (&estimate.verdict, &singular) {
        (RadiusVerdict::Finite(r), SingularityRadius::Finite(s)) => Some(r.to_f64() / s.to_f64()),
        _ => None,
    };
    let pass = match (&estimate.verdict, &singular) {
        (RadiusVerdict::Infinite, SingularityRadius::Infinite) => true,
        _ => ratio.is_some_and(|q| (RATIO_BAND.0..=RATIO_BAND.1).contains(&q)),
    };
    Ok(ConsistencyRow { z0: z0.clone(), root: lift.root, estimate, singular, ratio, pass })
}

/// At each sample `z0`, lifts a branch of `phi` through `w^N`, estimates its
/// radius of convergence in `w` from the coefficients, and compares it with
/// the distance to the discriminant locus. Rows keep the sample order.
pub fn theorem1_consistency(
    phi: &XPoly,
    samples: &[GaussRat],
    cfg: &ConsistencyConfig,
) -> Result<Vec<ConsistencyRow>, AlgebraError> {
    if cfg.window == 0 || cfg.order < 2 * cfg.window as usize {
        return Err(crate::hartogs::HartogsError::InvalidWindow { n: cfg.order as u32, window: cfg.window }.into());
    }
    samples.par_iter().map(|z0| check_point(phi, z0, cfg)).collect()
}
