//! Algebraic relations `Phi(z, w, X) = 0` over Gaussian rationals: monic
//! normalization, discriminants, Newton lifting of a branch `F(z, w)` and the
//! comparison of its radius in `w` with the discriminant locus.

mod bivar;
mod consistency;
mod discriminant;
mod gauss;
mod hensel;
mod ratfunc;
mod roots;
mod upoly;
mod xpoly;

use thiserror::Error;

use crate::hartogs::HartogsError;

pub use bivar::BivarPoly;
pub use consistency::{
    singularity_radius, theorem1_consistency, ConsistencyConfig, ConsistencyRow, SingularityRadius,
    RATIO_BAND,
};
pub use discriminant::{berkowitz_det, discriminant, discriminant_at, resultant, sylvester};
pub use gauss::GaussRat;
pub use hensel::{
    hensel_lift_exact, hensel_lift_numeric, parse_exact_lift, residual_exact, residual_numeric, write_exact_lift,
    ExactSeries, NumericLift, NumericSeries, SeriesInW,
};
pub use ratfunc::{RatFunc, MAX_MONOMIALS};
pub use roots::{roots_univar, RootCluster};
pub use upoly::UPoly;
pub use xpoly::{Monicized, XPoly};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational function exceeds {0} monomials")]
    Blowup(usize),
    #[error("relation has no X term")]
    NotPolynomialInX,
    #[error("leading coefficient Phi_0 vanishes identically")]
    ZeroLeadingCoefficient,
    #[error("relation has degree below 2 in X")]
    DegreeTooSmall,
    #[error("relation is not monic in X")]
    NotMonic,
    #[error("seed is not a root of Phi(z, 0, X)")]
    NotARoot,
    #[error("dPhi/dX vanishes at the seed")]
    SingularInitialRoot,
    #[error("could not certify a simple root near the seed")]
    RootNotCertified,
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("discriminant vanishes identically at this z")]
    DiscriminantVanishesIdentically,
    #[error("leading coefficient ball contains zero")]
    UncertainLeadingCoefficient,
    #[error("lifted coefficients lost all precision at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("malformed lift file, line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Hartogs(#[from] HartogsError),
}

impl AlgebraError {
    pub(crate) fn wants_precision(&self) -> bool {
        matches!(self, Self::PrecisionExhausted { .. } | Self::UncertainLeadingCoefficient | Self::RootNotCertified)
    }
}
