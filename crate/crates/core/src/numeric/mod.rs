//! Exact reals and rigorous ball arithmetic.
//!
//! Every numeric quantity in the crate is an enclosure: a [`Ball`] is a
//! midpoint with an absolute error radius, and every operation rounds the
//! radius outward so that the true value is always contained. Exact seeds
//! ([`ExactReal`]) are rationals or quadratic surds and are only converted to
//! balls at the last moment, at whatever precision the caller asks for.

mod ball;
mod complex;
mod exact;

pub use ball::Ball;
pub use complex::{unit_exp, BallComplex};
pub use exact::{eval_exact, ExactError, ExactReal};

use thiserror::Error;

/// Errors raised by ball operations that cannot meet their contract.
///
/// Both variants mean the same thing to a driver: escalate precision or
/// reject the input.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NumericError {
    #[error("divisor ball straddles zero")]
    DivisorStraddlesZero,
    #[error("logarithm of a ball that is not strictly positive")]
    LogOfNonpositive,
    #[error("square root of a ball that is not nonnegative")]
    SqrtOfNegative,
}

/// Working precision together with the number of doublings a driver may try.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionBudget {
    bits: u32,
    max_restarts: u32,
}

impl PrecisionBudget {
    pub const MIN_BITS: u32 = 32;

    /// Panics if `bits < 32`; use [`PrecisionBudget::try_new`] for user input.
    pub fn new(bits: u32, max_restarts: u32) -> Self {
        Self::try_new(bits, max_restarts).expect("precision budget below 32 bits")
    }

    pub fn try_new(bits: u32, max_restarts: u32) -> Option<Self> {
        (bits >= Self::MIN_BITS).then_some(Self { bits, max_restarts })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn max_restarts(&self) -> u32 {
        self.max_restarts
    }

    /// Precision of the `attempt`-th try (attempt 0 is the base budget).
    pub fn bits_for_attempt(&self, attempt: u32) -> u32 {
        self.bits.saturating_mul(1u32 << attempt.min(20))
    }

    /// Same restart policy, with at least `bits` of working precision.
    pub fn at_least(&self, bits: u32) -> Self {
        Self { bits: self.bits.max(bits), max_restarts: self.max_restarts }
    }
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        Self { bits: 128, max_restarts: 4 }
    }
}

/// Runs `f` at the budget's precision, doubling on every failure that
/// `wants_more` classifies as a precision problem.
///
/// The closure receives the precision of the current attempt and must
/// re-derive everything from exact seeds; partial results are never reused.
pub fn with_restarts<T, E>(
    budget: &PrecisionBudget,
    mut f: impl FnMut(u32) -> Result<T, E>,
    wants_more: impl Fn(&E) -> bool,
) -> Result<T, E> {
    let mut attempt = 0;
    loop {
        match f(budget.bits_for_attempt(attempt)) {
            Err(e) if wants_more(&e) && attempt < budget.max_restarts => attempt += 1,
            other => return other,
        }
    }
}

/// `ceil(log2(n!))`, computed in floating point with a safety margin of one
/// bit per thousand factors.
pub fn log2_factorial_bits(n: u32) -> u32 {
    let s: f64 = (2..=n).map(|k| (k as f64).log2()).sum();
    s.ceil() as u32 + n / 1000 + 1
}
