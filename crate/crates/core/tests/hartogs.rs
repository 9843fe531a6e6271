use proptest::prelude::*;
use rug::{Integer, Rational};

use hartogs_lab::hartogs::{
    classify, counterexample_series, divergence_certificate, radius_estimate, rational_termination, scan_grid,
    write_csv, Coordinate, ExactPoint, GridSpec, HartogsError, RadiusConfig, RadiusVerdict, SyntheticSeries,
    TableSeries, CSV_HEADER, DEFAULT_WINDOW,
};
use hartogs_lab::numeric::{Ball, BallComplex, ExactReal, PrecisionBudget};
use hartogs_lab::theta::{LogMagnitude, ThetaContext};

fn ctx() -> ThetaContext {
    ThetaContext::imaginary_unit(PrecisionBudget::default())
}

fn origin() -> ExactPoint {
    ExactPoint::rational(Rational::from(0), Rational::from(0))
}

/// Smallest `n` with `q | n!`, by multiplying out the factorial.
fn brute_index(q: &Integer) -> u32 {
    (1..).find(|&n| Integer::from(Integer::factorial(n)).is_divisible(q)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn termination_index_matches_factorial_oracle(a in -40i64..40, b in 1i64..60, c in -40i64..40, d in 1i64..60) {
        let (x, y) = (Rational::from((a, b)), Rational::from((c, d)));
        let q = x.denom().clone().lcm(y.denom());
        let n0 = rational_termination(&ExactPoint::rational(x, y)).unwrap();
        prop_assert_eq!(n0, brute_index(&q));
    }

    #[test]
    fn rational_points_vanish_from_the_termination_index(a in 0i64..12, b in 1i64..10, c in 0i64..12, d in 1i64..10) {
        let p = ExactPoint::rational(Rational::from((a, b)), Rational::from((c, d)));
        let series = counterexample_series(ctx());
        let n0 = rational_termination(&p).unwrap();
        let logs = hartogs_lab::hartogs::HartogsSeries::log_abs_coeffs(&series, 20, &p, &PrecisionBudget::default()).unwrap();
        for (n, l) in logs.iter().enumerate().skip(1) {
            prop_assert_eq!(l.is_neg_infinity(), n as u32 >= n0, "n = {}", n);
        }
    }

    #[test]
    fn geometric_series_recover_their_radius(num in 1i64..20, den in 1i64..20) {
        let r = Rational::from((num, den));
        let est = radius_estimate(&SyntheticSeries::geometric(r.clone()), &origin(), 64, 16, &PrecisionBudget::default()).unwrap();
        match est.verdict {
            RadiusVerdict::Finite(rho) => {
                let want = 1.0 / r.to_f64();
                prop_assert!((rho.to_f64() - want).abs() <= 1e-9 * want);
            }
            other => prop_assert!(false, "verdict {}", other.label()),
        }
    }
}

#[test]
fn inverse_factorial_is_entire() {
    let est = radius_estimate(&SyntheticSeries::inverse_factorial(), &origin(), 64, 16, &PrecisionBudget::default()).unwrap();
    assert!(est.verdict.is_infinite());
    assert_eq!(est.n0, None);
}

#[test]
fn factorial_growth_has_radius_zero() {
    // f_n = n^n
    let logs: Vec<LogMagnitude> = (0..=64u32)
        .map(|n| {
            if n == 0 {
                LogMagnitude::Finite(Ball::zero(64))
            } else {
                LogMagnitude::Finite(Ball::from_i64(n as i64, 64).ln().unwrap().mul_i64(n as i64))
            }
        })
        .collect();
    let est = classify(&logs, 16, &RadiusConfig::default());
    assert!(est.verdict.is_zero());
}

#[test]
fn table_polynomial_is_entire() {
    let mut coeffs: Vec<BallComplex> = (0..10).map(|k| BallComplex::from_f64(k as f64 + 1.0, 0.0, 64)).collect();
    coeffs.extend((0..30).map(|_| BallComplex::zero(64)));
    let table = TableSeries::from_coefficients("poly", &coeffs).unwrap();
    let est = radius_estimate(&table, &origin(), 39, 8, &PrecisionBudget::default()).unwrap();
    assert!(est.verdict.is_infinite());
    assert_eq!(est.n0, Some(10));
}

#[test]
fn surd_coordinates_diverge() {
    let series = counterexample_series(ctx());
    for m in [2, 3, 5, 7] {
        let s = ExactReal::sqrt(m).unwrap();
        let p = ExactPoint::new(ExactReal::ratio(1, 3), s);
        assert_eq!(p.irrational_coordinate(), Some(Coordinate::Y));
        let est = radius_estimate(&series, &p, 25, DEFAULT_WINDOW, &PrecisionBudget::default()).unwrap();
        assert!(est.verdict.is_zero(), "sqrt({m}): {}", est.verdict.label());
    }
}

#[test]
fn certificate_rejects_rational_points() {
    let series = counterexample_series(ctx());
    let err = divergence_certificate(&series, &ExactPoint::rational(Rational::from((1, 2)), Rational::from(0)), 10);
    assert!(matches!(err, Err(HartogsError::RationalPoint)));
}

#[test]
fn certificate_links_have_positive_margins() {
    let series = counterexample_series(ctx());
    let alpha = ExactPoint::new(ExactReal::from_i64(0), ExactReal::sqrt(3).unwrap());
    let cert = divergence_certificate(&series, &alpha, 12).unwrap();
    assert!(!cert.witnesses.is_empty());
    for w in &cert.witnesses {
        assert!(w.all_certified(), "n = {}", w.n);
        assert!(w.links.iter().all(|l| l.margin.lower() >= 0));
        assert!(w.dominated);
    }
}

#[test]
fn scan_rows_are_row_major_with_header() {
    let series = counterexample_series(ctx());
    let grid = GridSpec {
        x0: ExactReal::from_i64(0),
        x1: ExactReal::sqrt(2).unwrap(),
        y0: ExactReal::ratio(-1, 2),
        y1: ExactReal::ratio(1, 2),
        resolution: 3,
    };
    let rows = scan_grid(&series, &grid, 20, DEFAULT_WINDOW).unwrap();
    assert_eq!(rows.len(), 9);
    for (i, row) in rows.iter().enumerate() {
        let rational = i % 3 == 0;
        assert_eq!(row.point.is_rational_point(), rational);
        assert_eq!(row.estimate.verdict.is_infinite(), rational, "row {i}");
    }
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 9);
}

#[test]
fn scan_rejects_short_series() {
    let series = counterexample_series(ctx());
    let grid = GridSpec {
        x0: ExactReal::from_i64(0),
        x1: ExactReal::from_i64(1),
        y0: ExactReal::from_i64(0),
        y1: ExactReal::from_i64(1),
        resolution: 2,
    };
    assert!(scan_grid(&series, &grid, 10, 8).is_err());
}
