use proptest::prelude::*;
use rug::{Integer, Rational};

use hartogs_lab::algebraic::{BivarPoly, GaussRat, XPoly};
use hartogs_lab::numeric::ExactReal;
use hartogs_lab::parse::{parse_bivar, parse_complex, parse_point, parse_poly, parse_real};

fn gauss() -> impl Strategy<Value = GaussRat> {
    (-9i64..=9, 1i64..=7, -9i64..=9, 1i64..=7)
        .prop_map(|(a, b, c, d)| GaussRat::new(Rational::from((a, b)), Rational::from((c, d))))
}

fn bivar() -> impl Strategy<Value = BivarPoly> {
    prop::collection::vec(((0u32..3, 0u32..3), gauss()), 0..5).prop_map(|terms| {
        terms.into_iter().fold(BivarPoly::zero(), |acc, ((dz, dw), c)| acc.add(&BivarPoly::monomial(dz, dw, c)))
    })
}

proptest! {
    #[test]
    fn complex_display_round_trips(g in gauss()) {
        prop_assert_eq!(parse_complex(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn bivariate_display_round_trips(p in bivar()) {
        prop_assert_eq!(parse_bivar(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn relation_display_round_trips(lead in bivar(), rest in prop::collection::vec(bivar(), 1..3)) {
        prop_assume!(!lead.is_zero());
        let mut coeffs = vec![lead];
        coeffs.extend(rest);
        let phi = XPoly::new(coeffs).unwrap();
        let back = parse_poly(&phi.to_string()).unwrap();
        prop_assert_eq!(back.coeffs(), phi.coeffs());
    }

    #[test]
    fn surds_parse_to_their_value(a in -20i64..20, b in 1i64..9, c in 1i64..9, m in 2u32..40) {
        let text = format!("{a}/{b} + {c}*sqrt({m})");
        let x = parse_real(&text).unwrap();
        let want = ExactReal::surd(Rational::from((a, b)), Rational::from(c), Integer::from(m)).unwrap();
        prop_assert_eq!(x, want);
    }
}

#[test]
fn decimals_are_exact() {
    assert_eq!(parse_real("0.125").unwrap().as_rational(), Some(&Rational::from((1, 8))));
    assert_eq!(parse_complex("1.5 - 0.25i").unwrap(), GaussRat::new(Rational::from((3, 2)), Rational::from((-1, 4))));
}

#[test]
fn points_are_linear_in_t0() {
    let p = parse_point("sqrt(2)*t0 + 1/3").unwrap();
    assert_eq!(p.x, ExactReal::sqrt(2).unwrap());
    assert_eq!(p.y.as_rational(), Some(&Rational::from((1, 3))));
    assert!(parse_point("t0^2").is_err());
}

#[test]
fn errors_point_at_the_offending_byte() {
    assert_eq!(parse_real("1 + ").unwrap_err().offset, 4);
    assert_eq!(parse_bivar("z * (w").unwrap_err().offset, 6);
    assert!(parse_poly("z + w").is_err());
}
