use proptest::prelude::*;
use rug::{Integer, Rational};

use hartogs_lab::numeric::{Ball, BallComplex, ExactReal, PrecisionBudget};

const PREC: u32 = 96;

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| Rational::from((n, d)))
}

fn nonzero_rational() -> impl Strategy<Value = Rational> {
    rational().prop_filter("nonzero", |r| *r != 0)
}

fn ball(r: &Rational) -> Ball {
    Ball::from_rational(r, PREC)
}

proptest! {
    #[test]
    fn field_operations_enclose_exact_results(a in rational(), b in nonzero_rational()) {
        let (x, y) = (ball(&a), ball(&b));
        prop_assert!(x.add(&y).contains_rational(&Rational::from(&a + &b)));
        prop_assert!(x.sub(&y).contains_rational(&Rational::from(&a - &b)));
        prop_assert!(x.mul(&y).contains_rational(&Rational::from(&a * &b)));
        prop_assert!(x.div(&y).unwrap().contains_rational(&Rational::from(&a / &b)));
        prop_assert!(x.sqr().contains_rational(&Rational::from(&a * &a)));
        prop_assert!(x.abs().contains_rational(&Rational::from(a.abs_ref())));
    }

    #[test]
    fn long_products_keep_enclosure(xs in prop::collection::vec(nonzero_rational(), 1..40)) {
        let mut acc = Ball::one(PREC);
        let mut exact = Rational::from(1);
        for x in &xs {
            acc = acc.mul(&ball(x));
            exact *= x;
        }
        prop_assert!(acc.contains_rational(&exact));
    }

    #[test]
    fn exp_and_ln_are_inverse(a in rational()) {
        let x = ball(&(a / 1000));
        prop_assert!(x.exp().ln().unwrap().overlaps(&x));
    }

    #[test]
    fn complex_division_undoes_multiplication(
        a in rational(), b in rational(), c in nonzero_rational(), d in rational(),
    ) {
        let u = BallComplex::from_rationals(&a, &b, PREC);
        let v = BallComplex::from_rationals(&c, &d, PREC);
        prop_assert!(u.mul(&v).div(&v).unwrap().overlaps(&u));
    }

    #[test]
    fn surd_arithmetic_matches_evaluation(
        a in rational(), b in nonzero_rational(), c in rational(), d in nonzero_rational(), m in 2i64..60,
    ) {
        prop_assume!(!Integer::from(m).is_perfect_square());
        let x = ExactReal::surd(a, b, Integer::from(m)).unwrap();
        let y = ExactReal::surd(c, d, Integer::from(m)).unwrap();
        let budget = PrecisionBudget::default();
        let (bx, by) = (x.eval(&budget), y.eval(&budget));
        prop_assert!(x.add(&y).unwrap().eval(&budget).overlaps(&bx.add(&by)));
        prop_assert!(x.mul(&y).unwrap().eval(&budget).overlaps(&bx.mul(&by)));
        prop_assert!(x.div(&y).unwrap().eval(&budget).overlaps(&bx.div(&by).unwrap()));
        // (a + b sqrt m)(a - b sqrt m) is rational.
        prop_assert!(x.mul(&x.recip().unwrap()).unwrap().as_rational() == Some(&Rational::from(1)));
    }

    #[test]
    fn surd_sign_matches_enclosure(a in rational(), b in nonzero_rational(), m in 2i64..60) {
        prop_assume!(!Integer::from(m).is_perfect_square());
        let x = ExactReal::surd(a, b, Integer::from(m)).unwrap();
        let e = x.eval_bits(256);
        match x.signum() {
            std::cmp::Ordering::Greater => prop_assert!(e.is_positive()),
            std::cmp::Ordering::Less => prop_assert!(e.is_negative()),
            std::cmp::Ordering::Equal => unreachable!("irrational surds are nonzero"),
        }
    }
}

#[test]
fn sqrt_of_square_is_rational() {
    assert_eq!(ExactReal::sqrt(49).unwrap().as_rational(), Some(&Rational::from(7)));
    assert!(!ExactReal::sqrt(50).unwrap().is_rational());
}

#[test]
fn division_by_ball_containing_zero_fails() {
    let tiny = Ball::from_interval(&rug::Float::with_val(PREC, -1e-30), &rug::Float::with_val(PREC, 1e-30), PREC);
    assert!(Ball::one(PREC).div(&tiny).is_err());
    assert!(tiny.ln().is_err());
}

#[test]
fn pi_matches_fifty_digits() {
    let digits = Integer::from_str_radix("314159265358979323846264338327950288419716939937510", 10).unwrap();
    let reference = Rational::from((digits, Integer::from(Integer::u_pow_u(10, 50))));
    let pi = Ball::pi(200);
    assert!(pi.sub(&Ball::from_rational(&reference, 200)).abs().upper() < 1e-49);
    assert!(pi.rad_f64() < 1e-55);
}

#[test]
fn modulus_of_a_ball_straddling_zero() {
    let tiny = Ball::from_interval(&rug::Float::with_val(PREC, -1e-40), &rug::Float::with_val(PREC, 3e-40), PREC);
    let z = BallComplex::new(tiny.clone(), tiny);
    let m = z.abs();
    assert!(m.contains_f64(0.0));
    assert!(m.upper() < 1e-39);
}
