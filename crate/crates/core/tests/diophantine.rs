use proptest::prelude::*;
use rug::{Integer, Rational};

use hartogs_lab::diophantine::{
    d_factorial, d_factorial_exact, factoradic_expand, lattice_reduce, nearest_int_exact, witness_search,
    witness_threshold,
};
use hartogs_lab::numeric::{BallComplex, ExactReal, PrecisionBudget};

/// `(e, d)` with `e = ceil(v - 1/2)` and `d = v - e`.
fn nearest(v: &Rational) -> (Integer, Rational) {
    let shifted = v - Rational::from((1, 2));
    let e = Integer::from(shifted.ceil_ref());
    let d = Rational::from(v - &e);
    (e, d)
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-5_000i64..5_000, 1i64..2_000).prop_map(|(n, d)| Rational::from((n, d)))
}

fn surd() -> impl Strategy<Value = ExactReal> {
    ((-50i64..50, 1i64..20), (1i64..10, 1i64..20), 2i64..150)
        .prop_filter("irrational", |(_, _, m)| !Integer::from(*m).is_perfect_square())
        .prop_map(|((a, ad), (b, bd), m)| {
            ExactReal::surd(Rational::from((a, ad)), Rational::from((b, bd)), Integer::from(m)).unwrap()
        })
}

#[test]
fn ties_round_down() {
    assert_eq!(nearest_int_exact(&Rational::from((1, 2))).0, 0);
    assert_eq!(nearest_int_exact(&Rational::from((-1, 2))).0, -1);
    assert_eq!(nearest_int_exact(&Rational::from((5, 2))).0, 2);
}

proptest! {
    #[test]
    fn nearest_integer_matches_floor_oracle(v in rational()) {
        let (e, d) = nearest_int_exact(&v);
        let (e2, d2) = nearest(&v);
        prop_assert_eq!(e, e2);
        prop_assert_eq!(&d, &d2);
        prop_assert!(d > (-1, 2) && d <= (1, 2));
    }

    #[test]
    fn remainders_are_distances_of_factorial_multiples(x in rational(), depth in 1u32..40) {
        let f = factoradic_expand(&ExactReal::rational(x.clone()), depth, &PrecisionBudget::default()).unwrap();
        for s in f.states() {
            let (e, d) = nearest(&Rational::from(&x * factorial(s.k)));
            prop_assert_eq!(s.b_exact.as_ref(), Some(&d));
            prop_assert_eq!(&s.e, &e);
            prop_assert!(s.b.contains_rational(&d));
        }
        prop_assert_eq!(d_factorial_exact(&x, depth).0, nearest(&Rational::from(&x * factorial(depth))).1);
    }

    #[test]
    fn partial_sums_leave_the_scaled_remainder(x in rational(), depth in 1u32..40) {
        let f = factoradic_expand(&ExactReal::rational(x.clone()), depth, &PrecisionBudget::default()).unwrap();
        let b = f.state(depth).b_exact.clone().unwrap();
        // x = sum_{k <= K} a_k / k! + b_K / K!
        prop_assert_eq!(&x - f.partial_sum(), b / factorial(depth));
    }

    #[test]
    fn digits_are_bounded(x in surd(), depth in 2u32..120) {
        let f = factoradic_expand(&x, depth, &PrecisionBudget::default()).unwrap();
        for s in &f.states()[1..] {
            // |a_k| = |e(k b_{k-1})| <= k/2 for k >= 2.
            prop_assert!(Integer::from(s.a.abs_ref()) * 2 <= s.k);
        }
    }

    #[test]
    fn surd_remainders_enclose_direct_products(x in surd(), n in 1u32..80) {
        let budget = PrecisionBudget::default();
        let (d, e) = d_factorial(&x, n, &budget).unwrap();
        let direct = x.mul_integer(&factorial(n)).eval_bits(2048).sub(&hartogs_lab::numeric::Ball::from_integer(&e, 2048));
        prop_assert!(d.overlaps(&direct));
    }

    #[test]
    fn witnesses_are_exactly_the_nonzero_next_digits(x in surd()) {
        let budget = PrecisionBudget::default();
        let n_max = 60;
        let f = factoradic_expand(&x, n_max + 1, &budget).unwrap();
        let expected: Vec<u32> = (1..=n_max).filter(|&n| f.state(n + 1).a != 0).collect();
        let found: Vec<u32> = witness_search(&x, n_max, &budget).unwrap().iter().map(|w| w.n).collect();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn lattice_reduction_reconstructs(re in -40.0f64..40.0, im in -40.0f64..40.0) {
        let tau = BallComplex::from_rationals(&Rational::from((1, 3)), &Rational::from((5, 4)), 128);
        let z = BallComplex::from_f64(re, im, 128);
        if let Ok(r) = lattice_reduce(&z, &tau) {
            prop_assert!(r.reconstruct(&tau).overlaps(&z));
            prop_assert!(r.dx.abs().upper() <= 0.5 + 1e-30);
            prop_assert!(r.dy.abs().upper() <= 0.5 + 1e-30);
        }
    }
}

#[test]
fn rational_seeds_have_no_witnesses() {
    assert!(witness_search(&ExactReal::ratio(3, 7), 20, &PrecisionBudget::default()).is_err());
}

#[test]
fn threshold_is_half_reciprocal() {
    assert_eq!(witness_threshold(9), Rational::from((1, 20)));
}
