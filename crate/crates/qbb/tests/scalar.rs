use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qbb::scalar::{parse_rational_function, qbinom, Coefficient, Field, RadicalRational};
use qbb::{Error, Laurent, Matrix, Scalar};

fn p(s: &str) -> Scalar {
    parse_rational_function(s).unwrap()
}

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rr(n: i64) -> RadicalRational {
    RadicalRational::from_int(n)
}

/// Independent evaluation of a rational function at a rational point, via
/// numerator and denominator evaluated separately.
fn eval(x: &Scalar, t: &BigRational) -> BigRational {
    let c = RadicalRational::from_rational(t.clone());
    let n = x.num().eval(&c).unwrap();
    let d = x.den_poly().eval(&c).unwrap();
    (n * d.inv().unwrap()).to_rational().unwrap()
}

#[test]
fn qbinom_examples() {
    assert_eq!(qbinom::<RadicalRational>(2, 1, 1).unwrap(), p("q+q^-1"));
    assert_eq!(qbinom::<RadicalRational>(3, 1, 1).unwrap(), p("q^2+1+q^-2"));
    // [3][2]/[2]! expanded by hand: [3] = q^2+1+q^-2
    assert_eq!(qbinom::<RadicalRational>(3, 2, 1).unwrap(), p("q^2+1+q^-2"));
    assert_eq!(qbinom::<RadicalRational>(7, 0, 1).unwrap(), Scalar::one());
    assert!(matches!(qbinom::<RadicalRational>(3, -1, 1), Err(Error::InvalidArgument(_))));
    // [-1][-2] = [1][2], so [-1 choose 2] = 1
    assert_eq!(qbinom::<RadicalRational>(-1, 2, 1).unwrap(), Scalar::one());
    assert!(qbinom::<RadicalRational>(5, 2, 2).unwrap().is_laurent());
}

#[test]
fn bar_examples() {
    assert_eq!(p("q^2+3*q^-1").bar(), p("q^-2+3*q"));
    let x = p("1/(1-q)");
    let expected = p("-q/(1-q)");
    assert_eq!(x.bar(), expected);
    // cross-multiplication oracle: bar(x)·(1−q) = −q
    assert_eq!(&x.bar() * &p("1-q"), p("-q"));
    let y = p("(1+q)/(1-q^3)");
    assert_eq!(y.bar().bar(), y);
}

#[test]
fn value_at_zero_examples() {
    assert_eq!(p("(1+q)/(1-q)").value_at_zero().unwrap(), rr(1));
    assert_eq!(p("q/(q+q^3)").value_at_zero().unwrap(), rr(1));
    assert_eq!(p("q/(q+q^3)"), p("1/(1+q^2)"));
    assert!(matches!(p("1/q").value_at_zero(), Err(Error::NotRegularAtZero(_))));
}

#[test]
fn radical_examples() {
    let s2 = RadicalRational::radical(r(1, 1), 2);
    assert_eq!(s2.inv().unwrap(), RadicalRational::radical(r(1, 2), 2));
    let x = &rr(1) + &s2;
    assert_eq!(x.inv().unwrap(), &rr(-1) + &s2);
    let s3 = RadicalRational::radical(r(1, 1), 3);
    let s6 = &s2 * &s3;
    assert_eq!(s6, RadicalRational::radical(r(1, 1), 6));
    assert_eq!(s6.inv().unwrap(), RadicalRational::radical(r(1, 6), 6));
    assert_eq!(rr(0).inv(), None);
    // √(2/3) = √6/3
    assert_eq!(RadicalRational::sqrt_of(&r(2, 3)).unwrap(), RadicalRational::radical(r(1, 3), 6));
    assert_eq!(RadicalRational::sqrt_of(&r(8, 1)).unwrap(), RadicalRational::radical(r(2, 1), 2));
    assert_eq!(RadicalRational::sqrt_of(&r(1, 4)).unwrap(), RadicalRational::from_rational(r(1, 2)));
    // inverse in a three-prime tower
    let s5 = RadicalRational::radical(r(1, 1), 5);
    let y = &(&(&rr(2) + &s2) + &s3) + &(&s5 * &s6);
    assert_eq!(&y * &y.inv().unwrap(), rr(1));
}

#[test]
fn canonical_strings() {
    assert_eq!(p("q^2+3*q^-1").to_string(), "q^2+3*q^-1");
    assert_eq!(p("1/(1-q)").to_string(), "(1)/(-q+1)");
    assert_eq!(p("1/2*q").to_string(), "(q)/(2)");
    assert_eq!(p("-q^-2").to_string(), "-q^-2");
    assert_eq!(p("0").to_string(), "0");
    let s2 = Scalar::constant(RadicalRational::radical(r(1, 1), 2));
    let x = &(&s2 * &p("q")) + &p("1");
    assert_eq!(x.to_string(), "sqrt(2)*q+1");
    let y = &(&(&s2 + &p("1")) * &p("q^2")) + &p("1");
    assert_eq!(y.to_string(), "(1+sqrt(2))*q^2+1");
}

#[test]
fn parser_errors_carry_positions() {
    let e = parse_rational_function::<RadicalRational>("1+*q").unwrap_err();
    assert_eq!((e.line, e.column), (1, 3));
    let e = parse_rational_function::<RadicalRational>("(1+q").unwrap_err();
    assert_eq!(e.column, 5);
    let e = parse_rational_function::<RadicalRational>("1/(q-q)").unwrap_err();
    assert_eq!(e.message, "division by zero");
    let e = parse_rational_function::<RadicalRational>("q\n+x").unwrap_err();
    assert_eq!((e.line, e.column), (2, 2));
}

#[test]
fn series_expansions() {
    // 1/(1-q) = 1 + q + q^2 + ...
    let x = p("1/(1-q)");
    assert_eq!(x.series_at_zero(0, 3), vec![rr(1), rr(1), rr(1), rr(1)]);
    let y = p("1/(q^2-q^3)");
    assert_eq!(y.ord0(), Some(-2));
    assert_eq!(y.principal_part_at_zero(), vec![(-2, rr(1)), (-1, rr(1))]);
    assert_eq!(p("(q^3+1)/(1+q)").deg_inf(), Some(2));
    assert!(p("q/(1+q^2)").is_regular_at_infinity());
}

#[test]
fn q_binomial_pascal_degeneration() {
    // Σ_{r+s=m} (−1)^r q^{±r(1−m)} [m choose r] = 0 for m ≥ 1
    for m in 1..=6i64 {
        for sign in [1i64, -1] {
            let mut acc = Scalar::zero();
            for rr_ in 0..=m {
                let t = &Scalar::q_pow(sign * rr_ * (1 - m)) * &qbinom(m, rr_, 1).unwrap();
                acc = if rr_ % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            assert!(acc.is_zero(), "m={m} sign={sign}");
        }
    }
}

fn arb_laurent() -> impl Strategy<Value = Laurent> {
    (-3i64..3, prop::collection::vec(-4i64..5, 0..4))
        .prop_map(|(lo, cs)| Laurent::new(lo, cs.into_iter().map(RadicalRational::from_int).collect()))
}

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    (arb_laurent(), arb_laurent()).prop_map(|(n, d)| {
        if d.is_zero() {
            n.into()
        } else {
            Scalar::new(n, d).unwrap()
        }
    })
}

fn points() -> Vec<BigRational> {
    vec![r(2, 1), r(-3, 1), r(1, 5), r(7, 3)]
}

fn defined_at(x: &Scalar, t: &BigRational) -> bool {
    !x.den_poly().eval(&RadicalRational::from_rational(t.clone())).unwrap().is_zero()
}

proptest! {
    #[test]
    fn bar_is_a_multiplicative_involution(x in arb_scalar(), y in arb_scalar()) {
        prop_assert_eq!(x.bar().bar(), x.clone());
        prop_assert_eq!((&x * &y).bar(), &x.bar() * &y.bar());
        prop_assert_eq!((&x + &y).bar(), &x.bar() + &y.bar());
    }

    #[test]
    fn arithmetic_agrees_with_evaluation(x in arb_scalar(), y in arb_scalar()) {
        for t in points() {
            if !defined_at(&x, &t) || !defined_at(&y, &t) {
                continue;
            }
            prop_assert_eq!(eval(&(&x + &y), &t), eval(&x, &t) + eval(&y, &t));
            prop_assert_eq!(eval(&(&x * &y), &t), eval(&x, &t) * eval(&y, &t));
            prop_assert_eq!(eval(&x.bar(), &t.recip()), eval(&x, &t));
            if !y.is_zero() && !eval(&y, &t).is_zero() {
                let z = x.try_div(&y).unwrap();
                if defined_at(&z, &t) {
                    prop_assert_eq!(eval(&z, &t), eval(&x, &t) / eval(&y, &t));
                }
            }
        }
    }

    #[test]
    fn value_at_zero_is_a_homomorphism(x in arb_scalar(), y in arb_scalar()) {
        if x.is_regular_at_zero() && y.is_regular_at_zero() {
            let vx = x.value_at_zero().unwrap();
            let vy = y.value_at_zero().unwrap();
            prop_assert_eq!((&x * &y).value_at_zero().unwrap(), &vx * &vy);
            prop_assert_eq!((&x + &y).value_at_zero().unwrap(), &vx + &vy);
        }
    }

    #[test]
    fn canonical_string_round_trips(x in arb_scalar()) {
        let s = x.to_string();
        let back: Scalar = parse_rational_function(&s).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn squarefree_products(m in 1u64..200, n in 1u64..200) {
        prop_assume!(qbb::scalar::is_squarefree(m) && qbb::scalar::is_squarefree(n));
        let a = RadicalRational::radical(BigRational::one(), m);
        let b = RadicalRational::radical(BigRational::one(), n);
        let prod = &a * &b;
        for rad in prod.radicands() {
            prop_assert!(qbb::scalar::is_squarefree(rad));
        }
        // (√m√n)² = mn
        prop_assert_eq!(&prod * &prod, RadicalRational::from_int((m * n) as i64));
    }

    #[test]
    fn radical_inverse(a in -5i64..6, b in -5i64..6, c in -5i64..6) {
        let x = &(&RadicalRational::from_int(a) + &RadicalRational::radical(r(b, 1), 2))
            + &RadicalRational::radical(r(c, 1), 15);
        if let Some(inv) = x.inv() {
            prop_assert_eq!(&x * &inv, RadicalRational::from_int(1));
        } else {
            prop_assert!(x.is_zero());
        }
    }

    #[test]
    fn sum_of_products_matches_repeated_arithmetic(terms in prop::collection::vec(prop::collection::vec(arb_scalar(), 0..4), 0..5)) {
        let naive = terms.iter().fold(Scalar::zero(), |acc, t| &acc + &t.iter().fold(Scalar::one(), |p, x| &p * x));
        prop_assert_eq!(Scalar::sum_of_products(terms.iter().map(|t| t.iter())), naive);
    }

    #[test]
    fn reduction_cancels_common_factors(n in arb_laurent(), d in arb_laurent(), g in arb_laurent(), rad in any::<bool>()) {
        prop_assume!(!d.is_zero() && !g.is_zero());
        // a radical factor sends the gcd through the field path, rational ones through the integer path
        let g = if rad { &g + &Laurent::constant(RadicalRational::radical(r(1, 1), 3)) } else { g };
        prop_assume!(!g.is_zero());
        let x = Scalar::new(n.clone(), d.clone()).unwrap();
        let y = Scalar::new(&n * &g, &d * &g).unwrap();
        prop_assert_eq!(&y, &x);
        prop_assert_eq!(y.to_canonical_string(), x.to_canonical_string());
    }

    #[test]
    fn fraction_free_determinant_matches_elimination(entries in prop::collection::vec(arb_scalar(), 9), n in 0usize..4) {
        let rows: Vec<Vec<Scalar>> = (0..n).map(|i| entries[i * 3..i * 3 + n].to_vec()).collect();
        let m = Matrix::from_rows(rows);
        prop_assert_eq!(m.det_fraction_free(), m.det());
    }
}
