use num_traits::{One, Zero};

use qbb::ambient::{decompose, e_tilde, f_tilde, levels_within, Ambient, WeightVector};
use qbb::combinat::{compositions, partitions};
use qbb::free_algebra::{coproduct, FreeElement, Letter, TensorElement};
use qbb::scalar::{parse_rational_function, rat};
use qbb::uminus::UMinus;
use qbb::{BorcherdsCartanDatum, Coeff, RootVector, Scalar};

fn p(s: &str) -> Scalar {
    parse_rational_function(s).unwrap()
}

fn iso() -> UMinus {
    UMinus::with_datum(BorcherdsCartanDatum::rank_one(0).unwrap(), 4)
}

fn im() -> UMinus {
    UMinus::with_datum(BorcherdsCartanDatum::rank_one(-2).unwrap(), 4)
}

fn real() -> UMinus {
    UMinus::with_datum(BorcherdsCartanDatum::rank_one(2).unwrap(), 5)
}

fn mix() -> UMinus {
    let d = BorcherdsCartanDatum::new(vec!["i".into(), "j".into()], vec![vec![2, -1], vec![-1, 0]], vec![1, 1]).unwrap();
    UMinus::with_datum(d, 4)
}

fn w(letters: &[(usize, u32)]) -> FreeElement {
    FreeElement::word(letters.iter().map(|&(i, l)| Letter::new(i, l)).collect())
}

fn el(u: &UMinus, x: &FreeElement) -> WeightVector {
    let a = x.weight(u.datum()).unwrap();
    u.element(x, &a).unwrap()
}

fn sqrt2() -> Scalar {
    Scalar::constant(Coeff::radical(rat(1, 1), 2))
}

#[test]
fn weight_space_dimensions() {
    assert_eq!(iso().dim(&RootVector(vec![2])).unwrap(), 2);
    assert_eq!(real().dim(&RootVector(vec![2])).unwrap(), 1);
    assert_eq!(mix().dim(&RootVector(vec![2, 1])).unwrap(), 2);
    // single-index weights: #𝒞_{i,l}
    for l in 1..=4u32 {
        assert_eq!(iso().dim(&RootVector(vec![l])).unwrap(), partitions(l).len());
        assert_eq!(im().dim(&RootVector(vec![l])).unwrap(), compositions(l).len());
        assert_eq!(real().dim(&RootVector(vec![l])).unwrap(), 1);
    }
    assert!(iso().dim(&RootVector(vec![5])).is_err());
}

#[test]
fn primitive_examples() {
    let u = iso();
    let b2 = u.primitive(0, 2).unwrap();
    assert_eq!(b2.free, &w(&[(0, 2)]) - &w(&[(0, 1), (0, 1)]).scale(&p("1/2")));
    assert_eq!(b2.tau, p("1/2"));
    let b1 = u.primitive(0, 1).unwrap();
    assert_eq!(b1.free, w(&[(0, 1)]));
    assert_eq!(b1.tau, Scalar::one());
    assert!(u.primitive(0, 0).is_err());
    assert!(real().primitive(0, 2).is_err());
}

#[test]
fn closed_form_matches_gram_schmidt() {
    let u = iso();
    for l in 1..=4 {
        assert_eq!(u.b(0, l).unwrap(), u.gram_schmidt(0, l).unwrap().0, "l = {l}");
    }
}

#[test]
fn primitive_orthogonality_and_bar() {
    for u in [iso(), im(), mix()] {
        let d = u.datum().clone();
        for i in (0..d.rank()).filter(|&i| d.is_imaginary(i)) {
            for l in 1..=4u32 {
                let b = u.primitive(i, l).unwrap();
                // (b_il, z) = 0 on lower words, and the expansion is bar-invariant
                for c in compositions(l).into_iter().filter(|c| c.len() > 1) {
                    let z = FreeElement::word(c.iter().map(|&k| Letter::new(i, k)).collect());
                    assert!(u.form().pair(&b.free, &z).is_zero());
                }
                assert_eq!(b.free.bar(), b.free);
                assert_eq!(b.free.coeff(&[Letter::new(i, l)]), Scalar::one());
                // primitive coproduct: ϱ(b) − b⊗1 − 1⊗b pairs to zero with every word pair
                let defect = coproduct(&d, &b.free)
                    .sub(&TensorElement::pure(&b.free, &FreeElement::one()))
                    .sub(&TensorElement::pure(&FreeElement::one(), &b.free));
                for k in 1..l {
                    for x in compositions(k) {
                        for y in compositions(l - k) {
                            let t = TensorElement::pure(
                                &FreeElement::word(x.iter().map(|&a| Letter::new(i, a)).collect()),
                                &FreeElement::word(y.iter().map(|&a| Letter::new(i, a)).collect()),
                            );
                            assert!(u.form().pair_tensor(&defect, &t).is_zero());
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn tau_congruences() {
    let u = iso();
    let v = im();
    for l in 1..=4u32 {
        assert_eq!(u.tau(0, l).unwrap().value_at_zero().unwrap(), Coeff::from_rational(rat(1, l as i64)));
        assert_eq!(v.tau(0, l).unwrap().value_at_zero().unwrap(), Coeff::from_rational(rat(1, 1)));
    }
}

#[test]
fn eprime_examples() {
    let u = iso();
    let f = el(&u, &w(&[(0, 1)]));
    assert_eq!(u.apply_eprime(0, 1, &el(&u, &w(&[(0, 1), (0, 1)]))).unwrap(), f.scale(&p("2")));
    let r = real();
    let f = el(&r, &w(&[(0, 1)]));
    assert_eq!(r.apply_eprime(0, 1, &el(&r, &w(&[(0, 1), (0, 1)]))).unwrap(), f.scale(&p("1+q^-2")));
    // e′_{i,l}(b_{jk}) = δ_ij δ_kl
    let m = mix();
    for (j, k) in [(0usize, 1u32), (1, 1), (1, 2), (1, 3)] {
        let b = m.b(j, k).unwrap();
        for (i, l) in levels_within(m.datum(), &b.weight) {
            let e = m.apply_eprime(i, l, &b).unwrap();
            let expected = if (i, l) == (j, k) { m.one() } else { m.zero_vector(&e.weight).unwrap() };
            assert_eq!(e, expected);
        }
    }
}

#[test]
fn star_and_bar_examples() {
    let m = mix();
    let x = el(&m, &w(&[(0, 1)]));
    assert_eq!(m.bar(&x.scale(&p("q"))), x.scale(&p("q^-1")));
    assert_eq!(m.star(&el(&m, &w(&[(0, 1), (1, 2)]))).unwrap(), el(&m, &w(&[(1, 2), (0, 1)])));
    let u = iso();
    let b = u.b(0, 2).unwrap();
    assert_eq!(u.star(&b).unwrap(), b);
}

#[test]
fn decomposition_examples() {
    let u = iso();
    let parts = decompose(&u, 0, &el(&u, &w(&[(0, 1), (0, 1)]))).unwrap();
    assert_eq!(parts, vec![(vec![1, 1], u.one())]);
    let parts = decompose(&u, 0, &el(&u, &w(&[(0, 2)]))).unwrap();
    assert_eq!(parts.len(), 2);
    assert!(parts.contains(&(vec![2], u.one())));
    assert!(parts.contains(&(vec![1, 1], u.one().scale(&p("1/2")))));
    let r = real();
    let f3 = r.b_label(0, &[1, 1, 1]).unwrap();
    assert_eq!(decompose(&r, 0, &f3).unwrap(), vec![(vec![1, 1, 1], r.one())]);
}

#[test]
fn decomposition_reconstructs_and_lands_in_kernel() {
    for u in [iso(), im(), mix()] {
        let d = u.datum().clone();
        for h in 0..=4 {
            for a in d.roots_of_height(h) {
                for i in 0..d.rank() {
                    for v in u.basis(&a).unwrap() {
                        let parts = decompose(&u, i, &v).unwrap();
                        let back = qbb::ambient::compose(&u, i, &a, &parts).unwrap();
                        assert_eq!(back, v);
                        for (_, c) in &parts {
                            for (j, l) in levels_within(&d, &c.weight) {
                                if j == i {
                                    assert!(u.apply_eprime(i, l, c).unwrap().is_zero());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn kashiwara_examples() {
    let u = iso();
    let one = u.one();
    let f2 = f_tilde(&u, 0, 2, &one).unwrap();
    assert_eq!(f2, u.b(0, 2).unwrap().scale(&sqrt2()));
    assert_eq!(e_tilde(&u, 0, 2, &f2).unwrap().unwrap(), one);
    let r = real();
    for n in 0..4usize {
        let x = r.b_label(0, &vec![1; n]).unwrap();
        assert_eq!(f_tilde(&r, 0, 1, &x).unwrap(), *r.b_label(0, &vec![1; n + 1]).unwrap());
    }
    assert_eq!(e_tilde(&r, 0, 1, &r.one()).unwrap(), None);
}

#[test]
fn kashiwara_inverse_and_commuting_family() {
    for u in [iso(), im(), mix()] {
        let d = u.datum().clone();
        for h in 0..=3 {
            for a in d.roots_of_height(h) {
                for v in u.basis(&a).unwrap() {
                    for i in 0..d.rank() {
                        let top = if d.is_real(i) { 1 } else { 4 - h };
                        for l in 1..=top {
                            let f = f_tilde(&u, i, l, &v).unwrap();
                            assert_eq!(e_tilde(&u, i, l, &f).unwrap().unwrap(), v);
                            if !d.is_isotropic(i) {
                                continue;
                            }
                            for l2 in (1..=top).filter(|&x| x != l && x + l + h <= 4) {
                                let ff = f_tilde(&u, i, l2, &f).unwrap();
                                let ff2 = f_tilde(&u, i, l, &f_tilde(&u, i, l2, &v).unwrap()).unwrap();
                                assert_eq!(ff, ff2);
                                if let Some(e) = e_tilde(&u, i, l2, &v).unwrap() {
                                    let a1 = e_tilde(&u, i, l2, &f).unwrap().unwrap();
                                    let a2 = f_tilde(&u, i, l, &e).unwrap();
                                    assert_eq!(a1, a2);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn primitives_under_nontrivial_nu() {
    use std::collections::BTreeMap;
    use std::sync::Arc;
    use qbb::free_algebra::Form;
    for a in [0, -2] {
        let d = Arc::new(BorcherdsCartanDatum::rank_one(a).unwrap());
        let nu = BTreeMap::from([((0, 2), p("1/(1-q)")), ((0, 3), p("1+q+2*q^2"))]);
        let u = UMinus::new(Arc::new(Form::with_nu(d, nu).unwrap()), 4);
        for l in 1..=4u32 {
            let b = u.primitive(0, l).unwrap();
            for c in compositions(l).into_iter().filter(|c| c.len() > 1) {
                let z = FreeElement::word(c.iter().map(|&k| Letter::new(0, k)).collect());
                assert!(u.form().pair(&b.free, &z).is_zero(), "a = {a}, l = {l}, c = {c:?}");
            }
        }
    }
}
