use std::sync::Arc;

use num_traits::{One, Zero};

use qbb::ambient::{decompose, e_tilde, f_tilde, Ambient, WeightVector};
use qbb::free_algebra::Letter;
use qbb::highest_weight::VModule;
use qbb::scalar::parse_rational_function;
use qbb::uminus::UMinus;
use qbb::{BorcherdsCartanDatum, DominantWeight, RootVector, Scalar};

fn p(s: &str) -> Scalar {
    parse_rational_function(s).unwrap()
}

fn u_of(a: Vec<Vec<i64>>, h: u32) -> Arc<UMinus> {
    let n = a.len();
    let names = (0..n).map(|k| ["i", "j"][k].to_string()).collect();
    Arc::new(UMinus::with_datum(BorcherdsCartanDatum::new(names, a, vec![1; n]).unwrap(), h))
}

fn v(u: &Arc<UMinus>, lam: &[u32]) -> VModule {
    VModule::new(u.clone(), DominantWeight(lam.to_vec())).unwrap()
}

fn r1(a: u32) -> RootVector {
    RootVector(vec![a])
}

#[test]
fn weight_space_examples() {
    let iso = u_of(vec![vec![0]], 4);
    for l in 1..=4 {
        assert_eq!(v(&iso, &[0]).dim(&r1(l)).unwrap(), 0);
    }
    assert_eq!(v(&iso, &[1]).dim(&r1(1)).unwrap(), 1);
    let re = u_of(vec![vec![2]], 4);
    assert_eq!(v(&re, &[1]).dim(&r1(1)).unwrap(), 1);
    assert_eq!(v(&re, &[1]).dim(&r1(2)).unwrap(), 0);
    assert_eq!(v(&re, &[3]).dim(&r1(3)).unwrap(), 1);
    assert_eq!(v(&re, &[3]).dim(&r1(4)).unwrap(), 0);
    // λ ≥ height: π_λ is injective
    let mix = u_of(vec![vec![2, -1], vec![-1, 0]], 4);
    let big = v(&mix, &[4, 4]);
    for h in 0..=4 {
        for a in mix.datum().roots_of_height(h) {
            assert_eq!(big.dim(&a).unwrap(), mix.dim(&a).unwrap(), "{a}");
        }
    }
}

#[test]
fn raising_examples() {
    let iso = u_of(vec![vec![0]], 4);
    let m = v(&iso, &[1]);
    let bv = m.project(&iso.b(0, 1).unwrap()).unwrap();
    assert_eq!(m.apply_raise(0, 1, &bv).unwrap(), m.highest().scale(&p("q-q^-1")));
    // real: A_i b_i v_λ − b_i A_i v_λ = [λ_i]_i v_λ; A_i v_λ = 0 since nothing sits above
    let re = u_of(vec![vec![2]], 4);
    for lam in 1..=3u32 {
        let m = v(&re, &[lam]);
        let fv = m.project(&re.letter(0, 1).unwrap()).unwrap();
        let a = m.big_a(0, 1, &r1(1)).unwrap();
        let got = WeightVector::apply(&a, &fv, r1(0));
        let n = qbb::scalar::qbinom::<qbb::Coeff>(lam as i64, 1, 1).unwrap();
        assert_eq!(got, m.highest().scale(&n));
    }
}

#[test]
fn contravariant_form_examples() {
    let iso = u_of(vec![vec![0]], 4);
    let m = v(&iso, &[1]);
    assert_eq!(m.form(&m.highest(), &m.highest()).unwrap(), Scalar::one());
    let bv = m.project(&iso.b(0, 1).unwrap()).unwrap();
    assert_eq!(m.form(&bv, &bv).unwrap(), p("1-q^2"));
    assert!(m.form(&bv, &m.highest()).unwrap().is_zero());
    let re = u_of(vec![vec![2]], 4);
    let m = v(&re, &[1]);
    let fv = m.project(&re.letter(0, 1).unwrap()).unwrap();
    assert_eq!(m.form(&fv, &fv).unwrap(), Scalar::one());
    // sl2 string: divided powers have norm ≡ 1 mod q
    let m = v(&re, &[3]);
    for n in 0..=3usize {
        let x = m.project(&re.b_label(0, &vec![1; n]).unwrap()).unwrap();
        assert_eq!(m.form(&x, &x).unwrap().value_at_zero().unwrap(), qbb::Coeff::from_int(1), "n = {n}");
    }
}

#[test]
fn projection_intertwines_letters() {
    let mix = u_of(vec![vec![2, -1], vec![-1, 0]], 4);
    let d = mix.datum().clone();
    for lam in [[0u32, 0], [1, 1], [1, 0], [0, 2]] {
        let m = v(&mix, &lam);
        for h in 0..=3 {
            for a in d.roots_of_height(h) {
                for u in mix.basis(&a).unwrap() {
                    for (i, l) in [(0usize, 1u32), (1, 1), (1, 2)] {
                        if h + l > 4 {
                            continue;
                        }
                        let x = mix.letter(i, l).unwrap();
                        let lhs = m.project(&mix.mul(&x, &u).unwrap()).unwrap();
                        let rhs = m.act(&x, &m.project(&u).unwrap()).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}

#[test]
fn kashiwara_on_v_examples() {
    let iso = u_of(vec![vec![0]], 4);
    let m = v(&iso, &[1]);
    let f = f_tilde(&m, 0, 1, &m.highest()).unwrap();
    assert_eq!(f, m.project(&iso.b(0, 1).unwrap()).unwrap());
    let m0 = v(&iso, &[0]);
    assert!(f_tilde(&m0, 0, 1, &m0.highest()).unwrap().is_zero());
    let im = u_of(vec![vec![-2]], 4);
    let m0 = v(&im, &[0]);
    assert!(f_tilde(&m0, 0, 2, &m0.highest()).unwrap().is_zero());
    let re = u_of(vec![vec![2]], 4);
    let m = v(&re, &[1]);
    let f1 = f_tilde(&m, 0, 1, &m.highest()).unwrap();
    assert_eq!(f1, m.project(&re.word(&[Letter::new(0, 1)]).unwrap()).unwrap());
    assert!(f_tilde(&m, 0, 1, &f1).unwrap().is_zero());
    assert_eq!(e_tilde(&m, 0, 1, &f1).unwrap().unwrap(), m.highest());
}

#[test]
fn decomposition_in_v_is_square_and_reconstructs() {
    let mix = u_of(vec![vec![2, -1], vec![-1, 0]], 4);
    let d = mix.datum().clone();
    for lam in [[0u32, 0], [1, 1], [5, 5], [2, 0], [0, 1]] {
        let m = v(&mix, &lam);
        for h in 0..=4 {
            for a in d.roots_of_height(h) {
                for x in m.basis(&a).unwrap() {
                    for i in 0..2 {
                        let parts = decompose(&m, i, &x).unwrap();
                        assert_eq!(qbb::ambient::compose(&m, i, &a, &parts).unwrap(), x);
                    }
                }
            }
        }
    }
}

#[test]
fn big_lambda_gram_is_symmetric() {
    let iso = u_of(vec![vec![0]], 4);
    let m = v(&iso, &[4]);
    for l in 1..=4u32 {
        let g = m.gram(&r1(l)).unwrap();
        assert_eq!(*g, g.transpose());
    }
}
