use std::sync::Arc;

use num_traits::{One, Zero};
use proptest::prelude::*;

use qbb::ambient::{Ambient, WeightVector};
use qbb::crystal::{Crystal, LatticeBasis};
use qbb::global_basis::{balanced_check, laurent_basis, laurent_hermite, saturate, AForm, GlobalBasis};
use qbb::scalar::{parse_rational_function, rat};
use qbb::uminus::UMinus;
use qbb::{BorcherdsCartanDatum, Coeff, Matrix, RootVector, Scalar};

fn p(s: &str) -> Scalar {
    parse_rational_function(s).unwrap()
}

fn u_of(a: Vec<Vec<i64>>, h: u32) -> Arc<UMinus> {
    let n = a.len();
    let names = (0..n).map(|k| ["i", "j"][k].to_string()).collect();
    Arc::new(UMinus::with_datum(BorcherdsCartanDatum::new(names, a, vec![1; n]).unwrap(), h))
}

fn r1(a: u32) -> RootVector {
    RootVector(vec![a])
}

fn sqrt2() -> Scalar {
    Scalar::constant(Coeff::radical(rat(1, 1), 2))
}

fn wv(a: RootVector, cs: &[&str]) -> WeightVector {
    WeightVector::new(a, cs.iter().map(|s| p(s)).collect())
}

/// Whether two bases span the same `𝔸`-lattice.
fn same_a_lattice(a: &RootVector, x: &[WeightVector], y: &[WeightVector]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    if x.is_empty() {
        return true;
    }
    let dim = x[0].dim();
    let bx = LatticeBasis::new(a.clone(), dim, x.iter().map(|v| v.coords.clone()).collect()).unwrap();
    let cols: Vec<Vec<Scalar>> = y.iter().map(|v| bx.coordinates(v).unwrap()).collect();
    if cols.iter().flatten().any(|c| !c.is_laurent()) {
        return false;
    }
    let det = Matrix::from_columns(x.len(), &cols).det();
    det.is_laurent() && det.num().is_monomial()
}

#[test]
fn balanced_examples() {
    let a = r1(1);
    let b = wv(a.clone(), &["1"]);
    let ok = balanced_check(&a, 1, &[b.clone()], &[b.clone()], &[b.clone()]).unwrap();
    assert!(ok.certified);
    assert_eq!(ok.e_basis.len(), 1);
    // E = 𝐅·b: the basis vector is a constant multiple of b
    assert!(ok.e_basis[0].coords[0].num().is_constant() && ok.e_basis[0].coords[0].is_laurent());

    // q is a unit of 𝔸, so 𝔸·qb = 𝔸·b
    let qb = b.scale(&p("q"));
    assert!(balanced_check(&a, 1, &[qb], &[b.clone()], &[b.clone()]).unwrap().certified);

    // 𝔸·(1+q)b meets L₀ ∩ L_∞ only in 0
    let bad = b.scale(&p("1+q"));
    let out = balanced_check(&a, 1, &[bad.clone()], &[b.clone()], &[b.clone()]).unwrap();
    assert!(!out.certified);
    assert_eq!(out.dim_e, 0);
    assert_eq!(out.witness.unwrap().vector, Some(bad));

    // rank 0
    assert!(balanced_check(&a, 1, &[], &[], &[]).unwrap().certified);
    assert!(balanced_check(&a, 1, &[b.clone()], &[], &[]).is_err());
}

#[test]
fn balanced_rank_two() {
    let a = r1(2);
    let e1 = wv(a.clone(), &["1", "0"]);
    let e2 = wv(a.clone(), &["0", "1"]);
    // M = 𝔸(e1 + q e2) + 𝔸 e2 = 𝔸e1 + 𝔸e2
    let m = [wv(a.clone(), &["1", "q"]), e2.clone()];
    let out = balanced_check(&a, 2, &m, &[e1.clone(), e2.clone()], &[e1.clone(), e2.clone()]).unwrap();
    assert!(out.certified);
    assert_eq!(out.dim_e, 2);
    // L_∞ skewed by q⁻¹: L₀ ∩ L_∞ is spanned by e1 only
    let skew = [e1.clone(), e2.scale(&p("q^-1"))];
    let out = balanced_check(&a, 2, &[e1.clone(), e2.clone()], &[e1, e2], &skew).unwrap();
    assert!(!out.certified);
}

#[test]
fn hermite_and_saturation() {
    // 𝔸-span of (1+q, 0), (1, 1), (0, 1−q²) = 𝔸(1,1) + 𝔸(0, 1+q) ... rank 2
    let gens = vec![vec![p("1+q"), Scalar::zero()], vec![Scalar::one(), Scalar::one()], vec![Scalar::zero(), p("1-q^2")]];
    let h = laurent_hermite(2, &gens).unwrap();
    assert_eq!(h.len(), 2);
    let a = r1(2);
    let hb: Vec<WeightVector> = h.iter().map(|c| WeightVector::new(a.clone(), c.clone())).collect();
    let expected = [wv(a.clone(), &["1", "1"]), wv(a.clone(), &["0", "1+q"])];
    assert!(same_a_lattice(&a, &hb, &expected));
    // denominators survive the round trip
    let h = laurent_hermite(1, &[vec![p("1/(1-q)")], vec![p("q/(1-q)")]]).unwrap();
    assert_eq!(h.len(), 1);
    assert!(h[0][0].try_div(&p("1/(1-q)")).unwrap().num().is_monomial());
    // 𝔸₀² ∩ span{(q, q²)} = 𝔸₀(1, q)
    let s = saturate(vec![vec![p("q"), p("q^2")]]);
    assert_eq!(s, vec![vec![Scalar::one(), p("q")]]);
}

#[test]
fn aform_examples() {
    let re = u_of(vec![vec![2]], 4);
    let af = AForm::new(re.clone());
    for n in 1..=4u32 {
        let basis = af.basis(&r1(n)).unwrap();
        let dp = re.b_label(0, &vec![1; n as usize]).unwrap();
        assert!(same_a_lattice(&r1(n), &basis, &[(*dp).clone()]), "n = {n}");
    }
    let iso = u_of(vec![vec![0]], 4);
    let af = AForm::new(iso.clone());
    let b1 = iso.b(0, 1).unwrap();
    let expected = [iso.mul(&b1, &b1).unwrap(), iso.b(0, 2).unwrap()];
    assert!(same_a_lattice(&r1(2), &af.basis(&r1(2)).unwrap(), &expected));
    let mix = u_of(vec![vec![2, -1], vec![-1, 0]], 4);
    let af = AForm::new(mix.clone());
    let a = RootVector(vec![1, 1]);
    let (f, b) = (mix.b_label(0, &[1]).unwrap(), mix.b(1, 1).unwrap());
    let expected = [mix.mul(&f, &b).unwrap(), mix.mul(&b, &f).unwrap()];
    assert!(same_a_lattice(&a, &af.basis(&a).unwrap(), &expected));
}

#[test]
fn global_basis_examples() {
    let re = u_of(vec![vec![2]], 4);
    let af = AForm::new(re.clone());
    let c = Arc::new(Crystal::build(re.clone(), 4).unwrap());
    let gb = GlobalBasis::build(c.clone(), 4, |a| Ok(af.basis(a)?.to_vec())).unwrap();
    for n in 0..=4u32 {
        let ids = c.at(&r1(n));
        assert_eq!(ids.len(), 1);
        let e = gb.entry(ids[0]).unwrap();
        assert!(e.certified());
        assert_eq!(e.g, *re.b_label(0, &vec![1; n as usize]).unwrap());
    }
    let iso = u_of(vec![vec![0]], 4);
    let af = AForm::new(iso.clone());
    let c = Arc::new(Crystal::build(iso.clone(), 4).unwrap());
    let gb = GlobalBasis::build(c.clone(), 4, |a| Ok(af.basis(a)?.to_vec())).unwrap();
    assert_eq!(gb.g(c.at(&r1(1))[0]).unwrap(), &iso.b(0, 1).unwrap());
    let f2 = c.vertices().iter().find(|v| v.word == vec![(0, 2)]).unwrap();
    assert_eq!(gb.g(f2.id).unwrap(), &iso.b(0, 2).unwrap().scale(&sqrt2()));
    for w in gb.weights() {
        assert!(w.balanced.certified && w.unimodular);
        assert!(w.entries.iter().all(|e| e.certified()));
    }
    assert_eq!(gb.g(0).unwrap(), &iso.one());
    assert!(iso.dim(&r1(3)).unwrap() == gb.at(&r1(3)).unwrap().entries.len());
}

fn arb_entry() -> impl Strategy<Value = Scalar> {
    prop_oneof![
        3 => (-1i64..2, prop::collection::vec(-2i64..3, 0..3)).prop_map(|(lo, cs)| {
            qbb::Laurent::new(lo, cs.into_iter().map(Coeff::from_int).collect()).into()
        }),
        1 => prop::sample::select(vec!["1/(1-q)", "q/(1+q)", "1/(1-q^2)"]).prop_map(p),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laurent_basis_spans_the_same_lattice_as_hermite(gens in prop::collection::vec(prop::collection::vec(arb_entry(), 2), 1..4)) {
        let a = r1(2);
        let fast = laurent_basis(2, &gens).unwrap();
        let slow = laurent_hermite(2, &gens).unwrap();
        let wrap = |vs: &[Vec<Scalar>]| vs.iter().map(|c| WeightVector::new(a.clone(), c.clone())).collect::<Vec<_>>();
        prop_assert!(same_a_lattice(&a, &wrap(&fast), &wrap(&slow)));
    }
}
