//! Exhaustive identity suites over every weight space up to a height bound.
//!
//! Each suite either passes, reporting how many exact comparisons it made, or
//! returns the first counterexample in a fixed order that does not depend on
//! the number of worker threads.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::{compose, decompose, e_tilde, f_tilde, levels_within, Ambient, WeightVector};
use crate::cartan::{BorcherdsCartanDatum, DominantWeight, RootVector};
use crate::combinat::{compositions, partitions};
use crate::crystal::{pi_bar, Crystal, PiBar};
use crate::error::{Error, Result};
use crate::free_algebra::{commutator_element, serre_element};
use crate::global_basis::{epsilon, ideal_triple, project_aform, AForm, GlobalBasis};
use crate::highest_weight::VModule;
use crate::linalg::{Echelon, Matrix};
use crate::memo::Memo;
use crate::scalar::{q_factorial, qbinom, Field};
use crate::uminus::UMinus;
use crate::{Coeff, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub weight: String,
    pub vector: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub height: u32,
    pub passed: bool,
    pub checks: u64,
    pub counterexample: Option<Counterexample>,
}

enum Failure {
    Counter(Counterexample),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

type Step = std::result::Result<(), Failure>;

#[derive(Default)]
struct Tally {
    checks: u64,
}

impl Tally {
    fn check(&mut self, ok: bool, ce: impl FnOnce() -> Counterexample) -> Step {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(Failure::Counter(ce()))
        }
    }

    /// Column-by-column equality of two operators.
    fn same(&mut self, weight: &str, what: &str, lhs: &Matrix<Scalar>, rhs: &Matrix<Scalar>) -> Step {
        if lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() {
            return Err(Failure::Error(Error::Internal(format!(
                "{what}: shapes {}x{} and {}x{}",
                lhs.rows(),
                lhs.cols(),
                rhs.rows(),
                rhs.cols()
            ))));
        }
        for c in 0..lhs.cols() {
            let (a, b) = (lhs.column(c), rhs.column(c));
            self.check(a == b, || ce(weight, format!("basis vector {c}"), format!("{what}: {} vs {}", show(&a), show(&b))))?;
        }
        Ok(())
    }
}

fn ce(weight: &str, vector: impl Into<String>, detail: impl Into<String>) -> Counterexample {
    Counterexample { weight: weight.to_string(), vector: vector.into(), detail: detail.into() }
}

fn show(v: &[Scalar]) -> String {
    format!("[{}]", v.iter().map(|x| x.to_canonical_string()).collect::<Vec<_>>().join(", "))
}

/// Runs `f` on every item in parallel and merges the tallies in item order,
/// stopping at the first failing item.
fn run_items<T: Sync>(t: &mut Tally, items: &[T], f: impl Fn(&mut Tally, &T) -> Step + Sync) -> Step {
    let results: Vec<(u64, Step)> = items
        .par_iter()
        .map(|x| {
            let mut local = Tally::default();
            let r = f(&mut local, x);
            (local.checks, r)
        })
        .collect();
    for (c, r) in results {
        t.checks += c;
        r?;
    }
    Ok(())
}

/// Shared state for one datum and height bound.
pub struct SuiteContext {
    pub u: Arc<UMinus>,
    pub height: u32,
    pub lambdas: Vec<DominantWeight>,
    modules: Memo<DominantWeight, VModule>,
    binf: Memo<(), Crystal<UMinus>>,
    blam: Memo<DominantWeight, Crystal<VModule>>,
    aform: AForm,
    gb_u: Memo<(), GlobalBasis<UMinus>>,
    gb_v: Memo<DominantWeight, GlobalBasis<VModule>>,
}

impl SuiteContext {
    /// Uses `λ ∈ {0, 1, 5}` (uniform) when `lambdas` is empty.
    pub fn new(u: Arc<UMinus>, height: u32, lambdas: Vec<DominantWeight>) -> Result<Self> {
        if height > u.max_height() {
            return Err(Error::HeightBound { height, bound: u.max_height() });
        }
        let rank = u.datum().rank();
        let lambdas = if lambdas.is_empty() { [0, 1, 5].iter().map(|&k| DominantWeight::uniform(rank, k)).collect() } else { lambdas };
        for l in &lambdas {
            if l.0.len() != rank {
                return Err(Error::InvalidArgument(format!("λ has {} entries for rank {rank}", l.0.len())));
            }
        }
        Ok(SuiteContext {
            aform: AForm::new(u.clone()),
            u,
            height,
            lambdas,
            modules: Memo::new(),
            binf: Memo::new(),
            blam: Memo::new(),
            gb_u: Memo::new(),
            gb_v: Memo::new(),
        })
    }

    pub fn datum(&self) -> &BorcherdsCartanDatum {
        self.u.datum()
    }

    /// All weights of height at most the bound.
    pub fn weights(&self) -> Vec<RootVector> {
        (0..=self.height).flat_map(|h| self.datum().roots_of_height(h)).collect()
    }

    pub fn module(&self, lam: &DominantWeight) -> Result<Arc<VModule>> {
        self.modules.get_or_try_insert(lam, || VModule::new(self.u.clone(), lam.clone()))
    }

    pub fn binf(&self) -> Result<Arc<Crystal<UMinus>>> {
        self.binf.get_or_try_insert(&(), || Crystal::build(self.u.clone(), self.height))
    }

    pub fn blam(&self, lam: &DominantWeight) -> Result<Arc<Crystal<VModule>>> {
        self.blam.get_or_try_insert(lam, || Crystal::build(self.module(lam)?, self.height))
    }

    pub fn aform(&self) -> &AForm {
        &self.aform
    }

    pub fn global_u(&self) -> Result<Arc<GlobalBasis<UMinus>>> {
        self.gb_u.get_or_try_insert(&(), || GlobalBasis::build(self.binf()?, self.height, |a| Ok(self.aform.basis(a)?.to_vec())))
    }

    pub fn global_v(&self, lam: &DominantWeight) -> Result<Arc<GlobalBasis<VModule>>> {
        self.gb_v.get_or_try_insert(lam, || {
            let v = self.module(lam)?;
            GlobalBasis::build(self.blam(lam)?, self.height, |a| project_aform(&v, a, &self.aform.basis(a)?))
        })
    }

    fn fmt(&self, a: &RootVector) -> String {
        self.datum().format_root(a)
    }

    fn lam_tag(&self, lam: &DominantWeight) -> String {
        format!("V({})", self.datum().format_lambda(lam))
    }
}

pub const SUITES: &[&str] = &[
    "delta-product",
    "boson-relations",
    "eprime-edoubleprime-commutation",
    "adjunction-L1",
    "star-isometry-L2",
    "divided-power-eprime",
    "projector-P",
    "serre",
    "commutator",
    "tau",
    "partition",
    "involutions",
    "decomposition",
    "kashiwara",
    "sl2-recovery",
    "qbrace-action",
    "form-comparison",
    "crystal-orthonormality",
    "crystal-adjunction",
    "grand-loop",
    "global-basis",
    "balanced-triples",
    "global-compatibility",
];

/// Canonical suite name; `divided-power-e'` is accepted as an alias.
pub fn canonical_name(name: &str) -> Option<&'static str> {
    let name = if name == "divided-power-e'" || name == "divided-power-e′" { "divided-power-eprime" } else { name };
    SUITES.iter().copied().find(|s| *s == name)
}

pub fn run_suite(name: &str, ctx: &SuiteContext) -> Result<SuiteReport> {
    let suite = canonical_name(name).ok_or_else(|| Error::InvalidArgument(format!("unknown suite '{name}'")))?;
    let mut t = Tally::default();
    let r = match suite {
        "delta-product" => delta_product(ctx, &mut t),
        "boson-relations" => boson_relations(ctx, &mut t),
        "eprime-edoubleprime-commutation" => eprime_edouble(ctx, &mut t),
        "adjunction-L1" => adjunction_l1(ctx, &mut t),
        "star-isometry-L2" => star_isometry(ctx, &mut t),
        "divided-power-eprime" => divided_power(ctx, &mut t),
        "projector-P" => projector(ctx, &mut t),
        "serre" => serre(ctx, &mut t),
        "commutator" => commutator(ctx, &mut t),
        "tau" => tau(ctx, &mut t),
        "partition" => partition(ctx, &mut t),
        "involutions" => involutions(ctx, &mut t),
        "decomposition" => decomposition(ctx, &mut t),
        "kashiwara" => kashiwara(ctx, &mut t),
        "sl2-recovery" => sl2_recovery(ctx, &mut t),
        "qbrace-action" => qbrace_action(ctx, &mut t),
        "form-comparison" => form_comparison(ctx, &mut t),
        "crystal-orthonormality" => orthonormality(ctx, &mut t),
        "crystal-adjunction" => crystal_adjunction(ctx, &mut t),
        "grand-loop" => grand_loop(ctx, &mut t),
        "global-basis" => global_basis(ctx, &mut t),
        "balanced-triples" => balanced_triples(ctx, &mut t),
        "global-compatibility" => global_compatibility(ctx, &mut t),
        _ => unreachable!("registered suite"),
    };
    let counterexample = match r {
        Ok(()) => None,
        Err(Failure::Counter(c)) => Some(c),
        Err(Failure::Error(e)) => Some(ce("", "", format!("error: {e}"))),
    };
    Ok(SuiteReport { suite: suite.to_string(), height: ctx.height, passed: counterexample.is_none(), checks: t.checks, counterexample })
}

/// Every registered suite, in registry order.
pub fn run_all(ctx: &SuiteContext) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, ctx)).collect()
}

// ---------------------------------------------------------------------------
// helpers

/// The generator label of `𝚋_{jk}`.
fn letter_label(d: &BorcherdsCartanDatum, j: usize, k: u32) -> Vec<u32> {
    if d.is_real(j) {
        vec![1]
    } else {
        vec![k]
    }
}

/// All `(j, k)` with `k ≤ top` (level 1 only for real `j`).
fn generators_up_to(d: &BorcherdsCartanDatum, top: u32) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for j in 0..d.rank() {
        let m = if d.is_real(j) { top.min(1) } else { top };
        out.extend((1..=m).map(|k| (j, k)));
    }
    out
}

fn qp(e: i64) -> Scalar {
    Scalar::q_pow(e)
}

/// `e′_i^n` from weight `a` (real `i`).
fn eprime_pow(u: &UMinus, i: usize, n: u32, a: &RootVector) -> Result<Matrix<Scalar>> {
    let mut acc = Matrix::identity(u.dim(a)?);
    let mut cur = a.clone();
    for _ in 0..n {
        acc = u.eprime(i, 1, &cur)?.mul(&acc);
        cur = cur.sub_simple(i, 1).expect("room for e′");
    }
    Ok(acc)
}

fn label_matrix<A: Ambient + ?Sized>(amb: &A, i: usize, c: &[u32], a: &RootVector) -> Result<Matrix<Scalar>> {
    if c.is_empty() {
        return Ok(Matrix::identity(amb.dim(a)?));
    }
    Ok((*amb.label_action(i, c, a)?).clone())
}

fn zeros_between<A: Ambient + ?Sized>(amb: &A, to: &RootVector, from: &RootVector) -> Result<Matrix<Scalar>> {
    Ok(Matrix::zeros(amb.dim(to)?, amb.dim(from)?))
}

// ---------------------------------------------------------------------------
// U⁻ suites

fn delta_product(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    let ws: Vec<RootVector> = ctx.weights().into_iter().filter(|a| !a.is_zero()).collect();
    let pairs: Vec<(RootVector, RootVector)> = ws
        .iter()
        .flat_map(|x| ws.iter().filter(move |y| x.height() + y.height() <= ctx.height).map(move |y| (x.clone(), y.clone())))
        .collect();
    // twisted Leibniz rules for e′ and δ on products of basis vectors
    run_items(t, &pairs, |t, (x, y)| {
        let xy = x.add(y);
        let w = ctx.fmt(&xy);
        for (kx, bx) in u.basis(x)?.iter().enumerate() {
            for (ky, by) in u.basis(y)?.iter().enumerate() {
                let p = u.mul(bx, by)?;
                let vec = format!("u{kx}@{} * u{ky}@{}", ctx.fmt(x), ctx.fmt(y));
                for (i, l) in levels_within(d, &xy) {
                    let lhs = u.apply_eprime(i, l, &p)?;
                    let mut rhs = u.zero_vector(&lhs.weight)?;
                    if x.0[i] >= l {
                        rhs = rhs.add(&u.mul(&u.apply_eprime(i, l, bx)?, by)?);
                    }
                    if y.0[i] >= l {
                        let tw = qp(-(l as i64) * d.pairing_simple(i, x));
                        rhs = rhs.add(&u.mul(bx, &u.apply_eprime(i, l, by)?)?.scale(&tw));
                    }
                    t.check(lhs == rhs, || ce(&w, vec.clone(), format!("e'({},{l}) Leibniz: {} vs {}", d.name(i), show(&lhs.coords), show(&rhs.coords))))?;
                    let lhs = u.apply_delta(i, l, &p)?;
                    let mut rhs = u.zero_vector(&lhs.weight)?;
                    if y.0[i] >= l {
                        rhs = rhs.add(&u.mul(bx, &u.apply_delta(i, l, by)?)?);
                    }
                    if x.0[i] >= l {
                        let tw = qp(-(l as i64) * d.pairing_simple(i, y));
                        rhs = rhs.add(&u.mul(&u.apply_delta(i, l, bx)?, by)?.scale(&tw));
                    }
                    t.check(lhs == rhs, || ce(&w, vec.clone(), format!("delta({},{l}) Leibniz: {} vs {}", d.name(i), show(&lhs.coords), show(&rhs.coords))))?;
                }
            }
        }
        Ok(())
    })?;
    // e′ on monomials b_{i,c}
    let mut items = Vec::new();
    for i in 0..d.rank() {
        for n in 1..=ctx.height {
            if d.is_real(i) {
                items.push((i, vec![1; n as usize]));
            } else {
                items.extend(compositions(n).into_iter().map(|c| (i, c)));
            }
        }
    }
    run_items(t, &items, |t, (i, c)| {
        let i = *i;
        let n: u32 = if d.is_real(i) { c.len() as u32 } else { c.iter().sum() };
        let a = d.simple(i, n);
        let w = ctx.fmt(&a);
        let x = u.b_label(i, c)?;
        let top = if d.is_real(i) { 1 } else { n };
        for l in 1..=top {
            let lhs = u.apply_eprime(i, l, &x)?;
            let rhs = if d.is_real(i) {
                u.b_label(i, &c[1..])?.scale(&qp(d.r(i) * (1 - n as i64)))
            } else {
                let mut acc = u.zero_vector(&lhs.weight)?;
                let mut before = 0i64;
                for (k, &part) in c.iter().enumerate() {
                    if part == l {
                        let mut rest = c.clone();
                        rest.remove(k);
                        let coef = qp(d.q_paren_exp(i) * (-2 * l as i64 * before));
                        acc = acc.add(&u.b_label(i, &rest)?.scale(&coef));
                    }
                    before += part as i64;
                }
                acc
            };
            t.check(lhs == rhs, || ce(&w, format!("b_({},{c:?})", d.name(i)), format!("e'({},{l}): {} vs {}", d.name(i), show(&lhs.coords), show(&rhs.coords))))?;
        }
        Ok(())
    })
}

fn boson_relations(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    run_items(t, &ctx.weights(), |t, a| {
        for (j, k) in generators_up_to(d, ctx.height - a.height()) {
            let up = a.add_simple(j, k);
            let lab = letter_label(d, j, k);
            let lj = label_matrix(u, j, &lab, a)?;
            for (i, l) in levels_within(d, &up) {
                let w = format!("{} via b({},{k})", ctx.fmt(a), d.name(j));
                let target = up.sub_simple(i, l).expect("level within weight");
                let kron = if (i, l) == (j, k) { Matrix::identity(u.dim(a)?) } else { zeros_between(u, &target, a)? };
                let c = d.r(i) * (k as i64) * (l as i64) * d.a(i, j);
                let tail = |op: &Matrix<Scalar>| -> Result<Matrix<Scalar>> {
                    if a.0[i] < l {
                        return zeros_between(u, &target, a);
                    }
                    let low = a.sub_simple(i, l).expect("a_i ≥ l");
                    Ok(label_matrix(u, j, &lab, &low)?.mul(op))
                };
                let lhs = u.eprime(i, l, &up)?.mul(&lj);
                let rhs = if a.0[i] >= l { kron.add(&tail(&*u.eprime(i, l, a)?)?.scale(&qp(-c))) } else { kron.clone() };
                t.same(&w, &format!("e'({},{l}) b - q^(-{c}) b e'", d.name(i)), &lhs, &rhs)?;
                let lhs = u.edouble(i, l, &up)?.mul(&lj);
                let rhs = if a.0[i] >= l { kron.add(&tail(&*u.edouble(i, l, a)?)?.scale(&qp(c))) } else { kron };
                t.same(&w, &format!("e''({},{l}) b - q^({c}) b e''", d.name(i)), &lhs, &rhs)?;
            }
        }
        Ok(())
    })
}

fn eprime_edouble(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    run_items(t, &ctx.weights(), |t, a| {
        let w = ctx.fmt(a);
        for (i, l) in levels_within(d, a) {
            let ai = a.sub_simple(i, l).expect("level within weight");
            for (j, k) in levels_within(d, &ai) {
                let aj = a.sub_simple(j, k).expect("room for both");
                let lhs = u.eprime(i, l, &aj)?.mul(&*u.edouble(j, k, a)?);
                let c = d.r(i) * (k as i64) * (l as i64) * d.a(i, j);
                let rhs = u.edouble(j, k, &ai)?.mul(&*u.eprime(i, l, a)?).scale(&qp(c));
                t.same(&w, &format!("e'({},{l}) e''({},{k})", d.name(i), d.name(j)), &lhs, &rhs)?;
            }
        }
        Ok(())
    })
}

fn adjunction_l1(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    run_items(t, &ctx.weights(), |t, beta| {
        let w = ctx.fmt(beta);
        for (i, l) in levels_within(d, beta) {
            let low = beta.sub_simple(i, l).expect("level within weight");
            let b = u.b(i, l)?;
            let rm = u.right_mul_matrix(&b, &low)?;
            let lhs = rm.transpose().mul(&*u.gram(beta)?);
            let shift = qp(-(l as i64) * d.pairing(&d.simple(i, 1), &low));
            let s = u.edouble(i, l, beta)?.scale(&shift);
            let rhs = u.gram(&low)?.mul(&s).scale(&u.tau(i, l)?);
            t.same(&w, &format!("(P b({},{l}), Q) = tau (P, e''Q)", d.name(i)), &lhs, &rhs)?;
        }
        Ok(())
    })
}

fn star_isometry(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    run_items(t, &ctx.weights(), |t, a| {
        let s = u.star_matrix(a)?;
        let g = u.gram(a)?;
        t.same(&ctx.fmt(a), "(P*, Q*) = (P, Q)", &s.transpose().mul(&g).mul(&s), &g)
    })
}

fn divided_power(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    run_items(t, &ctx.weights(), |t, a| {
        let w = ctx.fmt(a);
        for i in (0..d.rank()).filter(|&i| d.is_real(i)) {
            let ri = d.r(i);
            for m in 1..=ctx.height - a.height() {
                let up = a.add_simple(i, m);
                let lm = label_matrix(u, i, &vec![1; m as usize], a)?;
                for n in 1..=a.0[i] + m {
                    let lhs = eprime_pow(u, i, n, &up)?.mul(&lm);
                    let target = up.sub_simple(i, n).expect("n ≤ up_i");
                    let mut rhs = zeros_between(u, &target, a)?;
                    for k in 0..=n.min(m) {
                        if n - k > a.0[i] {
                            continue;
                        }
                        let (n_, m_, k_) = (n as i64, m as i64, k as i64);
                        let e = -2 * n_ * m_ + (m_ + n_) * k_ - k_ * (k_ - 1) / 2;
                        let coef = &qp(ri * e) * &qbinom::<Coeff>(n_, k_, ri)?;
                        let low = a.sub_simple(i, n - k).expect("checked");
                        let term = label_matrix(u, i, &vec![1; (m - k) as usize], &low)?.mul(&eprime_pow(u, i, n - k, a)?);
                        rhs = rhs.add(&term.scale(&coef));
                    }
                    t.same(&w, &format!("e'({})^{n} b^({m})", d.name(i)), &lhs, &rhs)?;
                }
            }
        }
        Ok(())
    })
}

/// `P = Σ_n (−1)ⁿ q_i^{−n(n−1)/2} 𝚋_i^{(n)} e′_iⁿ` on weight `a`.
fn projector_matrix(u: &UMinus, i: usize, a: &RootVector) -> Result<Matrix<Scalar>> {
    let d = u.datum();
    let mut acc = Matrix::zeros(u.dim(a)?, u.dim(a)?);
    for n in 0..=a.0[i] {
        let low = a.sub_simple(i, n).expect("n ≤ a_i");
        let n_ = n as i64;
        let sign = if n % 2 == 1 { -Scalar::one() } else { Scalar::one() };
        let coef = &sign * &qp(-d.r(i) * n_ * (n_ - 1) / 2);
        let term = label_matrix(u, i, &vec![1; n as usize], &low)?.mul(&eprime_pow(u, i, n, a)?);
        acc = acc.add(&term.scale(&coef));
    }
    Ok(acc)
}

fn projector(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    run_items(t, &ctx.weights(), |t, a| {
        let w = ctx.fmt(a);
        for i in (0..d.rank()).filter(|&i| d.is_real(i)) {
            let ri = d.r(i);
            let p = projector_matrix(u, i, a)?;
            let name = d.name(i);
            if a.0[i] >= 1 {
                let low = a.sub_simple(i, 1).expect("a_i ≥ 1");
                let lhs = p.mul(&label_matrix(u, i, &[1], &low)?);
                t.same(&w, &format!("P b_{name} = 0"), &lhs, &zeros_between(u, a, &low)?)?;
                let lhs = u.eprime(i, 1, a)?.mul(&p);
                t.same(&w, &format!("e'_{name} P = 0"), &lhs, &zeros_between(u, &low, a)?)?;
            }
            let mut sum = Matrix::zeros(u.dim(a)?, u.dim(a)?);
            for n in 0..=a.0[i] {
                let low = a.sub_simple(i, n).expect("n ≤ a_i");
                let n_ = n as i64;
                let term = label_matrix(u, i, &vec![1; n as usize], &low)?
                    .mul(&projector_matrix(u, i, &low)?)
                    .mul(&eprime_pow(u, i, n, a)?);
                sum = sum.add(&term.scale(&qp(ri * n_ * (n_ - 1) / 2)));
            }
            t.same(&w, &format!("sum q^(n(n-1)/2) b^(n) P e'^n = 1 ({name})"), &sum, &Matrix::identity(u.dim(a)?))?;
            for (kx, x) in u.basis(a)?.iter().enumerate() {
                let parts = decompose(u, i, x)?;
                for n in 0..=a.0[i] {
                    let low = a.sub_simple(i, n).expect("n ≤ a_i");
                    let lhs = WeightVector::apply(&projector_matrix(u, i, &low)?.mul(&eprime_pow(u, i, n, a)?), x, low.clone());
                    let un = parts.iter().find(|(c, _)| c.len() == n as usize).map(|(_, v)| v.clone());
                    let un = match un {
                        Some(v) => v,
                        None => u.zero_vector(&low)?,
                    };
                    let n_ = n as i64;
                    let rhs = un.scale(&qp(-ri * n_ * (n_ - 1) / 2));
                    t.check(lhs == rhs, || ce(&w, format!("basis vector {kx}"), format!("P e'_{name}^{n} u = q^(-n(n-1)/2) u_{n}: {} vs {}", show(&lhs.coords), show(&rhs.coords))))?;
                }
            }
        }
        Ok(())
    })
}

/// One higher-order Serre element: real `i`, any `j`, `m`, a composition `c`
/// of `n` (all ones for real `j`) and a sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SerreCase {
    pub i: usize,
    pub j: usize,
    pub m: u32,
    pub c: Vec<u32>,
    pub sign: i64,
}

/// Every Serre case with `m ≤ max_m` and `n ≤ max_n`; `n = 0` is listed once, with `j = i`.
pub fn serre_cases(d: &BorcherdsCartanDatum, max_m: u32, max_n: u32) -> Vec<SerreCase> {
    let mut out = Vec::new();
    for i in (0..d.rank()).filter(|&i| d.is_real(i)) {
        for j in 0..d.rank() {
            for n in 0..=max_n {
                if (n == 0) != (j == i) {
                    continue;
                }
                let cs = if n == 0 {
                    vec![Vec::new()]
                } else if d.is_real(j) {
                    vec![vec![1; n as usize]]
                } else {
                    compositions(n)
                };
                for c in cs {
                    for m in 1..=max_m {
                        if (m as i64) <= -d.a(i, j) * n as i64 {
                            continue;
                        }
                        for sign in [1, -1] {
                            out.push(SerreCase { i, j, m, c: c.clone(), sign });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Pairs `(i, k), (j, l)` with `a_ij = 0` and `k, l ≤ max_k` (level 1 for real
/// indices), each unordered pair once.
pub fn commutator_cases(d: &BorcherdsCartanDatum, max_k: u32) -> Vec<(usize, u32, usize, u32)> {
    let gens = generators_up_to(d, max_k);
    let mut out = Vec::new();
    for &(i, k) in &gens {
        for &(j, l) in &gens {
            if d.a(i, j) == 0 && (i, k) < (j, l) {
                out.push((i, k, j, l));
            }
        }
    }
    out
}

fn serre(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let form = ctx.u.form();
    run_items(t, &serre_cases(d, ctx.height, ctx.height / 2), |t, sc| {
        let x = serre_element(d, sc.i, sc.j, sc.m, &sc.c, sc.sign)?;
        let w = x.weight(d).map_or("0".to_string(), |a| ctx.fmt(&a));
        let ok = form.radical_contains(&x)?;
        t.check(ok, || ce(&w, format!("serre(i={}, j={}, m={}, c={:?}, sign={})", d.name(sc.i), d.name(sc.j), sc.m, sc.c, sc.sign), "not in the radical"))
    })
}

fn commutator(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let form = ctx.u.form();
    let top = ctx.height.saturating_sub(1).max(1);
    run_items(t, &commutator_cases(d, top), |t, &(i, k, j, l)| {
        let x = commutator_element(d, i, k, j, l)?;
        let w = x.weight(d).map_or("0".to_string(), |a| ctx.fmt(&a));
        let ok = form.radical_contains(&x)?;
        t.check(ok, || ce(&w, format!("[f({},{k}), f({},{l})]", d.name(i), d.name(j)), "not in the radical"))
    })
}

fn tau(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    for i in (0..d.rank()).filter(|&i| d.is_imaginary(i)) {
        for l in 1..=ctx.height {
            let v = ctx.u.tau(i, l)?.value_at_zero()?;
            let expected = if d.is_isotropic(i) { Coeff::from_rational(BigRational::new(1.into(), (l as i64).into())) } else { Coeff::from_int(1) };
            t.check(v == expected, || ce(&ctx.fmt(&d.simple(i, l)), format!("tau({},{l})", d.name(i)), format!("value at 0 is {v}, expected {expected}")))?;
        }
    }
    Ok(())
}

fn partition(ctx: &SuiteContext, t: &mut Tally) -> Step {
    for l in 1..=2 * ctx.height {
        let mut s = BigRational::zero();
        for p in partitions(l) {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for k in p {
                *counts.entry(k).or_default() += 1;
            }
            let mut den = BigRational::one();
            for (k, m) in counts {
                for f in 1..=m {
                    den *= BigRational::from_integer((k as i64).into()) * BigRational::from_integer((f as i64).into());
                }
            }
            s += den.recip();
        }
        t.check(s.is_one(), || ce("", format!("l = {l}"), format!("sum over partitions is {s}")))?;
    }
    Ok(())
}

fn involutions(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let u = &*ctx.u;
    let d = ctx.datum();
    for i in (0..d.rank()).filter(|&i| d.is_imaginary(i)) {
        for l in 1..=ctx.height {
            let p = u.primitive(i, l)?;
            let w = ctx.fmt(&d.simple(i, l));
            let v = format!("b({},{l})", d.name(i));
            t.check(p.free.bar() == p.free, || ce(&w, v.clone(), "expansion is not bar-invariant"))?;
            t.check(u.star(&p.element)? == p.element, || ce(&w, v.clone(), "not fixed by *"))?;
            t.check(u.bar(&p.element) == p.element, || ce(&w, v.clone(), "not fixed by bar"))?;
        }
    }
    run_items(t, &ctx.weights(), |t, a| {
        let s = u.star_matrix(a)?;
        t.same(&ctx.fmt(a), "** = 1", &s.mul(&s), &Matrix::identity(u.dim(a)?))
    })
}

// ---------------------------------------------------------------------------
// suites shared by U⁻ and V(λ)

fn decomposition_on<A: Ambient>(amb: &A, tag: &str, ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    run_items(t, &ctx.weights(), |t, a| {
        let w = format!("{tag} {}", ctx.fmt(a));
        for (kx, x) in amb.basis(a)?.iter().enumerate() {
            for i in 0..d.rank() {
                let parts = decompose(amb, i, x)?;
                let back = compose(amb, i, a, &parts)?;
                t.check(back == *x, || ce(&w, format!("basis vector {kx}"), format!("{}-decomposition does not reconstruct", d.name(i))))?;
                for (c, v) in &parts {
                    let top = if d.is_real(i) { v.weight.0[i].min(1) } else { v.weight.0[i] };
                    for l in 1..=top {
                        let r = WeightVector::apply(&*amb.raising(i, l, &v.weight)?, v, v.weight.sub_simple(i, l).expect("l ≤ weight"));
                        t.check(r.is_zero(), || ce(&w, format!("basis vector {kx}, component {c:?}"), format!("component not killed by raising ({},{l})", d.name(i))))?;
                    }
                }
            }
        }
        Ok(())
    })
}

fn decomposition(ctx: &SuiteContext, t: &mut Tally) -> Step {
    decomposition_on(&*ctx.u, "U-", ctx, t)?;
    for lam in &ctx.lambdas {
        decomposition_on(&*ctx.module(lam)?, &ctx.lam_tag(lam), ctx, t)?;
    }
    Ok(())
}

fn kashiwara_on<A: Ambient>(amb: &A, tag: &str, ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let ws: Vec<RootVector> = ctx.weights().into_iter().filter(|a| a.height() < ctx.height).collect();
    run_items(t, &ws, |t, a| {
        let w = format!("{tag} {}", ctx.fmt(a));
        let h = a.height();
        for (kx, x) in amb.basis(a)?.iter().enumerate() {
            let vname = format!("basis vector {kx}");
            for (i, l) in generators_up_to(d, ctx.height - h) {
                // ẽ f̃ x = x up to the summands f̃ sends to trivially zero terms
                let parts = decompose(amb, i, x)?;
                let kept: Vec<(Vec<u32>, WeightVector)> = parts
                    .into_iter()
                    .filter(|(c, v)| {
                        let mut c2 = c.clone();
                        c2.push(l);
                        !amb.omitted(i, &c2, &v.weight)
                    })
                    .collect();
                let expected = compose(amb, i, a, &kept)?;
                let f = f_tilde(amb, i, l, x)?;
                let back = e_tilde(amb, i, l, &f)?.expect("room after f̃");
                t.check(back == expected, || ce(&w, vname.clone(), format!("e~ f~ ({},{l}): {} vs {}", d.name(i), show(&back.coords), show(&expected.coords))))?;
                if !d.is_isotropic(i) {
                    continue;
                }
                for l2 in (1..=ctx.height - h).filter(|&m| m != l && m + l + h <= ctx.height) {
                    let ff = f_tilde(amb, i, l2, &f)?;
                    let ff2 = f_tilde(amb, i, l, &f_tilde(amb, i, l2, x)?)?;
                    t.check(ff == ff2, || ce(&w, vname.clone(), format!("f~({0},{l2}) f~({0},{l}) != f~({0},{l}) f~({0},{l2})", d.name(i))))?;
                }
                for l2 in (1..=a.0[i]).filter(|&m| m != l) {
                    let e = e_tilde(amb, i, l2, x)?.expect("l2 ≤ a_i");
                    let a1 = e_tilde(amb, i, l2, &f)?.expect("room");
                    let a2 = f_tilde(amb, i, l, &e)?;
                    t.check(a1 == a2, || ce(&w, vname.clone(), format!("e~({0},{l2}) f~({0},{l}) != f~({0},{l}) e~({0},{l2})", d.name(i))))?;
                }
            }
        }
        Ok(())
    })
}

fn kashiwara(ctx: &SuiteContext, t: &mut Tally) -> Step {
    kashiwara_on(&*ctx.u, "U-", ctx, t)?;
    for lam in &ctx.lambdas {
        kashiwara_on(&*ctx.module(lam)?, &ctx.lam_tag(lam), ctx, t)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// V(λ) suites

fn sl2_recovery(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    for lam in &ctx.lambdas {
        let v = ctx.module(lam)?;
        let tag = ctx.lam_tag(lam);
        run_items(t, &ctx.weights(), |t, a| {
            let n_dim = v.dim(a)?;
            if n_dim == 0 {
                return Ok(());
            }
            for i in (0..d.rank()).filter(|&i| d.is_real(i)) {
                let n = -v.coweight(i, a);
                if n < 1 {
                    continue;
                }
                let ri = d.r(i);
                let mut sum = Matrix::zeros(n_dim, n_dim);
                for k in n..=a.0[i] as i64 {
                    let mut ak = Matrix::identity(n_dim);
                    let mut cur = a.clone();
                    for _ in 0..k {
                        ak = v.big_a(i, 1, &cur)?.mul(&ak);
                        cur = cur.sub_simple(i, 1).expect("k ≤ a_i");
                    }
                    let fact: Scalar = q_factorial::<Coeff>(k as u32, ri).into();
                    let sign = if (k - n) % 2 == 1 { -Scalar::one() } else { Scalar::one() };
                    let coef = &(&sign * &qbinom::<Coeff>(k - 1, k - n, ri)?) * &fact.try_inv()?;
                    let term = label_matrix(&*v, i, &vec![1; k as usize], &cur)?.mul(&ak);
                    sum = sum.add(&term.scale(&coef));
                }
                t.same(&format!("{tag} {}", ctx.fmt(a)), &format!("sl2 recovery ({}, n = {n})", d.name(i)), &sum, &Matrix::identity(n_dim))?;
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// `{K_i q_i^n; m}` evaluated where `K_i` acts by `q_i^h`.
fn qbrace(h: i64, n: i64, m: i64, r: i64) -> Result<Scalar> {
    let mut acc = Scalar::one();
    for s in 1..=m {
        let e = h + n + 1 - s;
        let num = &qp(r * e) - &qp(-r * e);
        let den = &qp(r * s) - &qp(-r * s);
        acc = &acc * &num.try_div(&den)?;
    }
    Ok(acc)
}

fn qbrace_action(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    for lam in &ctx.lambdas {
        let v = ctx.module(lam)?;
        let tag = ctx.lam_tag(lam);
        run_items(t, &ctx.weights(), |t, a| {
            let dim = v.dim(a)?;
            if dim == 0 {
                return Ok(());
            }
            let w = format!("{tag} {}", ctx.fmt(a));
            for i in (0..d.rank()).filter(|&i| d.is_real(i)) {
                let h = v.coweight(i, a);
                for n in -2..=2 {
                    for m in 0..=3 {
                        let lhs = qbrace(h, n, m, d.r(i))?;
                        let rhs = qbinom::<Coeff>(h + n, m, d.r(i))?;
                        t.check(lhs == rhs, || ce(&w, format!("{{K q^{n}; {m}}} at {}", d.name(i)), format!("{lhs} vs {rhs}")))?;
                    }
                }
            }
            for (j, k) in generators_up_to(d, ctx.height - a.height()) {
                let up = a.add_simple(j, k);
                let lab = letter_label(d, j, k);
                let lj = label_matrix(&*v, j, &lab, a)?;
                for (i, l) in levels_within(d, &up) {
                    let target = up.sub_simple(i, l).expect("level within weight");
                    let mut lhs = v.raise(i, l, &up)?.mul(&lj);
                    if let Some(low) = a.sub_simple(i, l) {
                        lhs = lhs.sub(&label_matrix(&*v, j, &lab, &low)?.mul(&*v.raise(i, l, a)?));
                    }
                    let rhs = if (i, l) == (j, k) {
                        let e = d.r(i) * l as i64 * v.coweight(i, a);
                        Matrix::identity(dim).scale(&(&v.uminus().tau(i, l)? * &(&qp(e) - &qp(-e))))
                    } else {
                        zeros_between(&*v, &target, a)?
                    };
                    t.same(&w, &format!("[a({},{l}), b({},{k})]", d.name(i), d.name(j)), &lhs, &rhs)?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn form_comparison(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let lam = DominantWeight::uniform(ctx.datum().rank(), ctx.height);
    let v = ctx.module(&lam)?;
    let binf = ctx.binf()?;
    let tag = ctx.lam_tag(&lam);
    run_items(t, &ctx.weights(), |t, a| {
        let w = format!("{tag} {}", ctx.fmt(a));
        let lat = binf.lattice(a).ok_or_else(|| Error::HeightBound { height: a.height(), bound: ctx.height })?;
        let proj: Vec<WeightVector> = lat.vectors.iter().map(|p| v.project(p)).collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        for (x, (p, px)) in lat.vectors.iter().zip(&proj).enumerate() {
            for (y, (q, qy)) in lat.vectors.iter().zip(&proj).enumerate() {
                let f = v.form(px, qy)?;
                let g = ctx.u.pair(p, q)?;
                t.check(f.is_regular_at_zero() && g.is_regular_at_zero(), || ce(&w, format!("lattice pair ({x}, {y})"), format!("irregular at 0: {f}, {g}")))?;
                pairs.push(((x, y), f.value_at_zero()?, g.value_at_zero()?));
            }
        }
        let Some(c) = pairs.iter().find(|(_, _, g)| !g.is_zero()).map(|(_, f, g)| f.clone() * g.inv().expect("nonzero")) else {
            return Ok(());
        };
        t.check(!c.is_zero(), || ce(&w, "", "comparison constant vanishes"))?;
        for ((x, y), f, g) in &pairs {
            t.check(*f == c.clone() * g.clone(), || ce(&w, format!("lattice pair ({x}, {y})"), format!("{{Pv, Qv}}(0) = {f} but c (P, Q)(0) = {}", c.clone() * g.clone())))?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// crystal suites

fn orthonormality_on<A: Ambient>(c: &Crystal<A>, tag: &str, ctx: &SuiteContext, t: &mut Tally) -> Step {
    run_items(t, &ctx.weights(), |t, a| {
        let w = format!("{tag} {}", ctx.fmt(a));
        let n = c.at(a).len();
        let lat = c.lattice(a).ok_or_else(|| Error::HeightBound { height: a.height(), bound: c.depth() })?;
        t.check(n == lat.rank(), || ce(&w, "", format!("{n} vertices for lattice rank {}", lat.rank())))?;
        let dim = c.ambient().dim(a)?;
        t.check(lat.rank() == dim, || ce(&w, "", format!("lattice rank {} in dimension {dim}", lat.rank())))?;
        let g0 = c.q0_gram(a)?;
        t.check(g0 == Matrix::identity(n), || ce(&w, "", "q = 0 Gram of the vertices is not the identity"))?;
        let g = c.lattice_gram(a)?;
        let regular = (0..g.rows()).all(|r| g.row(r).iter().all(|x| x.is_regular_at_zero()));
        t.check(regular, || ce(&w, "", "lattice Gram has entries outside A0"))?;
        if n > 0 {
            // entries are regular at 0, so det(G)(0) = det(G(0))
            let rows = (0..n).map(|r| g.row(r).iter().map(|x| x.value_at_zero()).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
            let det = Matrix::from_rows(rows).det();
            t.check(!det.is_zero(), || ce(&w, "", "lattice Gram determinant is not a unit of A0"))?;
        }
        Ok(())
    })
}

fn orthonormality(ctx: &SuiteContext, t: &mut Tally) -> Step {
    orthonormality_on(&*ctx.binf()?, "B(inf)", ctx, t)?;
    for lam in &ctx.lambdas {
        orthonormality_on(&*ctx.blam(lam)?, &ctx.lam_tag(lam), ctx, t)?;
    }
    Ok(())
}

fn adjunction_on<A: Ambient>(c: &Crystal<A>, tag: &str, ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let amb = c.ambient();
    run_items(t, &ctx.weights(), |t, a| {
        let w = format!("{tag} {}", ctx.fmt(a));
        for &b in c.at(a) {
            let u = &c.vertex(b).rep;
            for (i, l) in levels_within(d, a) {
                let eu = e_tilde(&**amb, i, l, u)?.expect("level within weight");
                for &x in c.at(&eu.weight) {
                    let wv = &c.vertex(x).rep;
                    let lhs = amb.pair(&eu, wv)?.value_at_zero()?;
                    let rhs = amb.pair(u, &f_tilde(&**amb, i, l, wv)?)?.value_at_zero()?;
                    t.check(lhs == rhs, || ce(&w, format!("vertices {b}, {x}"), format!("(e~({},{l}) u, w)(0) = {lhs} but (u, f~ w)(0) = {rhs}", d.name(i))))?;
                }
            }
        }
        Ok(())
    })
}

fn crystal_adjunction(ctx: &SuiteContext, t: &mut Tally) -> Step {
    adjunction_on(&*ctx.binf()?, "B(inf)", ctx, t)?;
    for lam in &ctx.lambdas {
        adjunction_on(&*ctx.blam(lam)?, &ctx.lam_tag(lam), ctx, t)?;
    }
    Ok(())
}

fn grand_loop(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let binf = ctx.binf()?;
    let u = &*ctx.u;
    for lam in &ctx.lambdas {
        let blam = ctx.blam(lam)?;
        let v = ctx.module(lam)?;
        let tag = ctx.lam_tag(lam);
        run_items(t, &ctx.weights(), |t, a| {
            let w = format!("{tag} {}", ctx.fmt(a));
            let mut hit = BTreeSet::new();
            for &b in binf.at(a) {
                match pi_bar(&binf, &blam, b)? {
                    PiBar::Zero => {}
                    PiBar::Vertex(x) => {
                        t.check(hit.insert(x), || ce(&w, format!("vertex {b}"), format!("two vertices of B(inf) map to vertex {x}")))?;
                    }
                    PiBar::Stray(r) => {
                        t.check(false, || ce(&w, format!("vertex {b}"), format!("residue {r:?} is not a vertex of B(lambda)")))?;
                    }
                }
            }
            let all: BTreeSet<usize> = blam.at(a).iter().copied().collect();
            t.check(hit == all, || ce(&w, "", format!("image has {} of {} vertices", hit.len(), all.len())))?;
            for &b in binf.at(a) {
                let rep = &binf.vertex(b).rep;
                let prep = v.project(rep)?;
                let nonzero = !matches!(pi_bar(&binf, &blam, b)?, PiBar::Zero);
                for (i, l) in generators_up_to(d, ctx.height - a.height()) {
                    let up = a.add_simple(i, l);
                    let lat = blam.lattice(&up).expect("within depth");
                    let x1 = lat.residue(&v.project(&f_tilde(u, i, l, rep)?)?)?;
                    let x2 = lat.residue(&f_tilde(&*v, i, l, &prep)?)?;
                    t.check(x1 == x2, || ce(&w, format!("vertex {b}"), format!("pi f~({},{l}) != f~({},{l}) pi", d.name(i), d.name(i))))?;
                }
                if !nonzero {
                    continue;
                }
                for (i, l) in levels_within(d, a) {
                    let low = a.sub_simple(i, l).expect("level within weight");
                    let lat = blam.lattice(&low).expect("within depth");
                    let x1 = lat.residue(&v.project(&e_tilde(u, i, l, rep)?.expect("room"))?)?;
                    let x2 = lat.residue(&e_tilde(&*v, i, l, &prep)?.expect("room"))?;
                    t.check(x1 == x2, || ce(&w, format!("vertex {b}"), format!("pi e~({},{l}) != e~({},{l}) pi", d.name(i), d.name(i))))?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// global basis suites

fn check_global<A: Ambient>(gb: &GlobalBasis<A>, tag: &str, ctx: &SuiteContext, t: &mut Tally) -> Step {
    for wg in gb.weights() {
        let w = format!("{tag} {}", ctx.fmt(&wg.weight));
        let n = gb.crystal().at(&wg.weight).len();
        t.check(wg.entries.len() == n, || ce(&w, "", format!("{} lifts for {n} vertices", wg.entries.len())))?;
        for e in &wg.entries {
            let v = format!("G(vertex {})", e.vertex);
            t.check(e.bar_invariant, || ce(&w, v.clone(), "not bar-invariant"))?;
            t.check(e.in_aform, || ce(&w, v.clone(), "not in the A-form"))?;
            t.check(e.in_lattice, || ce(&w, v.clone(), "not in the crystal lattice"))?;
            t.check(e.residue_match, || ce(&w, v.clone(), "residue differs from the vertex"))?;
        }
        t.check(wg.unimodular, || ce(&w, "", "the lifts do not span the A-form"))?;
    }
    Ok(())
}

fn global_basis(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let gb = ctx.global_u()?;
    check_global(&gb, "U-", ctx, t)?;
    for i in (0..d.rank()).filter(|&i| d.is_real(i)) {
        for n in 1..=ctx.height {
            let a = d.simple(i, n);
            let w = ctx.fmt(&a);
            let ids = gb.crystal().at(&a);
            t.check(ids.len() == 1, || ce(&w, "", format!("{} vertices on the {} string", ids.len(), d.name(i))))?;
            let g = gb.g(ids[0]).expect("solved");
            let dp = ctx.u.b_label(i, &vec![1; n as usize])?;
            t.check(*g == *dp, || ce(&w, format!("G(f~_{}^{n} 1)", d.name(i)), "differs from the divided power"))?;
        }
    }
    for lam in &ctx.lambdas {
        check_global(&*ctx.global_v(lam)?, &ctx.lam_tag(lam), ctx, t)?;
    }
    Ok(())
}

fn balanced_on<A: Ambient>(
    c: &Crystal<A>,
    tag: &str,
    ctx: &SuiteContext,
    t: &mut Tally,
    aform: impl Fn(&RootVector) -> Result<Vec<WeightVector>> + Sync,
) -> Step {
    run_items(t, &ctx.weights(), |t, a| {
        let w = format!("{tag} {}", ctx.fmt(a));
        let lat = c.lattice(a).ok_or_else(|| Error::HeightBound { height: a.height(), bound: c.depth() })?;
        let m = aform(a)?;
        t.check(m.len() == lat.rank(), || ce(&w, "", format!("A-form rank {} vs lattice rank {}", m.len(), lat.rank())))?;
        let linf: Vec<WeightVector> = lat.vectors.iter().map(|v| v.bar()).collect();
        let bal = crate::global_basis::balanced_check(a, c.ambient().dim(a)?, &m, &lat.vectors, &linf)?;
        t.check(bal.certified, || {
            let wit = bal.witness.clone().expect("failure has a witness");
            ce(&w, wit.vector.map_or(String::new(), |v| show(&v.coords)), wit.reason)
        })
    })
}

fn balanced_triples(ctx: &SuiteContext, t: &mut Tally) -> Step {
    balanced_on(&*ctx.binf()?, "U-", ctx, t, |a| Ok(ctx.aform().basis(a)?.to_vec()))?;
    for lam in &ctx.lambdas {
        let v = ctx.module(lam)?;
        balanced_on(&*ctx.blam(lam)?, &ctx.lam_tag(lam), ctx, t, |a| project_aform(&v, a, &ctx.aform().basis(a)?))?;
    }
    Ok(())
}

/// Label of `𝚋_{il}ⁿ` (or `𝚋_i^{(n)}` for real `i`).
fn power_label(d: &BorcherdsCartanDatum, i: usize, l: u32, n: u32) -> Vec<u32> {
    if d.is_real(i) {
        vec![1; n as usize]
    } else {
        vec![l; n as usize]
    }
}

fn global_compatibility(ctx: &SuiteContext, t: &mut Tally) -> Step {
    let d = ctx.datum();
    let u = &*ctx.u;
    let gb = ctx.global_u()?;
    let binf = ctx.binf()?;
    let af = ctx.aform();
    // C(r) and the ideal triples, weight by weight
    run_items(t, &ctx.weights(), |t, a| {
        let w = ctx.fmt(a);
        let lat = binf.lattice(a).expect("within depth");
        let dim = u.dim(a)?;
        let eps: BTreeMap<(usize, usize, u32), u32> = binf
            .at(a)
            .iter()
            .flat_map(|&b| levels_within(d, a).into_iter().map(move |(i, l)| (b, i, l)))
            .map(|(b, i, l)| Ok(((b, i, l), epsilon(&binf, b, i, l)?)))
            .collect::<Result<_>>()?;
        for (i, l) in levels_within(d, a) {
            let top = if d.is_real(i) { a.0[i] } else { a.0[i] / l };
            for n in 1..=top {
                let low = a.sub_simple(i, n * l).expect("n l ≤ a_i");
                let span = u.label_action(i, &power_label(d, i, l, n), &low)?;
                let mut ech = Echelon::new(dim);
                for col in span.columns() {
                    ech.insert(col);
                }
                let members: Vec<usize> = binf.at(a).iter().copied().filter(|&b| eps[&(b, i, l)] >= n).collect();
                for &b in &members {
                    let g = gb.g(b).expect("solved");
                    t.check(ech.contains(&g.coords), || ce(&w, format!("G(vertex {b})"), format!("not in b({},{l})^{n} U-", d.name(i))))?;
                }
                let ideal = af.ideal(i, l, n, a)?;
                t.check(ideal.len() == members.len(), || ce(&w, "", format!("rank of (b({},{l})^{n} U)^A is {} but {} vertices lie in f~^{n} B", d.name(i), ideal.len(), members.len())))?;
                let bal = ideal_triple(lat, dim, &ideal)?;
                t.check(bal.certified, || ce(&w, format!("ideal b({},{l})^{n}", d.name(i)), bal.witness.clone().map_or(String::new(), |x| x.reason)))?;
                if n == 1 {
                    // G_{il}(b) from the ideal triple agrees with G(b)
                    let res: Vec<Vec<Coeff>> = bal.e_basis.iter().map(|e| lat.residue(e)).collect::<Result<_>>()?;
                    let rm = Matrix::from_columns(lat.rank(), &res);
                    for &b in &members {
                        let y = rm.solve(&binf.vertex(b).residue);
                        t.check(y.is_some(), || ce(&w, format!("vertex {b}"), format!("no lift through b({},{l}) U-", d.name(i))))?;
                        let mut g = u.zero_vector(a)?;
                        for (e, s) in bal.e_basis.iter().zip(y.expect("checked")) {
                            g = g.add(&e.scale(&Scalar::constant(s)));
                        }
                        t.check(g == *gb.g(b).expect("solved"), || ce(&w, format!("vertex {b}"), format!("G_({},{l})(b) differs from G(b)", d.name(i))))?;
                    }
                }
                for lam in &ctx.lambdas {
                    let v = ctx.module(lam)?;
                    let blam = ctx.blam(lam)?;
                    let vlat = blam.lattice(a).expect("within depth");
                    let vi = project_aform(&v, a, &ideal)?;
                    let mut count = 0;
                    for &x in blam.at(a) {
                        if epsilon(&blam, x, i, l)? >= n {
                            count += 1;
                        }
                    }
                    let tag = ctx.lam_tag(lam);
                    t.check(vi.len() == count, || ce(&w, tag.clone(), format!("rank of the image of b({},{l})^{n} is {} for {count} vertices", d.name(i), vi.len())))?;
                    let bal = ideal_triple(vlat, v.dim(a)?, &vi)?;
                    t.check(bal.certified, || ce(&w, tag.clone(), bal.witness.clone().map_or(String::new(), |x| x.reason)))?;
                }
            }
        }
        Ok(())
    })?;
    // G(b) v_λ = G_λ(π̄_λ b)
    for lam in &ctx.lambdas {
        let v = ctx.module(lam)?;
        let gv = ctx.global_v(lam)?;
        let blam = ctx.blam(lam)?;
        let tag = ctx.lam_tag(lam);
        run_items(t, &ctx.weights(), |t, a| {
            let w = format!("{tag} {}", ctx.fmt(a));
            for &b in binf.at(a) {
                let img = v.project(gb.g(b).expect("solved"))?;
                let expected = match pi_bar(&binf, &blam, b)? {
                    PiBar::Zero => v.zero_vector(a)?,
                    PiBar::Vertex(x) => gv.g(x).expect("solved").clone(),
                    PiBar::Stray(_) => return Err(Failure::Counter(ce(&w, format!("vertex {b}"), "stray residue"))),
                };
                t.check(img == expected, || ce(&w, format!("vertex {b}"), format!("G(b) v = {} but G_lambda = {}", show(&img.coords), show(&expected.coords))))?;
            }
            Ok(())
        })?;
    }
    // Kashiwara operators preserve the A-form
    let ws: Vec<RootVector> = ctx.weights();
    run_items(t, &ws, |t, a| {
        let w = ctx.fmt(a);
        let here = af.basis(a)?;
        for (k, x) in here.iter().enumerate() {
            for (i, l) in generators_up_to(d, ctx.height - a.height()) {
                let up = a.add_simple(i, l);
                let y = f_tilde(u, i, l, x)?;
                t.check(in_aform(af, &up, &y)?, || ce(&w, format!("A-basis vector {k}"), format!("f~({},{l}) leaves the A-form", d.name(i))))?;
            }
            for (i, l) in levels_within(d, a) {
                let low = a.sub_simple(i, l).expect("level within weight");
                let y = e_tilde(u, i, l, x)?.expect("room");
                t.check(in_aform(af, &low, &y)?, || ce(&w, format!("A-basis vector {k}"), format!("e~({},{l}) leaves the A-form", d.name(i))))?;
            }
        }
        Ok(())
    })
}

fn in_aform(af: &AForm, a: &RootVector, x: &WeightVector) -> Result<bool> {
    let basis = af.basis(a)?;
    if basis.is_empty() {
        return Ok(x.is_zero());
    }
    let lb = crate::crystal::LatticeBasis::new(a.clone(), x.dim(), basis.iter().map(|v| v.coords.clone()).collect())?;
    Ok(lb.coordinates(x)?.iter().all(|c| c.is_laurent()))
}
