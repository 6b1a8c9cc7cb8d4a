//! The free algebra on the letters `f_il`, its coproduct and Lusztig's form.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};
use parking_lot::RwLock;
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::{BorcherdsCartanDatum, RootVector};
use crate::combinat::{bounded_splits, compositions};
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Matrix};
use crate::scalar::{q_factorial, Coefficient};
use crate::{Coeff, Scalar};

/// The generator `f_il`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub i: usize,
    pub l: u32,
}

impl Letter {
    pub fn new(i: usize, l: u32) -> Self {
        Letter { i, l }
    }
}

pub type Word = Vec<Letter>;

pub fn word_weight(datum: &BorcherdsCartanDatum, w: &[Letter]) -> RootVector {
    let mut v = vec![0u32; datum.rank()];
    for x in w {
        v[x.i] += x.l;
    }
    RootVector(v)
}

/// Letters that fit inside weight `α`.
pub fn letters_within(datum: &BorcherdsCartanDatum, alpha: &RootVector) -> Vec<Letter> {
    let mut out = Vec::new();
    for i in 0..datum.rank() {
        let top = if datum.is_real(i) { alpha.0[i].min(1) } else { alpha.0[i] };
        for l in 1..=top {
            out.push(Letter::new(i, l));
        }
    }
    out
}

/// All words of weight `α` in lexicographic order.
pub fn words_of_weight(datum: &BorcherdsCartanDatum, alpha: &RootVector) -> Vec<Word> {
    fn go(datum: &BorcherdsCartanDatum, left: &RootVector, cur: &mut Word, out: &mut Vec<Word>) {
        if left.is_zero() {
            out.push(cur.clone());
            return;
        }
        for x in letters_within(datum, left) {
            cur.push(x);
            go(datum, &left.sub_simple(x.i, x.l).unwrap(), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(datum, alpha, &mut Vec::new(), &mut out);
    out
}

/// A finite linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FreeElement {
    terms: BTreeMap<Word, Scalar>,
}

impl FreeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Scalar::one())
    }

    pub fn letter(i: usize, l: u32) -> Self {
        Self::word(vec![Letter::new(i, l)])
    }

    pub fn term(w: Word, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w, c);
        }
        FreeElement { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Word, Scalar)>) -> Self {
        let mut x = Self::zero();
        for (w, c) in it {
            x.add_term(w, c);
        }
        x
    }

    pub fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[Letter]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Weight of the first term; `None` for zero.
    pub fn weight(&self, datum: &BorcherdsCartanDatum) -> Option<RootVector> {
        self.terms.keys().next().map(|w| word_weight(datum, w))
    }

    pub fn is_homogeneous(&self, datum: &BorcherdsCartanDatum) -> bool {
        let mut it = self.terms.keys().map(|w| word_weight(datum, w));
        match it.next() {
            None => true,
            Some(a) => it.all(|b| b == a),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FreeElement { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    /// Reverses every word.
    pub fn star(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, c)| (w.iter().rev().copied().collect(), c.clone())))
    }

    /// Conjugates scalars and fixes words.
    pub fn bar(&self) -> Self {
        FreeElement { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.bar())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Coordinates over a word list; words outside the list are an error.
    pub fn coordinates(&self, basis: &[Word]) -> Result<Vec<Scalar>> {
        let index: HashMap<&Word, usize> = basis.iter().enumerate().map(|(k, w)| (w, k)).collect();
        let mut v = vec![Scalar::zero(); basis.len()];
        for (w, c) in &self.terms {
            let k = index.get(w).ok_or_else(|| Error::Internal("word outside the basis".into()))?;
            v[*k] = c.clone();
        }
        Ok(v)
    }
}

impl Add for &FreeElement {
    type Output = FreeElement;
    fn add(self, o: &FreeElement) -> FreeElement {
        let mut x = self.clone();
        for (w, c) in &o.terms {
            x.add_term(w.clone(), c.clone());
        }
        x
    }
}

impl Sub for &FreeElement {
    type Output = FreeElement;
    fn sub(self, o: &FreeElement) -> FreeElement {
        let mut x = self.clone();
        for (w, c) in &o.terms {
            x.add_term(w.clone(), -c);
        }
        x
    }
}

impl Neg for &FreeElement {
    type Output = FreeElement;
    fn neg(self) -> FreeElement {
        self.scale(&-Scalar::one())
    }
}

impl Mul for &FreeElement {
    type Output = FreeElement;
    fn mul(self, o: &FreeElement) -> FreeElement {
        let mut x = FreeElement::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                x.add_term(w, c * d);
            }
        }
        x
    }
}

/// An element of `ℱ ⊗ ℱ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorElement {
    terms: BTreeMap<(Word, Word), Scalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pure(a: &FreeElement, b: &FreeElement) -> Self {
        let mut t = Self::zero();
        for (x, c) in a.terms() {
            for (y, d) in b.terms() {
                t.add_term(x.clone(), y.clone(), c * d);
            }
        }
        t
    }

    pub fn add_term(&mut self, a: Word, b: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &TensorElement) -> TensorElement {
        let mut t = self.clone();
        for ((a, b), c) in &o.terms {
            t.add_term(a.clone(), b.clone(), c.clone());
        }
        t
    }

    pub fn sub(&self, o: &TensorElement) -> TensorElement {
        let mut t = self.clone();
        for ((a, b), c) in &o.terms {
            t.add_term(a.clone(), b.clone(), -c);
        }
        t
    }

    /// Twisted product `(x₁⊗x₂)(y₁⊗y₂) = q^{−(|x₂|,|y₁|)} x₁y₁⊗x₂y₂`.
    pub fn mul(&self, o: &TensorElement, datum: &BorcherdsCartanDatum) -> TensorElement {
        let mut t = TensorElement::zero();
        for ((x1, x2), c) in &self.terms {
            let w2 = word_weight(datum, x2);
            for ((y1, y2), d) in &o.terms {
                let e = datum.pairing(&w2, &word_weight(datum, y1));
                let mut a = x1.clone();
                a.extend_from_slice(y1);
                let mut b = x2.clone();
                b.extend_from_slice(y2);
                t.add_term(a, b, &(c * d) * &Scalar::q_pow(-e));
            }
        }
        t
    }

    /// Applies a linear map to the left or right factor.
    pub fn map_side(&self, right: bool, f: impl Fn(&Word) -> FreeElement) -> TensorElement {
        let mut t = TensorElement::zero();
        for ((a, b), c) in &self.terms {
            let img = f(if right { b } else { a });
            for (w, d) in img.terms() {
                let (x, y) = if right { (a.clone(), w.clone()) } else { (w.clone(), b.clone()) };
                t.add_term(x, y, c * d);
            }
        }
        t
    }
}

/// Lusztig's form for a datum and a `ν`-assignment, with a shared memo table.
pub struct Form {
    datum: Arc<BorcherdsCartanDatum>,
    nu: BTreeMap<(usize, u32), Scalar>,
    cache: RwLock<HashMap<(Word, Word), Scalar>>,
}

impl std::fmt::Debug for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Form").field("datum", &self.datum).field("nu", &self.nu).finish()
    }
}

impl Form {
    /// `ν ≡ 1`.
    pub fn new(datum: Arc<BorcherdsCartanDatum>) -> Self {
        Self::with_nu(datum, BTreeMap::new()).expect("default nu")
    }

    pub fn with_nu(datum: Arc<BorcherdsCartanDatum>, nu: BTreeMap<(usize, u32), Scalar>) -> Result<Self> {
        for ((i, l), v) in &nu {
            if *i >= datum.rank() || *l == 0 || (datum.is_real(*i) && *l != 1) {
                return Err(Error::InvalidArgument(format!("no letter f_({i},{l})")));
            }
            if v.is_zero() {
                return Err(Error::InvalidArgument("nu values must be nonzero".into()));
            }
        }
        Ok(Form { datum, nu, cache: RwLock::new(HashMap::new()) })
    }

    pub fn datum(&self) -> &BorcherdsCartanDatum {
        &self.datum
    }

    pub fn datum_arc(&self) -> &Arc<BorcherdsCartanDatum> {
        &self.datum
    }

    pub fn nu_overrides(&self) -> &BTreeMap<(usize, u32), Scalar> {
        &self.nu
    }

    pub fn nu(&self, i: usize, l: u32) -> Scalar {
        self.nu.get(&(i, l)).cloned().unwrap_or_else(Scalar::one)
    }

    /// Whether `ν_il` visibly lies in `1 + qZ≥0[[q]]`: checked on the first
    /// `terms` series coefficients only.
    pub fn nu_looks_regular(&self, terms: i64) -> Vec<(usize, u32, bool)> {
        self.nu
            .iter()
            .map(|(&(i, l), v)| {
                let ok = v.ord0().is_some_and(|o| o >= 0)
                    && v.series_at_zero(0, terms).iter().enumerate().all(|(k, c)| match c.to_rational() {
                        Some(r) => r.is_integer() && if k == 0 { r.is_one() } else { r >= num_traits::zero() },
                        None => false,
                    });
                (i, l, ok)
            })
            .collect()
    }

    /// `(x, y)_L` on words.
    pub fn pair_words(&self, x: &[Letter], y: &[Letter]) -> Scalar {
        if y.is_empty() {
            return if x.is_empty() { Scalar::one() } else { Scalar::zero() };
        }
        if x.len() == 1 && y.len() == 1 {
            return if x[0] == y[0] { self.nu(x[0].i, x[0].l) } else { Scalar::zero() };
        }
        let d = &*self.datum;
        if word_weight(d, x) != word_weight(d, y) {
            return Scalar::zero();
        }
        let key = if x <= y { (x.to_vec(), y.to_vec()) } else { (y.to_vec(), x.to_vec()) };
        if let Some(v) = self.cache.read().get(&key) {
            return v.clone();
        }
        let v = self.pair_words_uncached(x, y);
        self.cache.write().insert(key, v.clone());
        v
    }

    fn pair_words_uncached(&self, x: &[Letter], y: &[Letter]) -> Scalar {
        let d = &*self.datum;
        let Letter { i, l } = y[0];
        let rest = &y[1..];
        let caps: Vec<u32> = x.iter().map(|a| if a.i == i { a.l } else { 0 }).collect();
        let mut total = Scalar::zero();
        for m in bounded_splits(l, &caps) {
            let mut e: i64 = 0;
            let mut nu = Scalar::one();
            let mut right = Vec::with_capacity(x.len());
            let mut left_levels = Vec::new();
            for (k, a) in x.iter().enumerate() {
                let mk = m[k] as i64;
                let nk = a.l as i64 - mk;
                e -= d.q_paren_exp(a.i) * mk * nk;
                if nk > 0 {
                    right.push(Letter::new(a.i, nk as u32));
                    let later: i64 = m[k + 1..].iter().map(|&v| v as i64).sum();
                    e -= nk * later * d.sym(a.i, i);
                }
                if mk > 0 {
                    left_levels.push(mk);
                }
            }
            let mut partial = 0i64;
            for &ma in &left_levels {
                e -= d.q_paren_exp(i) * partial * ma;
                partial += ma;
                nu = &nu * &self.nu(i, ma as u32);
            }
            let sub = self.pair_words(&right, rest);
            if !sub.is_zero() {
                total = &total + &(&(&nu * &sub) * &Scalar::q_pow(e));
            }
        }
        total
    }

    pub fn pair(&self, x: &FreeElement, y: &FreeElement) -> Scalar {
        let mut s = Scalar::zero();
        for (a, c) in x.terms() {
            for (b, d) in y.terms() {
                let p = self.pair_words(a, b);
                if !p.is_zero() {
                    s = &s + &(&(c * d) * &p);
                }
            }
        }
        s
    }

    /// `(x₁⊗x₂, y₁⊗y₂) = (x₁,y₁)(x₂,y₂)`.
    pub fn pair_tensor(&self, x: &TensorElement, y: &TensorElement) -> Scalar {
        let mut s = Scalar::zero();
        for ((a, b), c) in x.terms() {
            for ((u, v), d) in y.terms() {
                let p = self.pair_words(a, u);
                if p.is_zero() {
                    continue;
                }
                let r = self.pair_words(b, v);
                if !r.is_zero() {
                    s = &s + &(&(&(c * d) * &p) * &r);
                }
            }
        }
        s
    }

    /// Gram matrix on the words of weight `α`.
    pub fn gram_matrix(&self, alpha: &RootVector) -> (Vec<Word>, Matrix<Scalar>) {
        let words = words_of_weight(&self.datum, alpha);
        let m = self.gram_on(&words);
        (words, m)
    }

    pub fn gram_on(&self, words: &[Word]) -> Matrix<Scalar> {
        let n = words.len();
        let rows: Vec<Vec<Scalar>> = (0..n)
            .into_par_iter()
            .map(|r| (0..n).map(|c| if c < r { Scalar::zero() } else { self.pair_words(&words[r], &words[c]) }).collect())
            .collect();
        let mut m = Matrix::from_rows(rows);
        for r in 0..n {
            for c in 0..r {
                let v = m.get(c, r).clone();
                m.set(r, c, v);
            }
        }
        m
    }

    /// True iff `x` pairs to zero with every word of its weight.
    pub fn radical_contains(&self, x: &FreeElement) -> Result<bool> {
        let d = &*self.datum;
        if !x.is_homogeneous(d) {
            return Err(Error::Precondition("radical membership needs a homogeneous element".into()));
        }
        let Some(alpha) = x.weight(d) else { return Ok(true) };
        let words = words_of_weight(d, &alpha);
        Ok(words.par_iter().all(|w| self.pair(x, &FreeElement::word(w.clone())).is_zero()))
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().len()
    }
}

/// `ϱ` on a single word.
pub fn coproduct_word(datum: &BorcherdsCartanDatum, w: &[Letter]) -> TensorElement {
    let caps: Vec<u32> = w.iter().map(|a| a.l).collect();
    let mut t = TensorElement::zero();
    let total: u32 = caps.iter().sum();
    for left in 0..=total {
        for m in bounded_splits(left, &caps) {
            let mut e = 0i64;
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for (k, x) in w.iter().enumerate() {
                let mk = m[k] as i64;
                let nk = x.l as i64 - mk;
                e -= datum.q_paren_exp(x.i) * mk * nk;
                if mk > 0 {
                    a.push(Letter::new(x.i, mk as u32));
                }
                if nk > 0 {
                    b.push(Letter::new(x.i, nk as u32));
                    for (k2, y) in w.iter().enumerate().skip(k + 1) {
                        e -= nk * m[k2] as i64 * datum.sym(x.i, y.i);
                    }
                }
            }
            t.add_term(a, b, Scalar::q_pow(e));
        }
    }
    t
}

pub fn coproduct(datum: &BorcherdsCartanDatum, x: &FreeElement) -> TensorElement {
    let mut t = TensorElement::zero();
    for (w, c) in x.terms() {
        for ((a, b), d) in coproduct_word(datum, w).terms() {
            t.add_term(a.clone(), b.clone(), c * d);
        }
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `ϱ_{i,l}`: the right tensor factor has weight `lα_i`.
    Left,
    /// `ϱ^{i,l}`: the left tensor factor has weight `lα_i`.
    Right,
}

/// Components of `ϱ(x)` in bidegree `(·, −lα_i)` (side `Left`) or
/// `(−lα_i, ·)` (side `Right`), keyed by the composition read off `f_{i,c}`.
pub fn extract(datum: &BorcherdsCartanDatum, side: Side, i: usize, l: u32, x: &FreeElement) -> BTreeMap<Vec<u32>, FreeElement> {
    let mut out: BTreeMap<Vec<u32>, FreeElement> = BTreeMap::new();
    for ((a, b), c) in coproduct(datum, x).terms() {
        let (fixed, other) = match side {
            Side::Left => (b, a),
            Side::Right => (a, b),
        };
        if fixed.iter().all(|y| y.i == i) && fixed.iter().map(|y| y.l).sum::<u32>() == l {
            let comp: Vec<u32> = fixed.iter().map(|y| y.l).collect();
            out.entry(comp).or_default().add_term(other.clone(), c.clone());
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `ϱ_i` and `ϱ^i` for real `i`.
pub fn extract_real(datum: &BorcherdsCartanDatum, side: Side, i: usize, x: &FreeElement) -> Result<FreeElement> {
    if !datum.is_real(i) {
        return Err(Error::Precondition(format!("index {} is not real", datum.name(i))));
    }
    Ok(extract(datum, side, i, 1, x).remove(&vec![1]).unwrap_or_default())
}

/// `f_i^{(n)} = f_i^n / [n]_i!`.
pub fn divided_power(datum: &BorcherdsCartanDatum, i: usize, n: u32) -> Result<FreeElement> {
    if !datum.is_real(i) {
        return Err(Error::Precondition(format!("divided powers need a real index, got {}", datum.name(i))));
    }
    let fact: Scalar = q_factorial::<Coeff>(n, datum.r(i)).into();
    Ok(FreeElement::word(vec![Letter::new(i, 1); n as usize]).scale(&fact.try_inv()?))
}

/// `f_{j,c}`, which is `f_j^n` for real `j`.
pub fn f_composition(datum: &BorcherdsCartanDatum, j: usize, c: &[u32]) -> FreeElement {
    if datum.is_real(j) {
        let n: u32 = c.iter().sum();
        FreeElement::word(vec![Letter::new(j, 1); n as usize])
    } else {
        FreeElement::word(c.iter().map(|&l| Letter::new(j, l)).collect())
    }
}

/// The higher-order Serre element `Σ_{r+s=m} (−1)^r q_i^{±r(−a_ij n−m+1)} f_i^{(r)} f_{j,c} f_i^{(s)}`.
pub fn serre_element(datum: &BorcherdsCartanDatum, i: usize, j: usize, m: u32, c: &[u32], sign: i64) -> Result<FreeElement> {
    let n: u32 = c.iter().sum();
    if !datum.is_real(i) {
        return Err(Error::Precondition(format!("Serre elements need a real index, got {}", datum.name(i))));
    }
    if i == j && n > 0 {
        return Err(Error::Precondition("Serre elements need i != j when n > 0".into()));
    }
    if c.contains(&0) {
        return Err(Error::Precondition("composition parts must be positive".into()));
    }
    if m == 0 || (m as i64) <= -datum.a(i, j) * n as i64 {
        return Err(Error::Precondition(format!("need m > -a_ij n, got m = {m}, n = {n}")));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument("sign must be +1 or -1".into()));
    }
    let mid = f_composition(datum, j, c);
    let twist = -datum.a(i, j) * n as i64 - m as i64 + 1;
    let mut out = FreeElement::zero();
    for r in 0..=m {
        let s = m - r;
        let coef = Scalar::q_pow(sign * r as i64 * twist * datum.r(i));
        let coef = if r % 2 == 1 { -coef } else { coef };
        let t = &(&divided_power(datum, i, r)? * &mid) * &divided_power(datum, i, s)?;
        out = &out + &t.scale(&coef);
    }
    Ok(out)
}

/// `X = f_ik f_jl − f_jl f_ik` for `a_ij = 0`.
pub fn commutator_element(datum: &BorcherdsCartanDatum, i: usize, k: u32, j: usize, l: u32) -> Result<FreeElement> {
    if datum.a(i, j) != 0 {
        return Err(Error::Precondition(format!("need a_ij = 0, got {}", datum.a(i, j))));
    }
    for (x, lv) in [(i, k), (j, l)] {
        if lv == 0 || (datum.is_real(x) && lv != 1) {
            return Err(Error::Precondition(format!("no letter f_({},{lv})", datum.name(x))));
        }
    }
    let a = FreeElement::letter(i, k);
    let b = FreeElement::letter(j, l);
    Ok(&(&a * &b) - &(&b * &a))
}

/// Outcome of comparing the radical with the ideal spanned by the standard relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadicalReport {
    pub weight: RootVector,
    pub words: usize,
    pub radical_dim: usize,
    pub relations_dim: usize,
    pub relations_in_radical: bool,
}

impl RadicalReport {
    pub fn spans(&self) -> bool {
        self.relations_in_radical && self.relations_dim == self.radical_dim
    }
}

/// The standard Serre and commutator relations of weight at most `α`.
pub fn standard_relations(datum: &BorcherdsCartanDatum, alpha: &RootVector) -> Vec<FreeElement> {
    let mut out = Vec::new();
    let n = datum.rank();
    for i in (0..n).filter(|&i| datum.is_real(i)) {
        for j in (0..n).filter(|&j| j != i) {
            let top = if datum.is_real(j) { 1 } else { alpha.0[j] };
            for l in 1..=top {
                let m = 1 - l as i64 * datum.a(i, j);
                if m as u32 > alpha.0[i] || l > alpha.0[j] {
                    continue;
                }
                let c = if datum.is_real(j) { vec![1] } else { vec![l] };
                out.push(serre_element(datum, i, j, m as u32, &c, 1).expect("valid Serre data"));
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            if datum.a(i, j) != 0 {
                continue;
            }
            let ti = if datum.is_real(i) { alpha.0[i].min(1) } else { alpha.0[i] };
            let tj = if datum.is_real(j) { alpha.0[j].min(1) } else { alpha.0[j] };
            for k in 1..=ti {
                for l in 1..=tj {
                    if i == j && (k >= l || k + l > alpha.0[i]) {
                        continue;
                    }
                    out.push(commutator_element(datum, i, k, j, l).expect("a_ij = 0"));
                }
            }
        }
    }
    out.retain(|x| !x.is_zero());
    out
}

/// Compares `ℛ_{−α}` with the two-sided ideal generated by the standard relations.
pub fn relations_span_radical(form: &Form, alpha: &RootVector) -> RadicalReport {
    let d = form.datum();
    let (words, gram) = form.gram_matrix(alpha);
    let radical_dim = words.len() - gram.rank();
    let mut ech = Echelon::new(words.len());
    for g in standard_relations(d, alpha) {
        let gw = g.weight(d).unwrap();
        let Some(rest) = alpha.checked_sub(&gw) else { continue };
        for h in 0..=rest.height() {
            for left in d.roots_of_height(h) {
                let Some(right) = rest.checked_sub(&left) else { continue };
                for u in words_of_weight(d, &left) {
                    for v in words_of_weight(d, &right) {
                        let x = &(&FreeElement::word(u.clone()) * &g) * &FreeElement::word(v);
                        ech.insert(x.coordinates(&words).expect("same weight"));
                    }
                }
            }
        }
    }
    let relations_dim = ech.rank();
    let kernel = gram.kernel();
    let mut rad = Echelon::new(words.len());
    for k in kernel {
        rad.insert(k);
    }
    let relations_in_radical = ech.basis().iter().all(|row| rad.contains(row));
    RadicalReport { weight: alpha.clone(), words: words.len(), radical_dim, relations_dim, relations_in_radical }
}

/// All compositions of `l` with the matching `f_{i,c}` words.
pub fn composition_words(i: usize, l: u32) -> Vec<(Vec<u32>, Word)> {
    compositions(l).into_iter().map(|c| {
        let w = c.iter().map(|&x| Letter::new(i, x)).collect();
        (c, w)
    }).collect()
}
