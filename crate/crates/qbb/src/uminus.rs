//! `U⁻ = ℱ/ℛ` realized weight by weight, with primitive generators and the
//! derivations `e′`, `δ`, `e″`.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::ambient::{Ambient, AmbientCache, WeightVector};
use crate::cartan::{BorcherdsCartanDatum, RootVector};
use crate::combinat::{multiplicity, partitions};
use crate::error::{Error, Result};
use crate::free_algebra::{words_of_weight, FreeElement, Form, Letter, Word};
use crate::linalg::{Echelon, Matrix};
use crate::memo::Memo;
use crate::scalar::q_factorial;
use crate::{Coeff, Scalar};

pub type UElement = WeightVector;

/// `U⁻_{−α}` as `ℱ_{−α}` modulo the kernel of the Gram matrix.
#[derive(Debug)]
pub struct WeightModel {
    pub weight: RootVector,
    pub words: Vec<Word>,
    index: HashMap<Word, usize>,
    /// Positions in `words` of the basis words.
    pub pivots: Vec<usize>,
    /// Gram matrix on the basis words.
    pub gram: Arc<Matrix<Scalar>>,
    pub gram_inverse: Matrix<Scalar>,
    /// Column `k` holds the coordinates of `words[k]`.
    expansion: Matrix<Scalar>,
}

impl WeightModel {
    fn build(form: &Form, alpha: &RootVector) -> Result<Self> {
        let words = words_of_weight(form.datum(), alpha);
        let full = form.gram_on(&words);
        let pivots = full.independent_rows();
        let gram = full.select_rows(&pivots).select_cols(&pivots);
        let gram_inverse = gram.inverse().ok_or_else(|| Error::Internal(format!("singular pivot Gram at {alpha}")))?;
        let expansion = gram_inverse.mul(&full.select_rows(&pivots));
        let index = words.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        Ok(WeightModel { weight: alpha.clone(), words, index, pivots, gram: Arc::new(gram), gram_inverse, expansion })
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_word(&self, k: usize) -> &Word {
        &self.words[self.pivots[k]]
    }

    pub fn pivot_words(&self) -> Vec<Word> {
        self.pivots.iter().map(|&p| self.words[p].clone()).collect()
    }

    pub fn word_coords(&self, w: &[Letter]) -> Option<Vec<Scalar>> {
        self.index.get(w).map(|&k| self.expansion.column(k))
    }

    fn add_word(&self, acc: &mut [Scalar], w: &[Letter], c: &Scalar) -> Result<()> {
        let k = *self.index.get(w).ok_or_else(|| Error::Internal(format!("word outside weight {}", self.weight)))?;
        for (r, a) in acc.iter_mut().enumerate() {
            let e = self.expansion.get(r, k);
            if !e.is_zero() {
                *a = &*a + &(c * e);
            }
        }
        Ok(())
    }

    /// Coordinates of the image of `x`.
    pub fn coords(&self, x: &FreeElement) -> Result<Vec<Scalar>> {
        let mut acc = vec![Scalar::zero(); self.dim()];
        for (w, c) in x.terms() {
            self.add_word(&mut acc, w, c)?;
        }
        Ok(acc)
    }
}

/// `b_{il}` with its expansion in `f`-words and `τ_{il} = (b_{il}, b_{il})_L`.
#[derive(Clone, Debug)]
pub struct Primitive {
    pub i: usize,
    pub l: u32,
    pub free: FreeElement,
    pub element: UElement,
    pub tau: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum OpKey {
    Left(usize, Vec<u32>, RootVector),
    EPrime(usize, u32, RootVector),
    Delta(usize, u32, RootVector),
    EDouble(usize, u32, RootVector),
    Star(RootVector),
}

/// The algebra `U⁻` for one datum and `ν`-assignment.
pub struct UMinus {
    form: Arc<Form>,
    max_height: u32,
    models: Memo<RootVector, WeightModel>,
    prims: Memo<(usize, u32), Primitive>,
    label_elements: Memo<(usize, Vec<u32>), UElement>,
    ops: Memo<OpKey, Matrix<Scalar>>,
    ambient: AmbientCache,
}

impl std::fmt::Debug for UMinus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UMinus").field("form", &self.form).field("max_height", &self.max_height).finish()
    }
}

impl UMinus {
    pub fn new(form: Arc<Form>, max_height: u32) -> Self {
        UMinus {
            form,
            max_height,
            models: Memo::new(),
            prims: Memo::new(),
            label_elements: Memo::new(),
            ops: Memo::new(),
            ambient: AmbientCache::default(),
        }
    }

    /// `ν ≡ 1`.
    pub fn with_datum(datum: BorcherdsCartanDatum, max_height: u32) -> Self {
        Self::new(Arc::new(Form::new(Arc::new(datum))), max_height)
    }

    pub fn form(&self) -> &Arc<Form> {
        &self.form
    }

    pub fn max_height(&self) -> u32 {
        self.max_height
    }

    pub fn model(&self, alpha: &RootVector) -> Result<Arc<WeightModel>> {
        if alpha.height() > self.max_height {
            return Err(Error::HeightBound { height: alpha.height(), bound: self.max_height });
        }
        self.models.get_or_try_insert(alpha, || WeightModel::build(&self.form, alpha))
    }

    /// Builds the models of all weights of height at most `h`, in parallel.
    pub fn prepare(&self, h: u32) -> Result<()> {
        let d = self.form.datum();
        let weights: Vec<RootVector> = (0..=h).flat_map(|k| d.roots_of_height(k)).collect();
        weights.par_iter().try_for_each(|a| self.model(a).map(|_| ()))
    }

    pub fn one(&self) -> UElement {
        self.highest()
    }

    /// Image of a homogeneous free element of weight `alpha`.
    pub fn element(&self, x: &FreeElement, alpha: &RootVector) -> Result<UElement> {
        let m = self.model(alpha)?;
        Ok(WeightVector::new(alpha.clone(), m.coords(x)?))
    }

    pub fn word(&self, w: &[Letter]) -> Result<UElement> {
        let alpha = crate::free_algebra::word_weight(self.datum(), w);
        self.element(&FreeElement::word(w.to_vec()), &alpha)
    }

    pub fn letter(&self, i: usize, l: u32) -> Result<UElement> {
        self.word(&[Letter::new(i, l)])
    }

    /// A representative in `ℱ` (combination of basis words).
    pub fn lift(&self, u: &UElement) -> Result<FreeElement> {
        let m = self.model(&u.weight)?;
        Ok(FreeElement::from_terms(
            u.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (m.pivot_word(k).clone(), c.clone())),
        ))
    }

    pub fn mul(&self, a: &UElement, b: &UElement) -> Result<UElement> {
        let ma = self.model(&a.weight)?;
        let mb = self.model(&b.weight)?;
        let w = a.weight.add(&b.weight);
        let mw = self.model(&w)?;
        let mut acc = vec![Scalar::zero(); mw.dim()];
        for (p, cp) in a.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
            for (r, cr) in b.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()) {
                let mut word = ma.pivot_word(p).clone();
                word.extend(mb.pivot_word(r).iter().copied());
                mw.add_word(&mut acc, &word, &(cp * cr))?;
            }
        }
        Ok(WeightVector::new(w, acc))
    }

    /// Matrix of `u ↦ xu` on weight `alpha`.
    pub fn left_mul_matrix(&self, x: &UElement, alpha: &RootVector) -> Result<Matrix<Scalar>> {
        let n = self.model(alpha)?.dim();
        let target = alpha.add(&x.weight);
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|k| self.mul(x, &WeightVector::unit(alpha.clone(), n, k)).map(|v| v.coords))
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(self.model(&target)?.dim(), &cols))
    }

    /// Matrix of `u ↦ ux` on weight `alpha`.
    pub fn right_mul_matrix(&self, x: &UElement, alpha: &RootVector) -> Result<Matrix<Scalar>> {
        let n = self.model(alpha)?.dim();
        let target = alpha.add(&x.weight);
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|k| self.mul(&WeightVector::unit(alpha.clone(), n, k), x).map(|v| v.coords))
            .collect::<Result<_>>()?;
        Ok(Matrix::from_columns(self.model(&target)?.dim(), &cols))
    }

    pub fn primitive(&self, i: usize, l: u32) -> Result<Arc<Primitive>> {
        let d = self.datum();
        if i >= d.rank() || l == 0 || (d.is_real(i) && l != 1) {
            return Err(Error::InvalidArgument(format!("no primitive generator ({i}, {l})")));
        }
        self.prims.get_or_try_insert(&(i, l), || {
            let alpha = d.simple(i, l);
            let free = if d.is_real(i) || l == 1 {
                FreeElement::letter(i, l)
            } else if d.is_isotropic(i) {
                self.isotropic_closed_form(i, l)?
            } else {
                self.gram_schmidt(i, l)?.1
            };
            let element = self.element(&free, &alpha)?;
            let tau = self.pair(&element, &element)?;
            Ok(Primitive { i, l, free, element, tau })
        })
    }

    /// `b_{il} = f_{il} − Σ_{λ ∈ 𝒫_l∖(l)} b_{i,λ}/∏_k λ_k!` for isotropic `i`.
    fn isotropic_closed_form(&self, i: usize, l: u32) -> Result<FreeElement> {
        let mut b = FreeElement::letter(i, l);
        for lam in partitions(l).into_iter().filter(|p| p.len() > 1) {
            let mut prod = FreeElement::one();
            for &part in &lam {
                prod = &prod * &self.primitive(i, part)?.free;
            }
            let mut denom = Scalar::one();
            for k in 1..=l {
                let m = multiplicity(&lam, k);
                for t in 1..=m {
                    denom = &denom * &Scalar::from_int(t as i64);
                }
            }
            b = &b - &prod.scale(&denom.try_inv()?);
        }
        Ok(b)
    }

    /// `f_{il}` minus its projection onto the span of the lower words, which
    /// characterizes `b_{il}` for every imaginary `i`.
    pub fn gram_schmidt(&self, i: usize, l: u32) -> Result<(UElement, FreeElement)> {
        let alpha = self.datum().simple(i, l);
        let m = self.model(&alpha)?;
        let top = vec![Letter::new(i, l)];
        let mut ech = Echelon::new(m.dim());
        let mut lower: Vec<(Word, Vec<Scalar>)> = Vec::new();
        for w in &m.words {
            if *w == top {
                continue;
            }
            let c = m.word_coords(w).expect("word of this weight");
            if ech.insert(c.clone()) {
                lower.push((w.clone(), c));
            }
        }
        let f = WeightVector::new(alpha.clone(), m.word_coords(&top).expect("letter"));
        let vecs: Vec<UElement> = lower.iter().map(|(_, c)| WeightVector::new(alpha.clone(), c.clone())).collect();
        let g = Matrix::from_rows(
            vecs.iter().map(|a| vecs.iter().map(|b| self.pair(a, b)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?,
        );
        let rhs: Vec<Scalar> = vecs.iter().map(|a| self.pair(&f, a)).collect::<Result<_>>()?;
        let x = g.solve(&rhs).ok_or_else(|| Error::Internal(format!("degenerate lower span at {alpha}")))?;
        let mut b = f.clone();
        let mut free = FreeElement::word(top);
        for ((w, _), (v, c)) in lower.iter().zip(vecs.iter().zip(&x)) {
            b = b.sub(&v.scale(c));
            free.add_term(w.clone(), -c);
        }
        Ok((b, free))
    }

    pub fn b(&self, i: usize, l: u32) -> Result<UElement> {
        Ok(self.primitive(i, l)?.element.clone())
    }

    pub fn tau(&self, i: usize, l: u32) -> Result<Scalar> {
        Ok(self.primitive(i, l)?.tau.clone())
    }

    /// `b_{i,c}`; for real `i` the label `1^n` stands for `b_i^{(n)}`.
    pub fn b_label(&self, i: usize, c: &[u32]) -> Result<Arc<UElement>> {
        self.label_elements.get_or_try_insert(&(i, c.to_vec()), || {
            let d = self.datum();
            if d.is_real(i) {
                let n = c.len() as u32;
                let fact: Scalar = q_factorial::<Coeff>(n, d.r(i)).into();
                let w = vec![Letter::new(i, 1); n as usize];
                return Ok(self.word(&w)?.scale(&fact.try_inv()?));
            }
            let mut acc = self.one();
            for &part in c {
                acc = self.mul(&acc, &self.b(i, part)?)?;
            }
            Ok(acc)
        })
    }

    fn op(&self, key: OpKey, f: impl FnOnce() -> Result<Matrix<Scalar>>) -> Result<Arc<Matrix<Scalar>>> {
        self.ops.get_or_try_insert(&key, f)
    }

    fn lowered(&self, i: usize, l: u32, alpha: &RootVector) -> Result<RootVector> {
        alpha
            .sub_simple(i, l)
            .ok_or_else(|| Error::InvalidArgument(format!("weight {alpha} has no room for level {l} at {}", self.datum().name(i))))
    }

    /// `e′_{i,l} = δ^{i,l}` from weight `alpha`, via `(b_{il}P, Q)_L = τ_{il}(P, e′_{i,l}Q)_L`.
    pub fn eprime(&self, i: usize, l: u32, alpha: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.op(OpKey::EPrime(i, l, alpha.clone()), || {
            let lower = self.lowered(i, l, alpha)?;
            let b = self.b(i, l)?;
            let lm = self.left_mul_matrix(&b, &lower)?;
            self.adjoint(&lm, &lower, alpha, &self.tau(i, l)?)
        })
    }

    /// `δ_{i,l}` from weight `alpha`, via `(P b_{il}, Q)_L = τ_{il}(P, δ_{i,l}Q)_L`.
    pub fn delta(&self, i: usize, l: u32, alpha: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.op(OpKey::Delta(i, l, alpha.clone()), || {
            let lower = self.lowered(i, l, alpha)?;
            let b = self.b(i, l)?;
            let rm = self.right_mul_matrix(&b, &lower)?;
            self.adjoint(&rm, &lower, alpha, &self.tau(i, l)?)
        })
    }

    /// `τ⁻¹ G_lower⁻¹ Mᵀ G_upper`.
    fn adjoint(&self, m: &Matrix<Scalar>, lower: &RootVector, upper: &RootVector, tau: &Scalar) -> Result<Matrix<Scalar>> {
        let gl = self.model(lower)?;
        let gu = self.model(upper)?;
        Ok(gl.gram_inverse.mul(&m.transpose()).mul(&gu.gram).scale(&tau.try_inv()?))
    }

    /// `*` on weight `alpha`: reverses words.
    pub fn star_matrix(&self, alpha: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.op(OpKey::Star(alpha.clone()), || {
            let m = self.model(alpha)?;
            let cols: Vec<Vec<Scalar>> = (0..m.dim())
                .map(|k| {
                    let w: Word = m.pivot_word(k).iter().rev().copied().collect();
                    m.word_coords(&w).expect("reversed word of the same weight")
                })
                .collect();
            Ok(Matrix::from_columns(m.dim(), &cols))
        })
    }

    /// `e″_{i,l}(Q) = q^{l(α_i, β−lα_i)} (e′_{i,l}(Q*))*` for `Q` of weight `−β`.
    pub fn edouble(&self, i: usize, l: u32, alpha: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.op(OpKey::EDouble(i, l, alpha.clone()), || {
            let lower = self.lowered(i, l, alpha)?;
            let e = self.eprime(i, l, alpha)?;
            let s_up = self.star_matrix(alpha)?;
            let s_low = self.star_matrix(&lower)?;
            let d = self.datum();
            let shift = l as i64 * d.pairing(&d.simple(i, 1), &lower);
            Ok(s_low.mul(&e).mul(&s_up).scale(&Scalar::q_pow(shift)))
        })
    }

    pub fn apply_eprime(&self, i: usize, l: u32, u: &UElement) -> Result<UElement> {
        let m = self.eprime(i, l, &u.weight)?;
        Ok(WeightVector::apply(&m, u, self.lowered(i, l, &u.weight)?))
    }

    pub fn apply_delta(&self, i: usize, l: u32, u: &UElement) -> Result<UElement> {
        let m = self.delta(i, l, &u.weight)?;
        Ok(WeightVector::apply(&m, u, self.lowered(i, l, &u.weight)?))
    }

    pub fn apply_edouble(&self, i: usize, l: u32, u: &UElement) -> Result<UElement> {
        let m = self.edouble(i, l, &u.weight)?;
        Ok(WeightVector::apply(&m, u, self.lowered(i, l, &u.weight)?))
    }

    pub fn star(&self, u: &UElement) -> Result<UElement> {
        let m = self.star_matrix(&u.weight)?;
        Ok(WeightVector::apply(&m, u, u.weight.clone()))
    }

    /// Basis words are bar-invariant, so bar conjugates coordinates.
    pub fn bar(&self, u: &UElement) -> UElement {
        u.bar()
    }
}

impl Ambient for UMinus {
    fn datum(&self) -> &BorcherdsCartanDatum {
        self.form.datum()
    }

    fn dim(&self, a: &RootVector) -> Result<usize> {
        Ok(self.model(a)?.dim())
    }

    fn label_action(&self, i: usize, c: &[u32], a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.op(OpKey::Left(i, c.to_vec(), a.clone()), || {
            let x = self.b_label(i, c)?;
            self.left_mul_matrix(&x, a)
        })
    }

    fn raising(&self, i: usize, l: u32, a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.eprime(i, l, a)
    }

    fn gram(&self, a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        Ok(self.model(a)?.gram.clone())
    }

    fn cache(&self) -> &AmbientCache {
        &self.ambient
    }
}
