//! Weight-graded modules over `U⁻`: the `i`-decomposition and the Kashiwara
//! operators, shared by `U⁻` itself and by `V(λ)`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cartan::{BorcherdsCartanDatum, IndexKind, RootVector};
use crate::combinat::{compositions, multiplicity, partitions};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::memo::Memo;
use crate::scalar::{rat, Coefficient};
use crate::{Coeff, Scalar};

/// Coordinates of a homogeneous vector in the chosen basis of its weight space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector {
    pub weight: RootVector,
    pub coords: Vec<Scalar>,
}

impl WeightVector {
    pub fn new(weight: RootVector, coords: Vec<Scalar>) -> Self {
        WeightVector { weight, coords }
    }

    pub fn zero(weight: RootVector, dim: usize) -> Self {
        WeightVector { weight, coords: vec![Scalar::zero(); dim] }
    }

    pub fn unit(weight: RootVector, dim: usize, k: usize) -> Self {
        let mut v = Self::zero(weight, dim);
        v.coords[k] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &WeightVector) -> WeightVector {
        assert_eq!(self.weight, o.weight, "adding vectors of different weights");
        WeightVector::new(self.weight.clone(), self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &WeightVector) -> WeightVector {
        assert_eq!(self.weight, o.weight, "subtracting vectors of different weights");
        WeightVector::new(self.weight.clone(), self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Scalar) -> WeightVector {
        WeightVector::new(self.weight.clone(), self.coords.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> WeightVector {
        WeightVector::new(self.weight.clone(), self.coords.iter().map(|a| -a).collect())
    }

    /// Conjugates coordinates by `q ↦ q⁻¹`; this is the bar involution in
    /// bases made of bar-invariant vectors.
    pub fn bar(&self) -> WeightVector {
        WeightVector::new(self.weight.clone(), self.coords.iter().map(|a| a.bar()).collect())
    }

    /// `M·v`, landing in `weight`.
    pub fn apply(m: &Matrix<Scalar>, v: &WeightVector, weight: RootVector) -> WeightVector {
        assert_eq!(m.cols(), v.dim());
        WeightVector::new(weight, m.mul_vec(&v.coords))
    }
}

/// Labels `𝒞_{i,k}`: partitions for isotropic `i`, compositions for the other
/// imaginary indices, and `1^k` (standing for the divided power) for real `i`.
pub fn labels(datum: &BorcherdsCartanDatum, i: usize, k: u32) -> Vec<Vec<u32>> {
    match datum.kind(i) {
        IndexKind::Real => vec![vec![1; k as usize]],
        IndexKind::Isotropic => partitions(k),
        IndexKind::Imaginary => compositions(k),
    }
}

/// `√(a/b)` as a constant.
pub fn sqrt_ratio(a: u32, b: u32) -> Scalar {
    Scalar::constant(Coeff::sqrt_rational(&rat(a as i64, b as i64)).expect("nonnegative"))
}

/// One summand `b_{i,c} K` of an `i`-decomposition.
#[derive(Clone, Debug)]
pub struct Block {
    pub label: Vec<u32>,
    pub base: RootVector,
    pub offset: usize,
    pub kernel: Arc<Vec<Vec<Scalar>>>,
}

/// The isomorphism `⊕_c b_{i,c} 𝒦_i → M_α` at one weight.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub blocks: Vec<Block>,
    pub matrix: Matrix<Scalar>,
    inverse: Matrix<Scalar>,
}

#[derive(Default)]
pub struct AmbientCache {
    kernels: Memo<(usize, RootVector), Vec<Vec<Scalar>>>,
    decompositions: Memo<(usize, RootVector), Decomposition>,
}

/// A `Q₊`-graded module generated by a highest vector of weight 0.
pub trait Ambient: Send + Sync {
    fn datum(&self) -> &BorcherdsCartanDatum;

    fn dim(&self, a: &RootVector) -> Result<usize>;

    /// `v ↦ b_{i,c} v` from weight `a` to `a + |c|α_i`.
    fn label_action(&self, i: usize, c: &[u32], a: &RootVector) -> Result<Arc<Matrix<Scalar>>>;

    /// The operators whose common kernel is `𝒦_i` (level `l`, from `a` to `a − lα_i`).
    fn raising(&self, i: usize, l: u32, a: &RootVector) -> Result<Arc<Matrix<Scalar>>>;

    /// Terms `b_{i,c} v_c` with `v_c` at `base` that vanish trivially.
    fn omitted(&self, _i: usize, _c: &[u32], _base: &RootVector) -> bool {
        false
    }

    /// The form on weight space `a` (Lusztig's form on `U⁻`, `{ , }` on `V(λ)`).
    fn gram(&self, a: &RootVector) -> Result<Arc<Matrix<Scalar>>>;

    fn cache(&self) -> &AmbientCache;

    fn highest(&self) -> WeightVector {
        WeightVector::unit(self.datum().zero_root(), 1, 0)
    }

    fn pair(&self, u: &WeightVector, v: &WeightVector) -> Result<Scalar> {
        if u.weight != v.weight {
            return Ok(Scalar::zero());
        }
        let g = self.gram(&u.weight)?;
        let n = u.coords.len();
        let terms = (0..n)
            .flat_map(|k| (0..n).map(move |l| (k, l)))
            .filter(|&(k, l)| !u.coords[k].is_zero() && !v.coords[l].is_zero())
            .map(|(k, l)| [&u.coords[k], g.get(k, l), &v.coords[l]]);
        Ok(Scalar::sum_of_products(terms))
    }

    fn zero_vector(&self, a: &RootVector) -> Result<WeightVector> {
        Ok(WeightVector::zero(a.clone(), self.dim(a)?))
    }

    fn basis(&self, a: &RootVector) -> Result<Vec<WeightVector>> {
        let n = self.dim(a)?;
        Ok((0..n).map(|k| WeightVector::unit(a.clone(), n, k)).collect())
    }

    fn act_label(&self, i: usize, c: &[u32], v: &WeightVector) -> Result<WeightVector> {
        let k: u32 = c.iter().sum();
        let m = self.label_action(i, c, &v.weight)?;
        Ok(WeightVector::apply(&m, v, v.weight.add_simple(i, k)))
    }
}

fn raising_levels(datum: &BorcherdsCartanDatum, i: usize, a: &RootVector) -> u32 {
    if datum.is_real(i) {
        a.0[i].min(1)
    } else {
        a.0[i]
    }
}

/// Basis of `𝒦_i` at weight `a`.
pub fn highest_kernel<A: Ambient + ?Sized>(amb: &A, i: usize, a: &RootVector) -> Result<Arc<Vec<Vec<Scalar>>>> {
    amb.cache().kernels.get_or_try_insert(&(i, a.clone()), || {
        let n = amb.dim(a)?;
        let top = raising_levels(amb.datum(), i, a);
        let mut stacked: Option<Matrix<Scalar>> = None;
        for l in 1..=top {
            let m = amb.raising(i, l, a)?;
            stacked = Some(match stacked {
                None => (*m).clone(),
                Some(s) => s.vstack(&m),
            });
        }
        Ok(match stacked {
            None => (0..n).map(|k| WeightVector::unit(a.clone(), n, k).coords).collect(),
            Some(s) => s.kernel(),
        })
    })
}

pub fn decomposition<A: Ambient + ?Sized>(amb: &A, i: usize, a: &RootVector) -> Result<Arc<Decomposition>> {
    amb.cache().decompositions.get_or_try_insert(&(i, a.clone()), || {
        let d = amb.datum();
        let n = amb.dim(a)?;
        let mut blocks = Vec::new();
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        for k in 0..=a.0[i] {
            let base = a.sub_simple(i, k).expect("k ≤ a_i");
            let ker = highest_kernel(amb, i, &base)?;
            if ker.is_empty() {
                continue;
            }
            for c in labels(d, i, k) {
                if amb.omitted(i, &c, &base) {
                    continue;
                }
                let m = amb.label_action(i, &c, &base)?;
                let offset = cols.len();
                cols.extend(ker.iter().map(|v| m.mul_vec(v)));
                blocks.push(Block { label: c, base: base.clone(), offset, kernel: ker.clone() });
            }
        }
        if cols.len() != n {
            return Err(Error::Internal(format!(
                "{}-decomposition at {a} has {} summand vectors for dimension {n}",
                d.name(i),
                cols.len()
            )));
        }
        let matrix = Matrix::from_columns(n, &cols);
        let inverse = matrix
            .inverse()
            .ok_or_else(|| Error::Internal(format!("singular {}-decomposition at {a}", d.name(i))))?;
        Ok(Decomposition { blocks, matrix, inverse })
    })
}

/// `v = Σ_c b_{i,c} v_c` with `v_c ∈ 𝒦_i`; only nonzero components are returned.
pub fn decompose<A: Ambient + ?Sized>(amb: &A, i: usize, v: &WeightVector) -> Result<Vec<(Vec<u32>, WeightVector)>> {
    let dec = decomposition(amb, i, &v.weight)?;
    let x = dec.inverse.mul_vec(&v.coords);
    let mut out = Vec::new();
    for b in &dec.blocks {
        let n = b.kernel.first().map_or(0, |k| k.len());
        let mut coords = vec![Scalar::zero(); n];
        for (t, kv) in b.kernel.iter().enumerate() {
            let s = &x[b.offset + t];
            if s.is_zero() {
                continue;
            }
            for (c, y) in coords.iter_mut().zip(kv) {
                *c = &*c + &(s * y);
            }
        }
        let w = WeightVector::new(b.base.clone(), coords);
        if !w.is_zero() {
            out.push((b.label.clone(), w));
        }
    }
    Ok(out)
}

/// `Σ_c b_{i,c} v_c`.
pub fn compose<A: Ambient + ?Sized>(amb: &A, i: usize, a: &RootVector, parts: &[(Vec<u32>, WeightVector)]) -> Result<WeightVector> {
    let mut out = amb.zero_vector(a)?;
    for (c, v) in parts {
        out = out.add(&amb.act_label(i, c, v)?);
    }
    Ok(out)
}

fn check_level(datum: &BorcherdsCartanDatum, i: usize, l: u32) -> Result<()> {
    if l == 0 || (datum.is_real(i) && l != 1) {
        return Err(Error::InvalidArgument(format!("no Kashiwara operator ({}, {l})", datum.name(i))));
    }
    Ok(())
}

/// `f̃_{il}`.
pub fn f_tilde<A: Ambient + ?Sized>(amb: &A, i: usize, l: u32, v: &WeightVector) -> Result<WeightVector> {
    let d = amb.datum();
    check_level(d, i, l)?;
    let target = v.weight.add_simple(i, l);
    let mut out = amb.zero_vector(&target)?;
    for (c, u) in decompose(amb, i, v)? {
        let (c2, coef) = match d.kind(i) {
            IndexKind::Real => (vec![1; c.len() + 1], Scalar::one()),
            IndexKind::Imaginary => {
                let mut c2 = vec![l];
                c2.extend(&c);
                (c2, Scalar::one())
            }
            IndexKind::Isotropic => {
                let m = multiplicity(&c, l);
                let mut c2 = c.clone();
                let pos = c2.iter().position(|&x| x < l).unwrap_or(c2.len());
                c2.insert(pos, l);
                (c2, sqrt_ratio(l, m + 1))
            }
        };
        out = out.add(&amb.act_label(i, &c2, &u)?.scale(&coef));
    }
    Ok(out)
}

/// `ẽ_{il}`; `None` when `v` has no room for it (`a_i < l`).
pub fn e_tilde<A: Ambient + ?Sized>(amb: &A, i: usize, l: u32, v: &WeightVector) -> Result<Option<WeightVector>> {
    let d = amb.datum();
    check_level(d, i, l)?;
    let Some(target) = v.weight.sub_simple(i, l) else { return Ok(None) };
    let mut out = amb.zero_vector(&target)?;
    for (c, u) in decompose(amb, i, v)? {
        let (c2, coef) = match d.kind(i) {
            IndexKind::Real if !c.is_empty() => (vec![1; c.len() - 1], Scalar::one()),
            IndexKind::Imaginary if c.first() == Some(&l) => (c[1..].to_vec(), Scalar::one()),
            IndexKind::Isotropic if c.contains(&l) => {
                let m = multiplicity(&c, l);
                let mut c2 = c.clone();
                let pos = c2.iter().position(|&x| x == l).expect("contains l");
                c2.remove(pos);
                (c2, sqrt_ratio(m, l))
            }
            _ => continue,
        };
        out = out.add(&amb.act_label(i, &c2, &u)?.scale(&coef));
    }
    Ok(Some(out))
}

/// All `(i, l)` with `lα_i ≤ a`.
pub fn levels_within(datum: &BorcherdsCartanDatum, a: &RootVector) -> Vec<(usize, u32)> {
    let mut out = Vec::new();
    for i in 0..datum.rank() {
        let top = if datum.is_real(i) { a.0[i].min(1) } else { a.0[i] };
        out.extend((1..=top).map(|l| (i, l)));
    }
    out
}
