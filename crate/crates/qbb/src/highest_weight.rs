//! `V(λ) = U⁻/I(λ)` weight by weight, with the action of `𝚊_{il}` and the
//! contravariant form.

use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::ambient::{levels_within, Ambient, AmbientCache, WeightVector};
use crate::cartan::{BorcherdsCartanDatum, DominantWeight, RootVector};
use crate::error::{Error, Result};
use crate::free_algebra::Letter;
use crate::linalg::Matrix;
use crate::memo::Memo;
use crate::uminus::{UElement, UMinus};
use crate::Scalar;

pub type VElement = WeightVector;

/// `V(λ)_{λ−α}` as a quotient of `U⁻_{−α}`.
#[derive(Debug)]
pub struct VSpace {
    pub weight: RootVector,
    /// Positions of `U⁻` basis vectors whose classes form the basis.
    pub free: Vec<usize>,
    /// `π_λ` on coordinates.
    pub proj: Matrix<Scalar>,
    /// Basis vectors lifted to `U⁻`.
    pub section: Matrix<Scalar>,
    pub ideal_rank: usize,
}

impl VSpace {
    pub fn dim(&self) -> usize {
        self.free.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum VKey {
    Label(usize, Vec<u32>, RootVector),
    Raise(usize, u32, RootVector),
}

pub struct VModule {
    u: Arc<UMinus>,
    lambda: DominantWeight,
    spaces: Memo<RootVector, VSpace>,
    ops: Memo<VKey, Matrix<Scalar>>,
    grams: Memo<RootVector, Matrix<Scalar>>,
    ambient: AmbientCache,
}

impl std::fmt::Debug for VModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VModule").field("lambda", &self.lambda).finish()
    }
}

impl VModule {
    pub fn new(u: Arc<UMinus>, lambda: DominantWeight) -> Result<Self> {
        if lambda.0.len() != u.datum().rank() {
            return Err(Error::InvalidArgument(format!("λ has {} entries for rank {}", lambda.0.len(), u.datum().rank())));
        }
        Ok(VModule {
            u,
            lambda,
            spaces: Memo::new(),
            ops: Memo::new(),
            grams: Memo::new(),
            ambient: AmbientCache::default(),
        })
    }

    pub fn uminus(&self) -> &Arc<UMinus> {
        &self.u
    }

    pub fn lambda(&self) -> &DominantWeight {
        &self.lambda
    }

    /// `⟨h_i, λ − α⟩`.
    pub fn coweight(&self, i: usize, a: &RootVector) -> i64 {
        self.datum().coroot_shifted(i, &self.lambda, a)
    }

    /// The generators of `I(λ)`: `f_i^{λ_i+1}` for real `i`, and `f_{il}` for
    /// imaginary `i` with `λ_i = 0`, as long as they fit under `a`.
    fn ideal_generators(&self, a: &RootVector) -> Result<Vec<UElement>> {
        let d = self.datum();
        let mut out = Vec::new();
        for i in 0..d.rank() {
            if d.is_real(i) {
                let n = self.lambda.0[i] + 1;
                if n <= a.0[i] {
                    out.push(self.u.word(&vec![Letter::new(i, 1); n as usize])?);
                }
            } else if self.lambda.0[i] == 0 {
                for l in 1..=a.0[i] {
                    out.push(self.u.letter(i, l)?);
                }
            }
        }
        Ok(out)
    }

    pub fn space(&self, a: &RootVector) -> Result<Arc<VSpace>> {
        self.spaces.get_or_try_insert(a, || {
            let n = self.u.dim(a)?;
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for g in self.ideal_generators(a)? {
                let rest = a.checked_sub(&g.weight).expect("generator fits");
                let m = self.u.right_mul_matrix(&g, &rest)?;
                rows.extend(m.columns());
            }
            let (r, pivots) = if rows.is_empty() {
                (Matrix::zeros(0, n), Vec::new())
            } else {
                Matrix::from_rows(rows).rref()
            };
            let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
            let mut proj = Matrix::zeros(free.len(), n);
            let mut section = Matrix::zeros(n, free.len());
            for (f, &c) in free.iter().enumerate() {
                proj.set(f, c, Scalar::one());
                section.set(c, f, Scalar::one());
                for (k, &p) in pivots.iter().enumerate() {
                    let x = r.get(k, c);
                    if !x.is_zero() {
                        proj.set(f, p, -x);
                    }
                }
            }
            Ok(VSpace { weight: a.clone(), free, proj, section, ideal_rank: pivots.len() })
        })
    }

    /// Builds every weight space of height at most `h`, in parallel per height.
    pub fn prepare(&self, h: u32) -> Result<()> {
        self.u.prepare(h)?;
        let d = self.datum();
        for k in 0..=h {
            d.roots_of_height(k).par_iter().try_for_each(|a| self.gram(a).map(|_| ()))?;
        }
        Ok(())
    }

    /// `π_λ(u) = u v_λ`.
    pub fn project(&self, u: &UElement) -> Result<VElement> {
        let s = self.space(&u.weight)?;
        Ok(WeightVector::apply(&s.proj, u, u.weight.clone()))
    }

    /// A preimage under `π_λ`.
    pub fn lift(&self, v: &VElement) -> Result<UElement> {
        let s = self.space(&v.weight)?;
        Ok(WeightVector::apply(&s.section, v, v.weight.clone()))
    }

    /// `v ↦ x v` for `x ∈ U⁻`.
    pub fn act(&self, x: &UElement, v: &VElement) -> Result<VElement> {
        let p = self.u.mul(x, &self.lift(v)?)?;
        self.project(&p)
    }

    /// `𝚊_{il}` from `λ − α` to `λ − α + lα_i`, through
    /// `[𝚊_{il}, P] = τ_{il}(δ_{i,l}(P)K_i^l − K_i^{−l}e′_{i,l}(P))`.
    pub fn raise(&self, i: usize, l: u32, a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.ops.get_or_try_insert(&VKey::Raise(i, l, a.clone()), || {
            let d = self.datum();
            let lower = a.sub_simple(i, l).ok_or_else(|| Error::InvalidArgument(format!("no room for level {l} at {a}")))?;
            let ri = d.r(i);
            let top = Scalar::q_pow(ri * l as i64 * self.lambda.0[i] as i64);
            let bottom = Scalar::q_pow(-ri * l as i64 * self.coweight(i, &lower));
            let delta = self.u.delta(i, l, a)?;
            let ep = self.u.eprime(i, l, a)?;
            let inner = delta.scale(&top).sub(&ep.scale(&bottom)).scale(&self.u.tau(i, l)?);
            let src = self.space(a)?;
            let dst = self.space(&lower)?;
            Ok(dst.proj.mul(&inner).mul(&src.section))
        })
    }

    pub fn apply_raise(&self, i: usize, l: u32, v: &VElement) -> Result<VElement> {
        let m = self.raise(i, l, &v.weight)?;
        Ok(WeightVector::apply(&m, v, v.weight.sub_simple(i, l).expect("checked by raise")))
    }

    /// `A_i = 𝚊_i/τ_i(q_i − q_i⁻¹)` for real `i`, `A_{il} = 𝚊_{il}/τ_{il}` otherwise.
    pub fn big_a(&self, i: usize, l: u32, a: &RootVector) -> Result<Matrix<Scalar>> {
        let d = self.datum();
        let mut s = self.u.tau(i, l)?;
        if d.is_real(i) {
            s = &s * &(&Scalar::q_pow(d.r(i)) - &Scalar::q_pow(-d.r(i)));
        }
        Ok(self.raise(i, l, a)?.scale(&s.try_inv()?))
    }

    /// The factor `κ` in `{b_{jk}x, y} = κ{x, 𝚊_{jk}y}` for `x` of weight `λ − β`.
    fn peel_factor(&self, j: usize, k: u32, beta: &RootVector) -> Result<Scalar> {
        let d = self.datum();
        let rj = d.r(j);
        let h = self.coweight(j, beta);
        if d.is_real(j) {
            let den = &Scalar::q_pow(2 * rj) - &Scalar::one();
            Ok(Scalar::q_pow(rj * h).try_div(&den)?)
        } else {
            Ok(-Scalar::q_pow(rj * k as i64 * h))
        }
    }

    /// Gram matrix of `{ , }` on `V(λ)_{λ−α}`.
    fn contravariant_gram(&self, a: &RootVector) -> Result<Matrix<Scalar>> {
        let n = self.space(a)?.dim();
        if a.is_zero() {
            return Ok(Matrix::identity(n));
        }
        if n == 0 {
            return Ok(Matrix::zeros(0, 0));
        }
        let d = self.datum();
        let mut coords: Option<Matrix<Scalar>> = None;
        let mut values: Option<Matrix<Scalar>> = None;
        for (j, k) in levels_within(d, a) {
            let beta = a.sub_simple(j, k).expect("level within weight");
            if self.space(&beta)?.dim() == 0 {
                continue;
            }
            let lab = self.label_action(j, &[k], &beta)?;
            let low = self.gram(&beta)?;
            let x = low.mul(&*self.raise(j, k, a)?).scale(&self.peel_factor(j, k, &beta)?);
            let c = lab.transpose();
            coords = Some(match coords {
                None => c,
                Some(m) => m.vstack(&c),
            });
            values = Some(match values {
                None => x,
                Some(m) => m.vstack(&x),
            });
        }
        let (coords, values) = match (coords, values) {
            (Some(c), Some(v)) => (c, v),
            _ => return Err(Error::Internal(format!("V(λ) at {a} has no spanning vectors"))),
        };
        let rows = coords.independent_rows();
        if rows.len() != n {
            return Err(Error::Internal(format!("spanning vectors of V(λ) at {a} have rank {} < {n}", rows.len())));
        }
        let inv = coords.select_rows(&rows).inverse().ok_or_else(|| Error::Internal("singular spanning block".into()))?;
        let g = inv.mul(&values.select_rows(&rows));
        if coords.mul(&g) != values {
            return Err(Error::Internal(format!("contravariant form is not well defined at {a}")));
        }
        if g.transpose() != g {
            return Err(Error::Internal(format!("contravariant form is not symmetric at {a}")));
        }
        Ok(g)
    }

    pub fn form(&self, v: &VElement, w: &VElement) -> Result<Scalar> {
        self.pair(v, w)
    }
}

impl Ambient for VModule {
    fn datum(&self) -> &BorcherdsCartanDatum {
        self.u.datum()
    }

    fn dim(&self, a: &RootVector) -> Result<usize> {
        Ok(self.space(a)?.dim())
    }

    fn label_action(&self, i: usize, c: &[u32], a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.ops.get_or_try_insert(&VKey::Label(i, c.to_vec(), a.clone()), || {
            let k: u32 = c.iter().sum();
            let target = a.add_simple(i, k);
            let m = self.u.label_action(i, c, a)?;
            Ok(self.space(&target)?.proj.mul(&m).mul(&self.space(a)?.section))
        })
    }

    fn raising(&self, i: usize, l: u32, a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.raise(i, l, a)
    }

    /// Summands that vanish for weight reasons: `b_i^{(n)}K` with
    /// `n > ⟨h_i, λ − base⟩` for real `i`, and `b_{i,c}K` with `c ≠ ∅` when
    /// `(λ − base, α_i) = 0` for imaginary `i`.
    fn omitted(&self, i: usize, c: &[u32], base: &RootVector) -> bool {
        let h = self.coweight(i, base);
        if self.datum().is_real(i) {
            c.len() as i64 > h
        } else {
            !c.is_empty() && h == 0
        }
    }

    fn gram(&self, a: &RootVector) -> Result<Arc<Matrix<Scalar>>> {
        self.grams.get_or_try_insert(a, || self.contravariant_gram(a))
    }

    fn cache(&self) -> &AmbientCache {
        &self.ambient
    }
}
