//! `𝔸`-forms, balanced triples and the global bases `G(b)`, `G_λ(b)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ambient::{e_tilde, Ambient, WeightVector};
use crate::cartan::{BorcherdsCartanDatum, RootVector};
use crate::crystal::{Crystal, LatticeBasis};
use crate::error::{Error, Result};
use crate::highest_weight::VModule;
use crate::linalg::{Echelon, Matrix};
use crate::memo::Memo;
use crate::scalar::{poly, Field};
use crate::uminus::UMinus;
use crate::{Coeff, Laurent, Scalar};

/// `a = quot·b + rem` in `𝔸 = 𝐅[q, q⁻¹]` with `span(rem) < span(b)`.
fn laurent_div_rem(a: &Laurent, b: &Laurent) -> (Laurent, Laurent) {
    let (qt, rt) = poly::div_rem(a.coeffs(), b.coeffs());
    let quot = Laurent::new(a.low() - b.low(), qt);
    let rem = Laurent::new(a.low(), rt);
    (quot, rem)
}

fn nonzero_row(r: &[Laurent]) -> bool {
    r.iter().any(|x| !x.is_zero())
}

/// An `𝔸`-basis of the `𝔸`-span of `gens` (coordinate vectors of length `dim`).
///
/// A maximal independent subset of `gens` is returned when it already spans;
/// otherwise falls back to [`laurent_hermite`].
pub fn laurent_basis(dim: usize, gens: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let mut ech = Echelon::new(dim);
    let mut picked = Vec::new();
    let mut rest = Vec::new();
    for g in gens {
        if ech.insert(g.clone()) {
            picked.push(g.clone());
        } else {
            rest.push(g);
        }
    }
    if picked.is_empty() {
        return Ok(picked);
    }
    let lb = LatticeBasis::new(RootVector(Vec::new()), dim, picked.clone())?;
    for g in rest {
        let c = lb.coordinates(&WeightVector::new(RootVector(Vec::new()), g.clone()))?;
        if !c.iter().all(|x| x.is_laurent()) {
            return laurent_hermite(dim, gens);
        }
    }
    Ok(picked)
}

/// Row echelon basis of the `𝔸`-span of `gens`.
///
/// Denominators are cleared by their least common multiple `D`, the span is
/// brought to row echelon form by the Euclidean algorithm on `q`-stripped
/// polynomials, and the result is divided by `D` again.
pub fn laurent_hermite(dim: usize, gens: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let mut den: Vec<Coeff> = vec![Coeff::one()];
    for x in gens.iter().flatten() {
        if x.is_zero() || x.is_laurent() {
            continue;
        }
        let g = poly::gcd(&den, x.den());
        den = poly::exact_div(&poly::mul(&den, x.den()), &g);
    }
    let d: Scalar = Laurent::new(0, den).into();
    let mut rows: Vec<Vec<Laurent>> = Vec::with_capacity(gens.len());
    for g in gens {
        if g.len() != dim {
            return Err(Error::InvalidArgument(format!("generator of length {} in dimension {dim}", g.len())));
        }
        let row = g
            .iter()
            .map(|x| (x * &d).as_laurent().cloned().ok_or_else(|| Error::Internal("denominator not cleared".into())))
            .collect::<Result<Vec<_>>>()?;
        if nonzero_row(&row) {
            rows.push(row);
        }
    }
    let mut done = 0;
    for c in 0..dim {
        loop {
            let active: Vec<usize> = (done..rows.len()).filter(|&r| !rows[r][c].is_zero()).collect();
            let Some(&p) = active.iter().min_by_key(|&&r| (rows[r][c].span(), r)) else { break };
            if active.len() == 1 {
                rows.swap(done, p);
                let piv = &rows[done][c];
                let unit = Laurent::monomial(piv.trailing().expect("nonzero").inv().expect("unit"), -piv.low());
                for x in rows[done].iter_mut() {
                    *x = &*x * &unit;
                }
                done += 1;
                break;
            }
            let piv = rows[p].clone();
            for &r in active.iter().filter(|&&r| r != p) {
                let (quot, _) = laurent_div_rem(&rows[r][c], &piv[c]);
                for (x, y) in rows[r].iter_mut().zip(&piv) {
                    if !y.is_zero() {
                        *x = &*x - &(&quot * y);
                    }
                }
            }
        }
    }
    rows.truncate(done);
    let dinv = d.try_inv()?;
    Ok(rows.into_iter().map(|r| r.into_iter().map(|x| &Scalar::from(x) * &dinv).collect()).collect())
}

/// An `𝔸₀`-basis of `𝔸₀ⁿ ∩ span(cols)`: repeatedly pivot on the entry of
/// least `q`-order, normalize it to 1 and clear its row from the rest.
pub fn saturate(cols: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    let mut rest: Vec<Vec<Scalar>> = cols.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for (k, v) in rest.iter().enumerate() {
            for (j, x) in v.iter().enumerate() {
                if let Some(o) = x.ord0() {
                    let key = (o, j, k);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
        }
        let (_, j, k) = best.expect("nonzero columns remain");
        let p = rest.swap_remove(k);
        let s = p[j].try_inv().expect("nonzero pivot");
        let p: Vec<Scalar> = p.iter().map(|x| x * &s).collect();
        for v in rest.iter_mut() {
            if v[j].is_zero() {
                continue;
            }
            let f = v[j].clone();
            for (a, b) in v.iter_mut().zip(&p) {
                if !b.is_zero() {
                    *a = &*a - &(&f * b);
                }
            }
        }
        rest.retain(|v| v.iter().any(|x| !x.is_zero()));
        out.push(p);
    }
    out
}

/// `𝔸`-forms of `U⁻` and of its left ideals `(𝚋_{il}ⁿU⁻)^𝔸`.
pub struct AForm {
    u: Arc<UMinus>,
    bases: Memo<RootVector, Vec<WeightVector>>,
}

/// The generator `𝚋_i^{(k)}` (real) or `𝚋_{ik}` (imaginary) as a label.
fn generator(d: &BorcherdsCartanDatum, i: usize, k: u32) -> Vec<u32> {
    if d.is_real(i) {
        vec![1; k as usize]
    } else {
        vec![k]
    }
}

impl AForm {
    pub fn new(u: Arc<UMinus>) -> Self {
        AForm { u, bases: Memo::new() }
    }

    pub fn uminus(&self) -> &Arc<UMinus> {
        &self.u
    }

    /// `𝔸`-basis of `U⁻_𝔸` at weight `a`.
    pub fn basis(&self, a: &RootVector) -> Result<Arc<Vec<WeightVector>>> {
        self.bases.get_or_try_insert(a, || {
            if a.is_zero() {
                return Ok(vec![self.u.one()]);
            }
            let d = self.u.datum();
            let mut gens = Vec::new();
            for i in 0..d.rank() {
                for k in 1..=a.0[i] {
                    let low = a.sub_simple(i, k).expect("k ≤ a_i");
                    self.extend(&mut gens, i, &generator(d, i, k), &low)?;
                }
            }
            self.finish(a, &gens)
        })
    }

    /// `𝔸`-basis of `(𝚋_{il}ⁿU⁻)^𝔸` at `a`: `Σ_{k≥n} 𝚋_i^{(k)}U⁻_𝔸` for real `i`
    /// and `𝚋_{il}ⁿU⁻_𝔸` for imaginary `i`.
    pub fn ideal(&self, i: usize, l: u32, n: u32, a: &RootVector) -> Result<Vec<WeightVector>> {
        let d = self.u.datum();
        let mut gens = Vec::new();
        if d.is_real(i) {
            if l != 1 {
                return Err(Error::InvalidArgument(format!("real index {} has level 1 only", d.name(i))));
            }
            for k in n..=a.0[i] {
                let low = a.sub_simple(i, k).expect("k ≤ a_i");
                self.extend(&mut gens, i, &generator(d, i, k), &low)?;
            }
        } else if let Some(low) = a.sub_simple(i, n * l) {
            self.extend(&mut gens, i, &vec![l; n as usize], &low)?;
        }
        self.finish(a, &gens)
    }

    fn extend(&self, gens: &mut Vec<Vec<Scalar>>, i: usize, label: &[u32], low: &RootVector) -> Result<()> {
        let m = self.u.label_action(i, label, low)?;
        for v in self.basis(low)?.iter() {
            gens.push(m.mul_vec(&v.coords));
        }
        Ok(())
    }

    fn finish(&self, a: &RootVector, gens: &[Vec<Scalar>]) -> Result<Vec<WeightVector>> {
        let n = self.u.dim(a)?;
        Ok(laurent_basis(n, gens)?.into_iter().map(|c| WeightVector::new(a.clone(), c)).collect())
    }
}

/// `𝔸`-basis of `π_λ(M)` for an `𝔸`-basis `m` of `M ⊆ U⁻` at weight `a`.
pub fn project_aform(v: &VModule, a: &RootVector, m: &[WeightVector]) -> Result<Vec<WeightVector>> {
    let gens: Vec<Vec<Scalar>> = m.iter().map(|x| v.project(x).map(|y| y.coords)).collect::<Result<_>>()?;
    let n = v.dim(a)?;
    Ok(laurent_basis(n, &gens)?.into_iter().map(|c| WeightVector::new(a.clone(), c)).collect())
}

/// `ℒ ∩ span(w)` for a lattice `ℒ` and vectors `w` in its span.
pub fn lattice_meet(lat: &LatticeBasis, w: &[WeightVector]) -> Result<Vec<WeightVector>> {
    let cols: Vec<Vec<Scalar>> = w.iter().map(|x| lat.coordinates(x)).collect::<Result<_>>()?;
    let dim = lat.vectors.first().map_or(0, |v| v.dim());
    Ok(saturate(cols)
        .into_iter()
        .map(|c| {
            let mut x = WeightVector::zero(lat.weight.clone(), dim);
            for (v, s) in lat.vectors.iter().zip(&c) {
                if !s.is_zero() {
                    x = x.add(&v.scale(s));
                }
            }
            x
        })
        .collect())
}

/// `ℒ̄ ∩ span(w)`.
pub fn bar_lattice_meet(lat: &LatticeBasis, w: &[WeightVector]) -> Result<Vec<WeightVector>> {
    let barred: Vec<WeightVector> = w.iter().map(|x| x.bar()).collect();
    Ok(lattice_meet(lat, &barred)?.iter().map(|x| x.bar()).collect())
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub vector: Option<WeightVector>,
    pub reason: String,
}

/// Outcome of checking one triple `(M, L₀, L_∞)`.
#[derive(Clone, Debug)]
pub struct Balanced {
    pub weight: RootVector,
    pub rank: usize,
    pub dim_e: usize,
    pub certified: bool,
    /// An `𝐅`-basis of `E = M ∩ L₀ ∩ L_∞`.
    pub e_basis: Vec<WeightVector>,
    pub witness: Option<Witness>,
}

fn basis_of(weight: &RootVector, dim: usize, vs: &[WeightVector], what: &str) -> Result<LatticeBasis> {
    LatticeBasis::new(weight.clone(), dim, vs.iter().map(|v| v.coords.clone()).collect())
        .map_err(|_| Error::InvalidArgument(format!("{what} basis at {weight} is linearly dependent")))
}

fn coords_in(b: &LatticeBasis, x: &WeightVector, what: &str) -> Result<Vec<Scalar>> {
    b.coordinates(x).map_err(|_| Error::InvalidArgument(format!("{what} spans a different space at {}", b.weight)))
}

fn coeff_rank(cols: &[Vec<Coeff>], rows: usize) -> usize {
    if cols.is_empty() {
        return 0;
    }
    Matrix::from_columns(rows, cols).rank()
}

/// Certifies that `E = M ∩ L₀ ∩ L_∞ → (M ∩ L₀)/(M ∩ qL₀)` is bijective.
///
/// `m`, `l0`, `linf` are bases of an `𝔸`-module, an `𝔸₀`-lattice and an
/// `𝔸_∞`-lattice spanning the same subspace of the weight space at `weight`.
pub fn balanced_check(weight: &RootVector, dim: usize, m: &[WeightVector], l0: &[WeightVector], linf: &[WeightVector]) -> Result<Balanced> {
    let r = m.len();
    if l0.len() != r || linf.len() != r {
        return Err(Error::InvalidArgument(format!(
            "ranks differ at {weight}: M {r}, L0 {}, Linf {}",
            l0.len(),
            linf.len()
        )));
    }
    if r == 0 {
        return Ok(Balanced { weight: weight.clone(), rank: 0, dim_e: 0, certified: true, e_basis: Vec::new(), witness: None });
    }
    let bm = basis_of(weight, dim, m, "M")?;
    let b0 = basis_of(weight, dim, l0, "L0")?;
    let bi = basis_of(weight, dim, linf, "Linf")?;
    // column k: coordinates of M_k
    let t0: Vec<Vec<Scalar>> = m.iter().map(|x| coords_in(&b0, x, "M")).collect::<Result<_>>()?;
    let ti: Vec<Vec<Scalar>> = m.iter().map(|x| coords_in(&bi, x, "M")).collect::<Result<_>>()?;
    // column j: M-coordinates of the lattice vectors
    let t0inv: Vec<Vec<Scalar>> = l0.iter().map(|x| coords_in(&bm, x, "L0")).collect::<Result<_>>()?;
    let tiinv: Vec<Vec<Scalar>> = linf.iter().map(|x| coords_in(&bm, x, "Linf")).collect::<Result<_>>()?;
    let lo: Vec<i64> = (0..r).map(|k| t0inv.iter().filter_map(|c| c[k].ord0()).min().unwrap_or(0)).collect();
    let hi: Vec<i64> = (0..r).map(|k| tiinv.iter().filter_map(|c| c[k].deg_inf()).max().unwrap_or(-1)).collect();
    // unknowns m_{k,e}, e ∈ lo_k..=hi_k
    let mut offset = vec![0usize; r + 1];
    for k in 0..r {
        offset[k + 1] = offset[k] + (hi[k] - lo[k] + 1).max(0) as usize;
    }
    let nvar = offset[r];
    let mut rows: Vec<Vec<Coeff>> = Vec::new();
    // L₀: coefficients of q^s, s < 0, in (T₀ m)_j
    for j in 0..r {
        let smin = (0..r).filter(|&k| hi[k] >= lo[k]).filter_map(|k| t0[k][j].ord0().map(|o| o + lo[k])).min();
        let Some(smin) = smin.filter(|&s| s < 0) else { continue };
        let series: Vec<Vec<Coeff>> = (0..r).map(|k| t0[k][j].series_at_zero(smin - hi[k], -1 - lo[k])).collect();
        for s in smin..0 {
            let mut row = vec![Coeff::zero(); nvar];
            for k in 0..r {
                for e in lo[k]..=hi[k] {
                    let t = s - e;
                    let base = smin - hi[k];
                    if t >= base && t <= -1 - lo[k] {
                        row[offset[k] + (e - lo[k]) as usize] = series[k][(t - base) as usize].clone();
                    }
                }
            }
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    // L_∞: coefficients of q^s, s < 0, in bar((T_∞ m)_j) = Σ_k bar(T_∞)_{jk} Σ_e m_{k,e} q^{−e}
    for j in 0..r {
        let barred: Vec<Scalar> = (0..r).map(|k| ti[k][j].bar()).collect();
        let smin = (0..r).filter(|&k| hi[k] >= lo[k]).filter_map(|k| barred[k].ord0().map(|o| o - hi[k])).min();
        let Some(smin) = smin.filter(|&s| s < 0) else { continue };
        let series: Vec<Vec<Coeff>> = (0..r).map(|k| barred[k].series_at_zero(smin + lo[k], hi[k] - 1)).collect();
        for s in smin..0 {
            let mut row = vec![Coeff::zero(); nvar];
            for k in 0..r {
                let base = smin + lo[k];
                for e in lo[k]..=hi[k] {
                    let t = s + e;
                    if t >= base && t <= hi[k] - 1 {
                        row[offset[k] + (e - lo[k]) as usize] = series[k][(t - base) as usize].clone();
                    }
                }
            }
            if row.iter().any(|c| !c.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel: Vec<Vec<Coeff>> = if rows.is_empty() {
        (0..nvar)
            .map(|v| {
                let mut x = vec![Coeff::zero(); nvar];
                x[v] = Coeff::one();
                x
            })
            .collect()
    } else {
        Matrix::from_rows(rows).kernel()
    };
    let mut mcoef: Vec<Vec<Scalar>> = Vec::new();
    let mut e_basis = Vec::new();
    for sol in &kernel {
        let mk: Vec<Scalar> = (0..r)
            .map(|k| {
                let cs = sol[offset[k]..offset[k + 1]].to_vec();
                Scalar::from(Laurent::new(lo[k], cs))
            })
            .collect();
        let mut x = WeightVector::zero(weight.clone(), dim);
        for (v, s) in m.iter().zip(&mk) {
            if !s.is_zero() {
                x = x.add(&v.scale(s));
            }
        }
        mcoef.push(mk);
        e_basis.push(x);
    }
    let dim_e = e_basis.len();
    let res0: Vec<Vec<Coeff>> = e_basis.iter().map(|x| b0.residue(x)).collect::<Result<_>>()?;
    let resi: Vec<Vec<Coeff>> = e_basis
        .iter()
        .map(|x| coords_in(&bi, x, "E")?.iter().map(|c| c.value_at_infinity()).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let combine = |c: &[Coeff]| {
        let mut x = WeightVector::zero(weight.clone(), dim);
        for (e, s) in e_basis.iter().zip(c) {
            if !s.is_zero() {
                x = x.add(&e.scale(&Scalar::constant(s.clone())));
            }
        }
        x
    };
    let witness = if dim_e < r {
        let mut ech = Echelon::new(r);
        for c in &res0 {
            ech.insert(c.clone());
        }
        let mut w = Witness { vector: None, reason: format!("dim E = {dim_e} < rank {r}") };
        for k in 0..r {
            let s = -t0[k].iter().filter_map(|c| c.ord0()).min().expect("nonzero column");
            let y = m[k].scale(&Scalar::q_pow(s));
            if !ech.contains(&b0.residue(&y)?) {
                w = Witness {
                    vector: Some(y),
                    reason: format!("residue of this element of M ∩ L0 is not reached by E (dim E = {dim_e} < rank {r})"),
                };
                break;
            }
        }
        Some(w)
    } else if dim_e > r || coeff_rank(&res0, r) < dim_e {
        let k = Matrix::from_columns(r, &res0).kernel();
        Some(Witness {
            vector: k.first().map(|c| combine(c)),
            reason: format!("E → M ∩ L0 / M ∩ qL0 is not injective (dim E = {dim_e})"),
        })
    } else if coeff_rank(&resi, r) < dim_e {
        let k = Matrix::from_columns(r, &resi).kernel();
        Some(Witness { vector: k.first().map(|c| combine(c)), reason: "E → L∞ / q⁻¹L∞ is not injective".into() })
    } else {
        let det = Matrix::from_columns(r, &mcoef).det_fraction_free();
        (!(det.is_laurent() && det.num().is_monomial()))
            .then(|| Witness { vector: None, reason: format!("E does not span M over 𝔸 (determinant {det})") })
    };
    Ok(Balanced { weight: weight.clone(), rank: r, dim_e, certified: witness.is_none(), e_basis, witness })
}

/// `G(b)` with its certificates.
#[derive(Clone, Debug)]
pub struct GlobalEntry {
    pub vertex: usize,
    pub g: WeightVector,
    pub bar_invariant: bool,
    pub in_aform: bool,
    pub in_lattice: bool,
    pub residue_match: bool,
}

impl GlobalEntry {
    pub fn certified(&self) -> bool {
        self.bar_invariant && self.in_aform && self.in_lattice && self.residue_match
    }
}

/// The global basis at one weight.
#[derive(Clone, Debug)]
pub struct WeightGlobal {
    pub weight: RootVector,
    pub aform: Vec<WeightVector>,
    pub balanced: Balanced,
    pub entries: Vec<GlobalEntry>,
    /// `Σ_b 𝔸·G(b)` is the whole `𝔸`-form.
    pub unimodular: bool,
}

/// Global basis of `U⁻` or `V(λ)` up to a height bound.
pub struct GlobalBasis<A: Ambient> {
    crystal: Arc<Crystal<A>>,
    height: u32,
    weights: BTreeMap<RootVector, WeightGlobal>,
    by_vertex: BTreeMap<usize, (RootVector, usize)>,
}

fn solve_weight<A: Ambient>(crystal: &Crystal<A>, a: &RootVector, m: Vec<WeightVector>) -> Result<WeightGlobal> {
    let amb = crystal.ambient();
    let dim = amb.dim(a)?;
    let lat = crystal
        .lattice(a)
        .ok_or_else(|| Error::HeightBound { height: a.height(), bound: crystal.depth() })?;
    let linf: Vec<WeightVector> = lat.vectors.iter().map(|v| v.bar()).collect();
    let bal = balanced_check(a, dim, &m, &lat.vectors, &linf)?;
    let fmt = amb.datum().format_root(a);
    if !bal.certified {
        let why = bal.witness.as_ref().map_or(String::new(), |w| w.reason.clone());
        return Err(Error::NoSolution(format!("balanced triple not certified at height {}, weight {fmt}: {why}", a.height())));
    }
    let r = bal.rank;
    let res: Vec<Vec<Coeff>> = bal.e_basis.iter().map(|e| lat.residue(e)).collect::<Result<_>>()?;
    let rmat = if r == 0 { Matrix::zeros(0, 0) } else { Matrix::from_columns(r, &res) };
    let am = if r == 0 { None } else { Some(LatticeBasis::new(a.clone(), dim, m.iter().map(|v| v.coords.clone()).collect())?) };
    let mut entries = Vec::new();
    for &b in crystal.at(a) {
        let v = crystal.vertex(b);
        let y = rmat
            .solve(&v.residue)
            .ok_or_else(|| Error::NoSolution(format!("no bar-invariant lift of vertex {b} at weight {fmt}")))?;
        if rmat.rank() != r {
            return Err(Error::NonUnique(format!("lift of vertex {b} at weight {fmt}")));
        }
        let mut g = WeightVector::zero(a.clone(), dim);
        for (e, s) in bal.e_basis.iter().zip(&y) {
            if !s.is_zero() {
                g = g.add(&e.scale(&Scalar::constant(s.clone())));
            }
        }
        let in_aform = match &am {
            Some(am) => am.coordinates(&g)?.iter().all(|c| c.is_laurent()),
            None => g.is_zero(),
        };
        entries.push(GlobalEntry {
            vertex: b,
            bar_invariant: g.bar() == g,
            in_aform,
            in_lattice: lat.contains(&g)?,
            residue_match: lat.residue(&g)? == v.residue,
            g,
        });
    }
    let unimodular = match &am {
        None => entries.is_empty(),
        Some(am) if entries.len() == r => {
            let cols: Vec<Vec<Scalar>> = entries.iter().map(|e| am.coordinates(&e.g)).collect::<Result<_>>()?;
            let det = Matrix::from_columns(r, &cols).det_fraction_free();
            det.is_laurent() && det.num().is_monomial()
        }
        Some(_) => false,
    };
    Ok(WeightGlobal { weight: a.clone(), aform: m, balanced: bal, entries, unimodular })
}

impl<A: Ambient> GlobalBasis<A> {
    /// Solves height by height; weights of one height run in parallel and the
    /// first failure in weight order is reported.
    pub fn build(crystal: Arc<Crystal<A>>, height: u32, aform: impl Fn(&RootVector) -> Result<Vec<WeightVector>> + Sync) -> Result<Self> {
        if height > crystal.depth() {
            return Err(Error::HeightBound { height, bound: crystal.depth() });
        }
        let d = crystal.ambient().datum().clone();
        let mut weights = BTreeMap::new();
        let mut by_vertex = BTreeMap::new();
        for h in 0..=height {
            let roots = d.roots_of_height(h);
            let solved: Vec<Result<WeightGlobal>> = roots.par_iter().map(|a| solve_weight(&crystal, a, aform(a)?)).collect();
            for w in solved {
                let w = w?;
                for (k, e) in w.entries.iter().enumerate() {
                    by_vertex.insert(e.vertex, (w.weight.clone(), k));
                }
                weights.insert(w.weight.clone(), w);
            }
        }
        Ok(GlobalBasis { crystal, height, weights, by_vertex })
    }

    pub fn crystal(&self) -> &Arc<Crystal<A>> {
        &self.crystal
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn weights(&self) -> impl Iterator<Item = &WeightGlobal> {
        self.weights.values()
    }

    pub fn at(&self, a: &RootVector) -> Option<&WeightGlobal> {
        self.weights.get(a)
    }

    pub fn entry(&self, b: usize) -> Option<&GlobalEntry> {
        let (a, k) = self.by_vertex.get(&b)?;
        Some(&self.weights[a].entries[*k])
    }

    /// `G(b)`.
    pub fn g(&self, b: usize) -> Option<&WeightVector> {
        self.entry(b).map(|e| &e.g)
    }

    /// Rows per weight: vertex word, expansion over the named basis, certificates.
    pub fn to_json(&self, basis_names: impl Fn(&RootVector) -> Result<Vec<String>>) -> Result<Value> {
        let d = self.crystal.ambient().datum();
        let mut out = Vec::new();
        for w in self.weights.values() {
            let names = basis_names(&w.weight)?;
            let rows: Vec<Value> = w
                .entries
                .iter()
                .map(|e| {
                    let terms: Vec<Value> = e
                        .g
                        .coords
                        .iter()
                        .zip(&names)
                        .filter(|(c, _)| !c.is_zero())
                        .map(|(c, n)| json!([n, c.to_canonical_string()]))
                        .collect();
                    json!({
                        "vertex": e.vertex,
                        "word": self.crystal.word_string(&self.crystal.vertex(e.vertex).word),
                        "expansion": terms,
                        "bar_invariant": e.bar_invariant,
                        "in_aform": e.in_aform,
                        "in_lattice": e.in_lattice,
                        "residue_match": e.residue_match,
                    })
                })
                .collect();
            out.push(json!({
                "weight": d.format_root(&w.weight),
                "rank": w.balanced.rank,
                "certified": w.balanced.certified,
                "unimodular": w.unimodular,
                "entries": rows,
            }));
        }
        Ok(json!({"height": self.height, "weights": out}))
    }
}

/// The largest `n` with `ẽ_{il}ⁿ b ≠ 0`.
pub fn epsilon<A: Ambient>(crystal: &Crystal<A>, b: usize, i: usize, l: u32) -> Result<u32> {
    let amb = crystal.ambient();
    let mut x = crystal.vertex(b).rep.clone();
    let mut n = 0;
    while let Some(y) = e_tilde(&**amb, i, l, &x)? {
        let Some(lat) = crystal.lattice(&y.weight) else { break };
        if lat.residue(&y)?.iter().all(|c| c.is_zero()) {
            break;
        }
        n += 1;
        x = y;
    }
    Ok(n)
}

/// The triple `(N, ℒ ∩ W, ℒ̄ ∩ W)` for an `𝔸`-basis `n` of `N` with `W = span N`.
pub fn ideal_triple(lat: &LatticeBasis, dim: usize, n: &[WeightVector]) -> Result<Balanced> {
    let l0 = lattice_meet(lat, n)?;
    let linf = bar_lattice_meet(lat, n)?;
    balanced_check(&lat.weight, dim, n, &l0, &linf)
}
