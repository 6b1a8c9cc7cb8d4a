//! Crystal lattices `ℒ(∞)`, `ℒ(λ)` and the crystals `B(∞)`, `B(λ)` as
//! residues at `q = 0`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::ambient::{f_tilde, levels_within, Ambient, WeightVector};
use crate::cartan::RootVector;
use crate::error::{Error, Result};
use crate::highest_weight::VModule;
use crate::linalg::Matrix;
use crate::uminus::UMinus;
use crate::{Coeff, Scalar};

/// Column reduction over `𝔸₀`: returns an `𝔸₀`-basis of the span of `gens`.
///
/// Each step pivots on the entry of least `q`-order among all remaining
/// vectors, ties broken by coordinate and then by vector position.
pub fn dvr_reduce(gens: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    let mut rest: Vec<Vec<Scalar>> = gens.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
    let mut out = Vec::new();
    while !rest.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for (k, v) in rest.iter().enumerate() {
            for (c, x) in v.iter().enumerate() {
                if let Some(o) = x.ord0() {
                    let key = (o, c, k);
                    if best.is_none_or(|b| key < b) {
                        best = Some(key);
                    }
                }
            }
        }
        let (_, c, k) = best.expect("nonzero vectors remain");
        let p = rest.swap_remove(k);
        let pc = p[c].clone();
        for v in rest.iter_mut() {
            if v[c].is_zero() {
                continue;
            }
            let f = v[c].try_div(&pc).expect("nonzero pivot");
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

/// An `𝔸₀`-basis of a lattice at one weight.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    pub weight: RootVector,
    pub vectors: Vec<WeightVector>,
    rows: Vec<usize>,
    solve: Matrix<Scalar>,
}

impl LatticeBasis {
    pub fn new(weight: RootVector, dim: usize, vectors: Vec<Vec<Scalar>>) -> Result<Self> {
        let m = Matrix::from_columns(dim, &vectors);
        let rows = m.independent_rows();
        if rows.len() != vectors.len() {
            return Err(Error::Internal(format!("dependent lattice basis at {weight}")));
        }
        let solve = m
            .select_rows(&rows)
            .inverse()
            .ok_or_else(|| Error::Internal(format!("singular lattice block at {weight}")))?;
        let vectors = vectors.into_iter().map(|v| WeightVector::new(weight.clone(), v)).collect();
        Ok(LatticeBasis { weight, vectors, rows, solve })
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    /// Coordinates over the lattice basis; errors if `x` is outside the span.
    pub fn coordinates(&self, x: &WeightVector) -> Result<Vec<Scalar>> {
        let picked: Vec<Scalar> = self.rows.iter().map(|&r| x.coords[r].clone()).collect();
        let c = self.solve.mul_vec(&picked);
        let mut back = WeightVector::zero(self.weight.clone(), x.dim());
        for (v, s) in self.vectors.iter().zip(&c) {
            back = back.add(&v.scale(s));
        }
        if back != *x {
            return Err(Error::Internal(format!("vector outside the lattice span at {}", self.weight)));
        }
        Ok(c)
    }

    pub fn contains(&self, x: &WeightVector) -> Result<bool> {
        Ok(self.coordinates(x)?.iter().all(|c| c.is_regular_at_zero()))
    }

    /// The class of `x ∈ ℒ` in `ℒ/qℒ`, in lattice-basis coordinates.
    pub fn residue(&self, x: &WeightVector) -> Result<Vec<Coeff>> {
        self.coordinates(x)?
            .iter()
            .map(|c| c.value_at_zero().map_err(|_| Error::Internal(format!("vector outside the lattice at {}", self.weight))))
            .collect()
    }

    /// Whether `vs` is an `𝔸₀`-basis of the same lattice.
    pub fn same_lattice(&self, vs: &[WeightVector]) -> Result<bool> {
        if vs.len() != self.rank() {
            return Ok(false);
        }
        let cols: Vec<Vec<Scalar>> = vs.iter().map(|v| self.coordinates(v)).collect::<Result<_>>()?;
        if cols.iter().flatten().any(|c| !c.is_regular_at_zero()) {
            return Ok(false);
        }
        let det = Matrix::from_columns(self.rank(), &cols).det_fraction_free();
        Ok(!det.is_zero() && det.ord0() == Some(0))
    }
}

/// `f̃`-words are listed with the last applied operator first.
pub type KWord = Vec<(usize, u32)>;

#[derive(Clone, Debug)]
pub struct Vertex {
    pub id: usize,
    pub weight: RootVector,
    pub word: KWord,
    pub residue: Vec<Coeff>,
    /// The vector `f̃_{word} 𝟏` itself.
    pub rep: WeightVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub i: usize,
    pub l: u32,
}

/// The crystal of a module up to a height bound.
pub struct Crystal<A: Ambient> {
    amb: Arc<A>,
    depth: u32,
    lattices: BTreeMap<RootVector, LatticeBasis>,
    vertices: Vec<Vertex>,
    by_weight: BTreeMap<RootVector, Vec<usize>>,
    edges: Vec<Edge>,
}

struct Candidate {
    residue: Vec<Coeff>,
    rep: WeightVector,
    word: KWord,
    from: usize,
    i: usize,
    l: u32,
}

impl<A: Ambient> Crystal<A> {
    /// Breadth-first construction from the highest vector.
    pub fn build(amb: Arc<A>, depth: u32) -> Result<Self> {
        let d = amb.datum().clone();
        let zero = d.zero_root();
        let top = amb.highest();
        let mut c = Crystal {
            amb: amb.clone(),
            depth,
            lattices: BTreeMap::new(),
            vertices: Vec::new(),
            by_weight: BTreeMap::new(),
            edges: Vec::new(),
        };
        c.lattices.insert(zero.clone(), LatticeBasis::new(zero.clone(), 1, vec![top.coords.clone()])?);
        c.vertices.push(Vertex { id: 0, weight: zero.clone(), word: Vec::new(), residue: vec![Coeff::from_int(1)], rep: top });
        c.by_weight.insert(zero, vec![0]);
        for h in 1..=depth {
            let weights = d.roots_of_height(h);
            let built: Vec<(LatticeBasis, Vec<Candidate>)> =
                weights.par_iter().map(|a| c.build_weight(a)).collect::<Result<_>>()?;
            for (lat, cands) in built {
                let a = lat.weight.clone();
                let mut seen: HashMap<Vec<Coeff>, usize> = HashMap::new();
                let mut ids = Vec::new();
                for cand in cands {
                    let id = match seen.get(&cand.residue) {
                        Some(&id) => id,
                        None => {
                            let id = c.vertices.len();
                            seen.insert(cand.residue.clone(), id);
                            ids.push(id);
                            c.vertices.push(Vertex { id, weight: a.clone(), word: cand.word, residue: cand.residue, rep: cand.rep });
                            id
                        }
                    };
                    c.edges.push(Edge { from: cand.from, to: id, i: cand.i, l: cand.l });
                }
                c.by_weight.insert(a.clone(), ids);
                c.lattices.insert(a, lat);
            }
        }
        c.edges.sort();
        Ok(c)
    }

    fn build_weight(&self, a: &RootVector) -> Result<(LatticeBasis, Vec<Candidate>)> {
        let n = self.amb.dim(a)?;
        let mut gens = Vec::new();
        let mut cands = Vec::new();
        for (i, l) in levels_within(self.amb.datum(), a) {
            let src = a.sub_simple(i, l).expect("level within weight");
            for v in &self.lattices[&src].vectors {
                gens.push(f_tilde(&*self.amb, i, l, v)?.coords);
            }
        }
        let lat = LatticeBasis::new(a.clone(), n, dvr_reduce(gens))?;
        for (i, l) in levels_within(self.amb.datum(), a) {
            let src = a.sub_simple(i, l).expect("level within weight");
            for &b in &self.by_weight[&src] {
                let x = f_tilde(&*self.amb, i, l, &self.vertices[b].rep)?;
                let residue = lat.residue(&x)?;
                if residue.iter().all(|r| r.is_zero()) {
                    continue;
                }
                let mut word = vec![(i, l)];
                word.extend(&self.vertices[b].word);
                cands.push(Candidate { residue, rep: x, word, from: b, i, l });
            }
        }
        Ok((lat, cands))
    }

    pub fn ambient(&self) -> &Arc<A> {
        &self.amb
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn lattice(&self, a: &RootVector) -> Option<&LatticeBasis> {
        self.lattices.get(a)
    }

    pub fn weights(&self) -> impl Iterator<Item = &RootVector> {
        self.by_weight.keys()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn at(&self, a: &RootVector) -> &[usize] {
        self.by_weight.get(a).map_or(&[], |v| v.as_slice())
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// The vertex with the given residue at weight `a`.
    pub fn find(&self, a: &RootVector, residue: &[Coeff]) -> Option<usize> {
        self.at(a).iter().copied().find(|&b| self.vertices[b].residue == residue)
    }

    /// `( , )⁰` on the vertices at `a`.
    pub fn q0_gram(&self, a: &RootVector) -> Result<Matrix<Coeff>> {
        let ids = self.at(a);
        let mut rows = Vec::with_capacity(ids.len());
        for &x in ids {
            let mut row = Vec::with_capacity(ids.len());
            for &y in ids {
                let s = self.amb.pair(&self.vertices[x].rep, &self.vertices[y].rep)?;
                row.push(s.value_at_zero()?);
            }
            rows.push(row);
        }
        Ok(Matrix::from_rows(rows))
    }

    /// The exact form on the lattice basis at `a`.
    pub fn lattice_gram(&self, a: &RootVector) -> Result<Matrix<Scalar>> {
        let lat = &self.lattices[a];
        let rows = lat
            .vectors
            .iter()
            .map(|x| lat.vectors.iter().map(|y| self.amb.pair(x, y)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix::from_rows(rows))
    }

    pub fn word_string(&self, w: &KWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let d = self.amb.datum();
        w.iter().map(|&(i, l)| format!("f({},{l})", d.name(i))).collect::<Vec<_>>().join(" ")
    }

    pub fn to_dot(&self, name: &str) -> String {
        let d = self.amb.datum();
        let mut s = format!("digraph \"{name}\" {{\n");
        for v in &self.vertices {
            s.push_str(&format!("  v{} [label=\"{}\"];\n", v.id, self.word_string(&v.word)));
        }
        for e in &self.edges {
            s.push_str(&format!("  v{} -> v{} [label=\"({},{})\"];\n", e.from, e.to, d.name(e.i), e.l));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Value {
        let d = self.amb.datum();
        let weights: Vec<Value> = self
            .by_weight
            .iter()
            .map(|(a, ids)| {
                let vs: Vec<Value> = ids
                    .iter()
                    .map(|&b| {
                        let v = &self.vertices[b];
                        json!({
                            "id": b,
                            "word": self.word_string(&v.word),
                            "residue": v.residue.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                json!({"weight": d.format_root(a), "vertices": vs})
            })
            .collect();
        let edges: Vec<Value> = self.edges.iter().map(|e| json!([e.from, e.to, d.name(e.i), e.l])).collect();
        json!({"depth": self.depth, "weights": weights, "edges": edges})
    }
}

/// `π̄_λ(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PiBar {
    Zero,
    Vertex(usize),
    /// A nonzero residue that is not a vertex of `B(λ)`.
    Stray(Vec<Coeff>),
}

pub fn pi_bar(binf: &Crystal<UMinus>, blam: &Crystal<VModule>, b: usize) -> Result<PiBar> {
    let v = binf.vertex(b);
    let x = blam.ambient().project(&v.rep)?;
    let Some(lat) = blam.lattice(&v.weight) else {
        return Err(Error::HeightBound { height: v.weight.height(), bound: blam.depth() });
    };
    let r = lat.residue(&x)?;
    if r.iter().all(|c| c.is_zero()) {
        return Ok(PiBar::Zero);
    }
    Ok(match blam.find(&v.weight, &r) {
        Some(id) => PiBar::Vertex(id),
        None => PiBar::Stray(r),
    })
}
