//! Borcherds-Cartan data, root vectors and dominant weights.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::parse::Cursor;
use crate::scalar::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexKind {
    Real,
    Imaginary,
    Isotropic,
}

/// An even symmetrizable Borcherds-Cartan matrix with named indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BorcherdsCartanDatum {
    pub indices: Vec<String>,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
}

impl BorcherdsCartanDatum {
    /// Builds and validates a datum.
    pub fn new(indices: Vec<String>, cartan: Vec<Vec<i64>>, symmetrizer: Vec<i64>) -> Result<Self> {
        let d = BorcherdsCartanDatum { indices, cartan, symmetrizer };
        d.validate()?;
        Ok(d)
    }

    /// Rank-1 datum with index `i`.
    pub fn rank_one(a: i64) -> Result<Self> {
        Self::new(vec!["i".into()], vec![vec![a]], vec![1])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.indices.len();
        if n == 0 {
            return Err(Error::InvalidDatum("empty index set".into()));
        }
        if self.cartan.len() != n || self.cartan.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDatum(format!("Cartan matrix must be {n}x{n}")));
        }
        if self.symmetrizer.len() != n {
            return Err(Error::InvalidDatum(format!("symmetrizer must have {n} entries")));
        }
        for (k, name) in self.indices.iter().enumerate() {
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(Error::InvalidDatum(format!("bad index name {name:?}")));
            }
            if self.indices[..k].contains(name) {
                return Err(Error::InvalidDatum(format!("duplicate index {name}")));
            }
        }
        for i in 0..n {
            let a = self.cartan[i][i];
            if !(a == 2 || (a <= 0 && a % 2 == 0)) {
                return Err(Error::InvalidDatum(format!(
                    "condition (i): a_{0}{0} = {a} is not in {{2, 0, -2, -4, ...}}",
                    self.indices[i]
                )));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.cartan[i][j] > 0 {
                    return Err(Error::InvalidDatum(format!(
                        "condition (ii): a_{}{} = {} > 0",
                        self.indices[i], self.indices[j], self.cartan[i][j]
                    )));
                }
            }
        }
        for i in 0..n {
            if self.symmetrizer[i] <= 0 {
                return Err(Error::InvalidDatum(format!(
                    "condition (iii): r_{} = {} is not positive",
                    self.indices[i], self.symmetrizer[i]
                )));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if self.symmetrizer[i] * self.cartan[i][j] != self.symmetrizer[j] * self.cartan[j][i] {
                    return Err(Error::InvalidDatum(format!(
                        "condition (iii): DA is not symmetric at ({}, {})",
                        self.indices[i], self.indices[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.indices.iter().position(|x| x == name).ok_or_else(|| Error::UnknownIndex(name.to_string()))
    }

    pub fn name(&self, i: usize) -> &str {
        &self.indices[i]
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.cartan[i][j]
    }

    pub fn r(&self, i: usize) -> i64 {
        self.symmetrizer[i]
    }

    pub fn kind(&self, i: usize) -> IndexKind {
        match self.cartan[i][i] {
            2 => IndexKind::Real,
            0 => IndexKind::Isotropic,
            _ => IndexKind::Imaginary,
        }
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.kind(i) == IndexKind::Real
    }

    /// True for every index with `a_ii ≤ 0`, isotropic ones included.
    pub fn is_imaginary(&self, i: usize) -> bool {
        !self.is_real(i)
    }

    pub fn is_isotropic(&self, i: usize) -> bool {
        self.kind(i) == IndexKind::Isotropic
    }

    /// `(α_i, α_j) = r_i a_ij`.
    pub fn sym(&self, i: usize, j: usize) -> i64 {
        self.symmetrizer[i] * self.cartan[i][j]
    }

    /// Exponent `e` with `q_(i) = q^e`.
    pub fn q_paren_exp(&self, i: usize) -> i64 {
        self.sym(i, i) / 2
    }

    /// `(α, β)` extended bilinearly.
    pub fn pairing(&self, a: &RootVector, b: &RootVector) -> i64 {
        let mut s = 0;
        for i in 0..self.rank() {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.rank() {
                s += a.0[i] as i64 * b.0[j] as i64 * self.sym(i, j);
            }
        }
        s
    }

    /// `(α_i, β)`.
    pub fn pairing_simple(&self, i: usize, b: &RootVector) -> i64 {
        (0..self.rank()).map(|j| self.sym(i, j) * b.0[j] as i64).sum()
    }

    /// `⟨h_i, β⟩ = Σ_j a_ij β_j`.
    pub fn coroot(&self, i: usize, b: &RootVector) -> i64 {
        (0..self.rank()).map(|j| self.cartan[i][j] * b.0[j] as i64).sum()
    }

    /// `⟨h_i, λ − β⟩`.
    pub fn coroot_shifted(&self, i: usize, lambda: &DominantWeight, b: &RootVector) -> i64 {
        lambda.0[i] as i64 - self.coroot(i, b)
    }

    pub fn zero_root(&self) -> RootVector {
        RootVector(vec![0; self.rank()])
    }

    pub fn simple(&self, i: usize, l: u32) -> RootVector {
        let mut v = vec![0; self.rank()];
        v[i] = l;
        RootVector(v)
    }

    /// All root vectors of the given height, in lexicographic order.
    pub fn roots_of_height(&self, h: u32) -> Vec<RootVector> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.rank()];
        fn go(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<RootVector>) {
            if k + 1 == cur.len() {
                cur[k] = left;
                out.push(RootVector(cur.clone()));
                return;
            }
            for x in (0..=left).rev() {
                cur[k] = x;
                go(k + 1, left - x, cur, out);
            }
        }
        go(0, h, &mut cur, &mut out);
        out
    }

    /// Parses `2*i,1*j` (a bare `i` means `1*i`).
    pub fn parse_root(&self, src: &str) -> Result<RootVector> {
        let mut cur = Cursor::new(src);
        let mut v = vec![0u32; self.rank()];
        if cur.at_end() {
            return Ok(RootVector(v));
        }
        loop {
            let k = if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
                let k = cur.small_integer()?;
                if !cur.eat('*') {
                    return Err(cur.error("expected '*'").into());
                }
                k
            } else {
                1
            };
            let at = cur.error("");
            let name = cur.identifier()?;
            let i = self.index_of(&name).map_err(|_| ParseError { message: format!("unknown index '{name}'"), ..at })?;
            v[i] += u32::try_from(k).map_err(|_| cur.error("coefficient out of range"))?;
            if cur.at_end() {
                break;
            }
            if !cur.eat(',') {
                return Err(cur.error("expected ','").into());
            }
        }
        Ok(RootVector(v))
    }

    /// Parses `i=1,j=0`; unnamed indices default to 0.
    pub fn parse_lambda(&self, src: &str) -> Result<DominantWeight> {
        let mut cur = Cursor::new(src);
        let mut v = vec![0u32; self.rank()];
        if cur.at_end() {
            return Ok(DominantWeight(v));
        }
        loop {
            let at = cur.error("");
            let name = cur.identifier()?;
            let i = self.index_of(&name).map_err(|_| ParseError { message: format!("unknown index '{name}'"), ..at })?;
            if !cur.eat('=') {
                return Err(cur.error("expected '='").into());
            }
            let k = cur.small_integer()?;
            v[i] = u32::try_from(k).map_err(|_| cur.error("value out of range"))?;
            if cur.at_end() {
                break;
            }
            if !cur.eat(',') {
                return Err(cur.error("expected ','").into());
            }
        }
        Ok(DominantWeight(v))
    }

    pub fn format_root(&self, a: &RootVector) -> String {
        let parts: Vec<String> = a
            .0
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, k)| format!("{k}*{}", self.indices[i]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(",")
        }
    }

    pub fn format_lambda(&self, l: &DominantWeight) -> String {
        l.0.iter().enumerate().map(|(i, k)| format!("{}={k}", self.indices[i])).collect::<Vec<_>>().join(",")
    }
}

/// An element of `Q₊`, stored by index position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVector(pub Vec<u32>);

impl RootVector {
    pub fn height(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, o: &RootVector) -> Option<RootVector> {
        self.0.iter().zip(&o.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(RootVector)
    }

    pub fn add_simple(&self, i: usize, l: u32) -> RootVector {
        let mut v = self.clone();
        v.0[i] += l;
        v
    }

    pub fn sub_simple(&self, i: usize, l: u32) -> Option<RootVector> {
        let mut v = self.clone();
        v.0[i] = v.0[i].checked_sub(l)?;
        Some(v)
    }

    /// Support is a single index.
    pub fn single_index(&self) -> Option<usize> {
        let nz: Vec<usize> = (0..self.0.len()).filter(|&k| self.0[k] > 0).collect();
        (nz.len() == 1).then(|| nz[0])
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// `λ ∈ P⁺`, stored as the values `⟨h_i, λ⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DominantWeight(pub Vec<u32>);

impl DominantWeight {
    pub fn uniform(rank: usize, k: u32) -> Self {
        DominantWeight(vec![k; rank])
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }
}
