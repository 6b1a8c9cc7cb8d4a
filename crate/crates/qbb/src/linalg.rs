//! Dense exact linear algebra over any [`Field`].

use std::fmt;

use num_traits::{One, Zero};

use crate::scalar::{poly, Field};
use crate::{Laurent, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Builds an `rows × columns.len()` matrix from column vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, x) in col.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: F) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = o.get(k, c);
                    if !b.is_zero() {
                        let v = m.get(r, c).clone() + a.clone() * b.clone();
                        m.set(r, c, v);
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = F::zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc + a.clone() * b.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Matrix<F> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix<F> {
        Matrix::from_rows(idx.iter().map(|&r| self.row(r).to_vec()).collect()).with_cols(self.cols)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix<F> {
        let mut m = Self::zeros(self.rows, idx.len());
        for r in 0..self.rows {
            for (k, &c) in idx.iter().enumerate() {
                m.set(r, k, self.get(r, c).clone());
            }
        }
        m
    }

    fn with_cols(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }

    pub fn hstack(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.rows, o.rows);
        let mut m = Self::zeros(self.rows, self.cols + o.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.get(r, c).clone());
            }
            for c in 0..o.cols {
                m.set(r, self.cols + c, o.get(r, c).clone());
            }
        }
        m
    }

    pub fn vstack(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduced row echelon form; pivot columns are returned in row order.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows).filter(|&k| !m.get(k, c).is_zero()).min_by_key(|&k| m.get(k, c).cost());
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for k in c..m.cols {
                let v = m.get(r, k).clone() * inv.clone();
                m.set(r, k, v);
            }
            for k in 0..m.rows {
                if k == r || m.get(k, c).is_zero() {
                    continue;
                }
                let f = m.get(k, c).clone();
                for j in c..m.cols {
                    let x = m.get(r, j);
                    if !x.is_zero() {
                        let v = m.get(k, j).clone() - f.clone() * x.clone();
                        m.set(k, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{x : Mx = 0}`.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (m, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some solution of `Mx = b`, if one exists.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        let rhs = Matrix::from_columns(self.rows, &[b.to_vec()]);
        self.solve_many(&rhs).map(|x| x.column(0))
    }

    /// Some solution of `MX = B`, if one exists.
    pub fn solve_many(&self, b: &Matrix<F>) -> Option<Matrix<F>> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b);
        let (m, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (r, &p) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                x.set(p, c, m.get(r, self.cols + c).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let (m, pivots) = self.hstack(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, m.get(r, n + c).clone());
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> F {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let mut m = self.clone();
        let n = self.rows;
        let mut det = F::one();
        for c in 0..n {
            let best = (c..n).filter(|&k| !m.get(k, c).is_zero()).min_by_key(|&k| m.get(k, c).cost());
            let Some(p) = best else { return F::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det = det * piv.clone();
            let inv = piv.inv().expect("nonzero pivot");
            for k in c + 1..n {
                if m.get(k, c).is_zero() {
                    continue;
                }
                let f = m.get(k, c).clone() * inv.clone();
                for j in c..n {
                    let v = m.get(k, j).clone() - f.clone() * m.get(c, j).clone();
                    m.set(k, j, v);
                }
            }
        }
        det
    }

    /// Greedy maximal set of linearly independent rows, in index order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let mut ech = Echelon::new(self.cols);
        (0..self.rows).filter(|&r| ech.insert(self.row(r).to_vec())).collect()
    }

    pub fn independent_columns(&self) -> Vec<usize> {
        self.transpose().independent_rows()
    }
}

impl Matrix<Scalar> {
    /// Determinant by fraction-free elimination on cleared rows; much cheaper
    /// than [`Matrix::det`] when the entries have large denominators.
    pub fn det_fraction_free(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Scalar::one();
        }
        let mut dens = Vec::with_capacity(n);
        let mut m: Vec<Vec<Laurent>> = Vec::with_capacity(n);
        for r in 0..n {
            let mut l: Vec<crate::Coeff> = vec![crate::Coeff::one()];
            for x in self.row(r) {
                if x.den().len() > 1 {
                    let g = poly::gcd(&l, x.den());
                    l = poly::mul(&l, &poly::exact_div(x.den(), &g));
                }
            }
            let lp = Laurent::new(0, l);
            let row = self.row(r).iter().map(|x| (x * &Scalar::from(lp.clone())).as_laurent().expect("cleared row").clone()).collect();
            dens.push(lp);
            m.push(row);
        }
        let mut sign = false;
        let mut prev = Laurent::constant(crate::Coeff::one());
        for c in 0..n {
            let Some(p) = (c..n).find(|&k| !m[k][c].is_zero()) else { return Scalar::zero() };
            if p != c {
                m.swap(p, c);
                sign = !sign;
            }
            for k in c + 1..n {
                for j in c + 1..n {
                    let v = &(&m[k][j] * &m[c][c]) - &(&m[k][c] * &m[c][j]);
                    m[k][j] = laurent_exact_div(&v, &prev);
                }
                m[k][c] = Laurent::zero();
            }
            prev = m[c][c].clone();
        }
        let mut det = Scalar::from(m[n - 1][n - 1].clone());
        if sign {
            det = -det;
        }
        let d = dens.iter().fold(Laurent::constant(crate::Coeff::one()), |a, b| &a * b);
        det.try_div(&Scalar::from(d)).expect("nonzero denominator")
    }
}

fn laurent_exact_div(a: &Laurent, b: &Laurent) -> Laurent {
    if a.is_zero() {
        return Laurent::zero();
    }
    Laurent::new(a.low() - b.low(), poly::exact_div(a.coeffs(), b.coeffs()))
}

/// Incrementally maintained row echelon basis of a subspace of `F^n`.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    dim: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> Echelon<F> {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reduce(&self, mut v: Vec<F>) -> Vec<F> {
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        v
    }

    /// The stored echelon rows.
    pub fn basis(&self) -> Vec<Vec<F>> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Vec<F>) -> bool {
        assert_eq!(v.len(), self.dim);
        let r = self.reduce(v);
        let Some(p) = (0..self.dim).filter(|&k| !r[k].is_zero()).min_by_key(|&k| r[k].cost()) else {
            return false;
        };
        let inv = r[p].inv().expect("nonzero pivot");
        let r: Vec<F> = r.into_iter().map(|x| x * inv.clone()).collect();
        self.rows.push((p, r));
        true
    }
}
