//! Dense exact linear algebra: matrices, reduced row-echelon forms, kernels,
//! solving, subspaces and quotient coordinates.
//!
//! All echelon forms are the unique reduced row-echelon forms, so every basis
//! derived from them is canonical and runs are reproducible.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Result of [`KMatrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref<F> {
    pub rank: usize,
    pub reduced: KMatrix<F>,
    pub pivot_cols: Vec<usize>,
}

impl<F: Field> KMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        KMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!("row {i} has length {}, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(KMatrix { rows: n, cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(rows: usize, cols: &[Vec<F>]) -> Result<Self> {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::Shape(format!("column {j} has length {}, expected {rows}", c.len())));
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let pivot_cols = m.reduce_in_place(None);
        Rref { rank: pivot_cols.len(), reduced: m, pivot_cols }
    }

    /// Gauss-Jordan elimination in place; row operations are mirrored on
    /// `shadow` when given. Returns the pivot columns.
    fn reduce_in_place(&mut self, mut shadow: Option<&mut KMatrix<F>>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(p, r);
            if let Some(s) = shadow.as_deref_mut() {
                s.swap_rows(p, r);
            }
            let inv = self[(r, c)].inv().expect("nonzero pivot");
            self.scale_row(r, &inv);
            if let Some(s) = shadow.as_deref_mut() {
                s.scale_row(r, &inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    self.axpy_row(i, r, &f);
                    if let Some(s) = shadow.as_deref_mut() {
                        s.axpy_row(i, r, &f);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, f: &F) {
        for x in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *x *= f.clone();
        }
    }

    /// row_i -= f * row_src
    fn axpy_row(&mut self, i: usize, src: usize, f: &F) {
        for j in 0..self.cols {
            let s = self.data[src * self.cols + j].clone();
            if !s.is_zero() {
                self.data[i * self.cols + j] -= f.clone() * s;
            }
        }
    }

    /// Basis of the right kernel `{x : A x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let Rref { reduced, pivot_cols, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivot_cols {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![F::zero(); self.cols];
                v[free] = F::one();
                for (k, &p) in pivot_cols.iter().enumerate() {
                    v[p] = -reduced[(k, free)].clone();
                }
                v
            })
            .collect()
    }

    /// Some `x` with `A x = b`, free variables set to zero; `None` if the
    /// system is inconsistent.
    pub fn solve(&self, b: &[F]) -> Result<Option<Vec<F>>> {
        if b.len() != self.rows {
            return Err(Error::Shape(format!("{} rows but right-hand side of length {}", self.rows, b.len())));
        }
        Ok(LinearSolver::new(self).solve(b))
    }
}

impl<F> Index<(usize, usize)> for KMatrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for KMatrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    let mut s = F::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x.clone() * y.clone();
        }
    }
    s
}

pub fn is_zero_vec<F: Field>(v: &[F]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// `y += c * x`
pub fn axpy<F: Field>(y: &mut [F], c: &F, x: &[F]) {
    if c.is_zero() {
        return;
    }
    for (a, b) in y.iter_mut().zip(x) {
        if !b.is_zero() {
            *a += c.clone() * b.clone();
        }
    }
}

pub fn scaled<F: Field>(c: &F, x: &[F]) -> Vec<F> {
    x.iter().map(|v| c.clone() * v.clone()).collect()
}

pub fn unit_vec<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

/// Solves `A x = b` repeatedly for a fixed `A`.
///
/// Stores the row operations `E` with `E A = rref(A)`, so each solve costs a
/// matrix-vector product.
#[derive(Clone, Debug)]
pub struct LinearSolver<F> {
    cols: usize,
    transform: KMatrix<F>,
    pivot_cols: Vec<usize>,
}

impl<F: Field> LinearSolver<F> {
    pub fn new(a: &KMatrix<F>) -> Self {
        let mut m = a.clone();
        let mut e = KMatrix::identity(a.rows);
        let pivot_cols = m.reduce_in_place(Some(&mut e));
        LinearSolver { cols: a.cols, transform: e, pivot_cols }
    }

    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        let y = self.transform.mul_vec(b).expect("solver shape");
        if y[self.rank()..].iter().any(|v| !v.is_zero()) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (k, &p) in self.pivot_cols.iter().enumerate() {
            x[p] = y[k].clone();
        }
        Some(x)
    }
}

/// A linear subspace of `k^n`, stored by its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: (0..ambient).map(|i| unit_vec(ambient, i)).collect(), pivots: (0..ambient).collect() }
    }

    pub fn span<I>(ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<F>>,
    {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` modulo the subspace: zero exactly on pivot columns.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.ambient);
        let mut v = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if !v[p].is_zero() {
                let c = -v[p].clone();
                axpy(&mut v, &c, row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// Adds `v` to the span, keeping the basis in reduced echelon form.
    /// Returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<F>) -> bool {
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero");
        for x in v.iter_mut() {
            *x *= inv.clone();
        }
        for row in self.basis.iter_mut() {
            if !row[p].is_zero() {
                let c = -row[p].clone();
                axpy(row, &c, &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, v);
        true
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut s = self.clone();
        for v in &other.basis {
            s.insert(v.clone());
        }
        s
    }

    /// Coordinates of `v` in the echelon basis; `None` if `v` is outside.
    pub fn coords(&self, v: &[F]) -> Option<Vec<F>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Columns that are not pivots, i.e. the standard complement.
    pub fn non_pivots(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Coordinates on `U / V` for subspaces `V ⊆ U`.
///
/// The complement of `V` in `U` is spanned by the echelon rows of `U` whose
/// pivots are not pivots of `V`; the coordinates of `v + V` are the entries of
/// `v mod V` at those columns.
#[derive(Clone, Debug)]
pub struct QuotientMap<F> {
    outer: Subspace<F>,
    inner: Subspace<F>,
    complement_pivots: Vec<usize>,
}

impl<F: Field> QuotientMap<F> {
    pub fn new(outer: Subspace<F>, inner: Subspace<F>) -> Result<Self> {
        if outer.ambient != inner.ambient {
            return Err(Error::Shape(format!("ambient dimensions {} and {}", outer.ambient, inner.ambient)));
        }
        if !outer.contains_subspace(&inner) {
            return Err(Error::Invalid("quotient by a subspace that is not contained in the ambient one".into()));
        }
        let complement_pivots = outer.pivots.iter().copied().filter(|p| inner.pivots.binary_search(p).is_err()).collect();
        Ok(QuotientMap { outer, inner, complement_pivots })
    }

    pub fn dim(&self) -> usize {
        self.complement_pivots.len()
    }

    pub fn outer(&self) -> &Subspace<F> {
        &self.outer
    }

    pub fn inner(&self) -> &Subspace<F> {
        &self.inner
    }

    pub fn complement_pivots(&self) -> &[usize] {
        &self.complement_pivots
    }

    /// Representative in `U` of the `q`-th complement basis vector.
    pub fn complement_vector(&self, q: usize) -> Vec<F> {
        let p = self.complement_pivots[q];
        let k = self.outer.pivots.binary_search(&p).expect("pivot of outer");
        self.outer.basis[k].clone()
    }

    pub fn coords(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.outer.ambient {
            return Err(Error::Shape(format!("vector of length {} in ambient {}", v.len(), self.outer.ambient)));
        }
        if !self.outer.contains(v) {
            return Err(Error::NotInSubspace);
        }
        Ok(self.coords_unchecked(v))
    }

    /// As [`coords`](Self::coords) but trusts that `v ∈ U`.
    pub fn coords_unchecked(&self, v: &[F]) -> Vec<F> {
        let r = self.inner.reduce(v);
        self.complement_pivots.iter().map(|&p| r[p].clone()).collect()
    }

    /// `Σ c_q · complement_q`
    pub fn lift(&self, coords: &[F]) -> Vec<F> {
        let mut v = vec![F::zero(); self.outer.ambient];
        for (q, c) in coords.iter().enumerate() {
            axpy(&mut v, c, &self.complement_vector(q));
        }
        v
    }
}

/// Coordinates of `v + V` in the canonical complement basis of `V` in `U`.
pub fn quotient_coords<F: Field>(u: &Subspace<F>, v_sub: &Subspace<F>, v: &[F]) -> Result<Vec<F>> {
    QuotientMap::new(u.clone(), v_sub.clone())?.coords(v)
}
