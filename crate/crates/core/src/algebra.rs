//! Finite-dimensional associative unital algebras given by structure
//! constants, and matrices over them.
//!
//! A homomorphism of free left modules `R^a → R^b` is an `a × b` matrix `M`
//! acting on row vectors from the right, `x ↦ x·M`. Right multiplication by a
//! matrix commutes with left scalar multiplication, so these are exactly the
//! left-module maps. Applying `M` and then `N` is `M.mul(N)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{axpy, is_zero_vec, unit_vec, KMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Algebra<F> {
    dim: usize,
    labels: Vec<String>,
    unit: Vec<F>,
    /// `table[i * dim + j]` holds `e_i · e_j` in the basis.
    table: Vec<Vec<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraElement<F> {
    pub coeffs: Vec<F>,
}

impl<F: Field> Algebra<F> {
    /// Builds an algebra and checks associativity and the unit laws.
    pub fn new(labels: Vec<String>, unit: Vec<F>, table: Vec<Vec<F>>) -> Result<Self> {
        let alg = Self::new_unchecked(labels, unit, table)?;
        alg.validate()?;
        Ok(alg)
    }

    /// Shape checks only.
    pub fn new_unchecked(labels: Vec<String>, unit: Vec<F>, table: Vec<Vec<F>>) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 {
            return Err(Error::Algebra("zero-dimensional algebra".into()));
        }
        if unit.len() != dim {
            return Err(Error::Shape(format!("unit has length {}, expected {dim}", unit.len())));
        }
        if table.len() != dim * dim {
            return Err(Error::Shape(format!("multiplication table has {} entries, expected {}", table.len(), dim * dim)));
        }
        if let Some(k) = table.iter().position(|v| v.len() != dim) {
            return Err(Error::Shape(format!("product e{}·e{} has wrong length", k / dim, k % dim)));
        }
        Ok(Algebra { dim, labels, unit, table })
    }

    /// `k[x]/(x^m)` with basis `1, x, …, x^{m-1}`.
    pub fn truncated_poly(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Invalid("truncated_poly needs m ≥ 1".into()));
        }
        let labels = (0..m)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            })
            .collect();
        let mut table = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                table.push(if i + j < m { unit_vec(m, i + j) } else { vec![F::zero(); m] });
            }
        }
        Self::new_unchecked(labels, unit_vec(m, 0), table)
    }

    /// Exhaustive check of associativity and the unit laws over basis
    /// triples; reports the first violation.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            let ei = unit_vec(n, i);
            if self.mul(&self.unit, &ei) != ei || self.mul(&ei, &self.unit) != ei {
                return Err(Error::Algebra(format!("unit law fails on basis element {}", self.labels[i])));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let ij = &self.table[i * n + j];
                for l in 0..n {
                    let left = self.mul(ij, &unit_vec(n, l));
                    let jl = &self.table[j * n + l];
                    let right = self.mul(&unit_vec(n, i), jl);
                    if left != right {
                        return Err(Error::Algebra(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[i], self.labels[j], self.labels[l]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &[F] {
        &self.unit
    }

    pub fn table(&self) -> &[Vec<F>] {
        &self.table
    }

    pub fn product(&self, i: usize, j: usize) -> &[F] {
        &self.table[i * self.dim + j]
    }

    pub fn zero(&self) -> Vec<F> {
        vec![F::zero(); self.dim]
    }

    /// Product of two coefficient vectors.
    pub fn mul(&self, a: &[F], b: &[F]) -> Vec<F> {
        let mut out = self.zero();
        self.mul_acc(&mut out, a, b);
        out
    }

    /// `out += a·b`
    pub fn mul_acc(&self, out: &mut [F], a: &[F], b: &[F]) {
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                axpy(out, &(x.clone() * y.clone()), &self.table[i * self.dim + j]);
            }
        }
    }

    /// Matrix of `x ↦ a·x` acting on coefficient columns.
    pub fn left_mul_matrix(&self, a: &[F]) -> KMatrix<F> {
        let cols: Vec<Vec<F>> = (0..self.dim).map(|j| self.mul(a, &unit_vec(self.dim, j))).collect();
        KMatrix::from_cols(self.dim, &cols).expect("square")
    }

    /// True when the unit is the first basis vector and the remaining basis
    /// vectors span a nilpotent two-sided ideal. Such an algebra is local
    /// with residue field `k`.
    pub fn check_local(&self) -> Result<()> {
        let n = self.dim;
        if self.unit != unit_vec(n, 0) {
            return Err(Error::NotLocal("first basis element is not the unit".into()));
        }
        for i in 1..n {
            for j in 0..n {
                if !self.product(i, j)[0].is_zero() || !self.product(j, i)[0].is_zero() {
                    return Err(Error::NotLocal(format!(
                        "span of {}.. is not an ideal ({}·{})",
                        self.labels.get(1).map_or("", |s| s),
                        self.labels[i],
                        self.labels[j]
                    )));
                }
            }
        }
        // rad^n = 0: multiply the radical by itself n times
        let mut power: Vec<Vec<F>> = (1..n).map(|i| unit_vec(n, i)).collect();
        for _ in 0..n {
            let mut next = crate::linalg::Subspace::zero(n);
            for v in &power {
                for i in 1..n {
                    next.insert(self.mul(v, &unit_vec(n, i)));
                }
            }
            power = next.basis().to_vec();
            if power.is_empty() {
                return Ok(());
            }
        }
        Err(Error::NotLocal("radical is not nilpotent".into()))
    }

    pub fn element(&self, coeffs: Vec<F>) -> Result<AlgebraElement<F>> {
        if coeffs.len() != self.dim {
            return Err(Error::Shape(format!("element of length {} in algebra of dimension {}", coeffs.len(), self.dim)));
        }
        Ok(AlgebraElement { coeffs })
    }

    /// Human-readable form, e.g. `x^2 - 3*x`.
    pub fn format_element(&self, a: &[F]) -> String {
        let mut parts = Vec::new();
        for (i, c) in a.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            parts.push(crate::freealg::format_term(c, &self.labels[i], "1", "*"));
        }
        crate::freealg::join_terms(parts)
    }
}

impl<F: Field> AlgebraElement<F> {
    pub fn mul(&self, other: &Self, alg: &Algebra<F>) -> Self {
        AlgebraElement { coeffs: alg.mul(&self.coeffs, &other.coeffs) }
    }
}

/// A matrix over a finite-dimensional algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RMatrix<F> {
    rows: usize,
    cols: usize,
    dim: usize,
    data: Vec<F>,
}

impl<F: Field> RMatrix<F> {
    pub fn zeros(rows: usize, cols: usize, dim: usize) -> Self {
        RMatrix { rows, cols, dim, data: vec![F::zero(); rows * cols * dim] }
    }

    pub fn identity(n: usize, alg: &Algebra<F>) -> Self {
        let mut m = Self::zeros(n, n, alg.dim());
        for i in 0..n {
            m.set_entry(i, i, alg.unit());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, dim: usize, entries: Vec<Vec<F>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        let mut data = Vec::with_capacity(rows * cols * dim);
        for e in entries {
            if e.len() != dim {
                return Err(Error::Shape(format!("entry of length {} over an algebra of dimension {dim}", e.len())));
            }
            data.extend(e);
        }
        Ok(RMatrix { rows, cols, dim, data })
    }

    /// Flat coefficient layout: entry `(i, j)` occupies
    /// `[(i*cols + j)*dim, (i*cols + j + 1)*dim)`.
    pub fn from_flat(rows: usize, cols: usize, dim: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols * dim);
        RMatrix { rows, cols, dim, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn algebra_dim(&self) -> usize {
        self.dim
    }

    pub fn flat(&self) -> &[F] {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> &[F] {
        let o = (i * self.cols + j) * self.dim;
        &self.data[o..o + self.dim]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: &[F]) {
        let o = (i * self.cols + j) * self.dim;
        self.data[o..o + self.dim].clone_from_slice(v);
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    /// Ordinary matrix product: apply `self`, then `other`.
    pub fn mul(&self, other: &Self, alg: &Algebra<F>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.rows, other.cols, self.dim);
        self.mul_acc_into(other, alg, &mut out, &F::one());
        Ok(out)
    }

    /// `out += c · self·other` without shape checks beyond debug asserts.
    pub(crate) fn mul_acc_into(&self, other: &Self, alg: &Algebra<F>, out: &mut Self, c: &F) {
        debug_assert_eq!(self.cols, other.rows);
        let d = self.dim;
        let mut tmp = vec![F::zero(); d];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if is_zero_vec(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.entry(k, j);
                    if is_zero_vec(b) {
                        continue;
                    }
                    for t in tmp.iter_mut() {
                        *t = F::zero();
                    }
                    alg.mul_acc(&mut tmp, a, b);
                    let o = (i * out.cols + j) * d;
                    axpy(&mut out.data[o..o + d], c, &tmp);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        axpy(&mut out.data, &F::one(), &other.data);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        axpy(&mut out.data, &-F::one(), &other.data);
        Ok(out)
    }

    pub fn scale(&self, c: &F) -> Self {
        RMatrix { data: self.data.iter().map(|x| c.clone() * x.clone()).collect(), ..self.clone() }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols, self.dim) != (other.rows, other.cols, other.dim) {
            return Err(Error::Shape(format!("{}x{} vs {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        Ok(())
    }

    /// `x ↦ x·M` for a row vector `x` of algebra elements.
    pub fn apply(&self, x: &[Vec<F>], alg: &Algebra<F>) -> Result<Vec<Vec<F>>> {
        if x.len() != self.rows {
            return Err(Error::Shape(format!("vector of length {} for a matrix with {} rows", x.len(), self.rows)));
        }
        Ok((0..self.cols)
            .map(|j| {
                let mut acc = alg.zero();
                for (i, xi) in x.iter().enumerate() {
                    alg.mul_acc(&mut acc, xi, self.entry(i, j));
                }
                acc
            })
            .collect())
    }

    /// The k-linear map `k^{rows·dim} → k^{cols·dim}` underlying `x ↦ x·M`,
    /// acting on coefficient columns.
    pub fn k_linear(&self, alg: &Algebra<F>) -> KMatrix<F> {
        let d = self.dim;
        let mut m = KMatrix::zeros(self.cols * d, self.rows * d);
        for i in 0..self.rows {
            for b in 0..d {
                let eb = unit_vec(d, b);
                for j in 0..self.cols {
                    let img = alg.mul(&eb, self.entry(i, j));
                    for (s, v) in img.into_iter().enumerate() {
                        m[(j * d + s, i * d + b)] = v;
                    }
                }
            }
        }
        m
    }

    pub fn format(&self, alg: &Algebra<F>) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| alg.format_element(self.entry(i, j))).collect()).collect()
    }
}
