//! Bounded complexes of finite-rank free left modules, graded self-maps,
//! self-Ext as homotopy classes of chain maps, and Yoneda products.
//!
//! Sign conventions:
//!
//! * `[f, g] = f·g + (-1)^{j+l} g·f` for `f` of degree `j`, `g` of degree `l`,
//!   where `f·g` means "apply `g`, then `f`".
//! * `f` is a chain map iff `[d, f] = 0`.
//! * `f ~ 0` iff `f = [d, h]` for some `h` of degree `deg f + 1`.
//!
//! The textbook homotopy `h·d + (-1)^j d·h` equals `(-1)^j [d, h]`, so both
//! descriptions have the same image; witnesses here always refer to the
//! bracket form.

use std::sync::Arc;

use crate::algebra::{Algebra, RMatrix};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{axpy, unit_vec, KMatrix, LinearSolver, Subspace};

#[derive(Clone, Debug)]
pub struct ChainComplex<F> {
    algebra: Arc<Algebra<F>>,
    lo: i32,
    ranks: Vec<usize>,
    /// `diffs[k]: F_{lo+k} → F_{lo+k-1}`, an `n_{lo+k} × n_{lo+k-1}` matrix.
    diffs: Vec<RMatrix<F>>,
}

/// A graded map `F → F[j]`; `components[k]` is the component on `F_{lo+k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap<F> {
    degree: i32,
    components: Vec<RMatrix<F>>,
}

impl<F: Field> GradedMap<F> {
    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn components(&self) -> &[RMatrix<F>] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &RMatrix<F> {
        &self.components[k]
    }

    pub fn component_mut(&mut self, k: usize) -> &mut RMatrix<F> {
        &mut self.components[k]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    /// Flattened coefficients, component by component.
    pub fn to_vec(&self) -> Vec<F> {
        self.components.iter().flat_map(|c| c.flat().iter().cloned()).collect()
    }

    pub fn scale(&self, c: &F) -> Self {
        GradedMap { degree: self.degree, components: self.components.iter().map(|m| m.scale(c)).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let components = self.components.iter().zip(&other.components).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(GradedMap { degree: self.degree, components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-F::one()))
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, c: &F, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        let mut v = self.to_vec();
        axpy(&mut v, c, &other.to_vec());
        self.set_from_vec(&v);
        Ok(())
    }

    fn set_from_vec(&mut self, v: &[F]) {
        let mut off = 0;
        for c in self.components.iter_mut() {
            let len = c.flat().len();
            *c = RMatrix::from_flat(c.rows(), c.cols(), c.algebra_dim(), v[off..off + len].to_vec());
            off += len;
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        let same = self.degree == other.degree
            && self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.rows() == b.rows() && a.cols() == b.cols());
        if same {
            Ok(())
        } else {
            Err(Error::Shape("graded maps live on different complexes or degrees".into()))
        }
    }
}

impl<F: Field> ChainComplex<F> {
    /// Complex with `F_i` of rank `ranks[i - lo]`; `diffs[k]` is the
    /// differential out of degree `lo + 1 + k`. Checks shapes and `d² = 0`.
    pub fn new(algebra: Arc<Algebra<F>>, lo: i32, ranks: Vec<usize>, diffs: Vec<RMatrix<F>>) -> Result<Self> {
        if ranks.len() != diffs.len() + 1 && !(ranks.is_empty() && diffs.is_empty()) {
            return Err(Error::Shape(format!(
                "{} ranks need {} differentials, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                diffs.len()
            )));
        }
        let dim = algebra.dim();
        let mut all = Vec::with_capacity(ranks.len());
        if let Some(&n0) = ranks.first() {
            all.push(RMatrix::zeros(n0, 0, dim));
        }
        for (k, d) in diffs.into_iter().enumerate() {
            let (src, tgt) = (ranks[k + 1], ranks[k]);
            if d.rows() != src || d.cols() != tgt || d.algebra_dim() != dim {
                return Err(Error::Shape(format!(
                    "differential out of degree {} is {}x{}, expected {src}x{tgt}",
                    lo + 1 + k as i32,
                    d.rows(),
                    d.cols()
                )));
            }
            all.push(d);
        }
        let c = ChainComplex { algebra, lo, ranks, diffs: all };
        c.check_d_squared()?;
        Ok(c)
    }

    pub fn empty(algebra: Arc<Algebra<F>>) -> Self {
        ChainComplex { algebra, lo: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    pub fn check_d_squared(&self) -> Result<()> {
        for k in 2..self.ranks.len() {
            let dd = self.diffs[k].mul(&self.diffs[k - 1], &self.algebra)?;
            if !dd.is_zero() {
                return Err(Error::NotDg(format!("d∘d out of degree {} is nonzero", self.lo + k as i32)));
            }
        }
        Ok(())
    }

    pub fn algebra(&self) -> &Algebra<F> {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<Algebra<F>> {
        &self.algebra
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.ranks.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.iter().all(|&r| r == 0)
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// Rank in homological degree `i`, zero outside the support.
    pub fn rank(&self, i: i32) -> usize {
        self.slot(i).map_or(0, |k| self.ranks[k])
    }

    fn slot(&self, i: i32) -> Option<usize> {
        let k = i - self.lo;
        (k >= 0 && (k as usize) < self.ranks.len()).then_some(k as usize)
    }

    /// `d_i: F_i → F_{i-1}`.
    pub fn differential(&self, i: i32) -> Option<&RMatrix<F>> {
        self.slot(i).map(|k| &self.diffs[k])
    }

    pub fn d(&self) -> GradedMap<F> {
        GradedMap { degree: -1, components: self.diffs.clone() }
    }

    pub fn zero_map(&self, degree: i32) -> GradedMap<F> {
        let dim = self.algebra.dim();
        let components =
            (0..self.ranks.len()).map(|k| RMatrix::zeros(self.ranks[k], self.rank(self.lo + k as i32 + degree), dim)).collect();
        GradedMap { degree, components }
    }

    pub fn identity_map(&self) -> GradedMap<F> {
        GradedMap { degree: 0, components: self.ranks.iter().map(|&n| RMatrix::identity(n, &self.algebra)).collect() }
    }

    /// Dimension over `k` of the space of graded maps of the given degree.
    pub fn hom_dim(&self, degree: i32) -> usize {
        let dim = self.algebra.dim();
        (0..self.ranks.len()).map(|k| self.ranks[k] * self.rank(self.lo + k as i32 + degree) * dim).sum()
    }

    pub fn map_from_vec(&self, degree: i32, v: &[F]) -> Result<GradedMap<F>> {
        if v.len() != self.hom_dim(degree) {
            return Err(Error::Shape(format!("vector of length {} for maps of degree {degree}", v.len())));
        }
        let mut m = self.zero_map(degree);
        m.set_from_vec(v);
        Ok(m)
    }

    pub fn map_from_components(&self, degree: i32, components: Vec<RMatrix<F>>) -> Result<GradedMap<F>> {
        let template = self.zero_map(degree);
        let ok = components.len() == template.components.len()
            && components
                .iter()
                .zip(&template.components)
                .all(|(a, b)| a.rows() == b.rows() && a.cols() == b.cols() && a.algebra_dim() == b.algebra_dim());
        if !ok {
            return Err(Error::Shape(format!("components do not fit a degree {degree} map")));
        }
        Ok(GradedMap { degree, components })
    }

    fn check_map(&self, f: &GradedMap<F>) -> Result<()> {
        self.zero_map(f.degree).check_compatible(f)
    }

    /// `f·g`: apply `g`, then `f`.
    pub fn compose(&self, f: &GradedMap<F>, g: &GradedMap<F>) -> Result<GradedMap<F>> {
        self.check_map(f)?;
        self.check_map(g)?;
        let mut out = self.zero_map(f.degree + g.degree);
        self.compose_acc(&mut out, &F::one(), f, g);
        Ok(out)
    }

    /// `out += c · f·g`, shapes already validated.
    pub(crate) fn compose_acc(&self, out: &mut GradedMap<F>, c: &F, f: &GradedMap<F>, g: &GradedMap<F>) {
        for k in 0..self.ranks.len() {
            let mid = self.lo + k as i32 + g.degree;
            let Some(km) = self.slot(mid) else { continue };
            if self.slot(mid + f.degree).is_none() {
                continue;
            }
            g.components[k].mul_acc_into(&f.components[km], &self.algebra, &mut out.components[k], c);
        }
    }

    pub fn bracket(&self, f: &GradedMap<F>, g: &GradedMap<F>) -> Result<GradedMap<F>> {
        self.check_map(f)?;
        self.check_map(g)?;
        let sign = if (f.degree + g.degree).rem_euclid(2) == 0 { F::one() } else { -F::one() };
        let mut out = self.zero_map(f.degree + g.degree);
        self.compose_acc(&mut out, &F::one(), f, g);
        self.compose_acc(&mut out, &sign, g, f);
        Ok(out)
    }

    /// `[d, f]`
    pub fn d_bracket(&self, f: &GradedMap<F>) -> Result<GradedMap<F>> {
        self.bracket(&self.d(), f)
    }

    pub fn is_chain_map(&self, f: &GradedMap<F>) -> Result<bool> {
        Ok(self.d_bracket(f)?.is_zero())
    }

    /// Matrix of `f ↦ [d, f]` from degree `j` maps to degree `j - 1` maps.
    pub fn d_bracket_matrix(&self, j: i32) -> KMatrix<F> {
        let n = self.hom_dim(j);
        let cols: Vec<Vec<F>> = (0..n)
            .map(|c| {
                let e = self.map_from_vec(j, &unit_vec(n, c)).expect("shape");
                self.d_bracket(&e).expect("shape").to_vec()
            })
            .collect();
        KMatrix::from_cols(self.hom_dim(j - 1), &cols).expect("shape")
    }

    /// Direct sum of two complexes over the same algebra.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::Invalid("direct sum over different algebras".into()));
        }
        if self.ranks.is_empty() {
            return Ok(other.clone());
        }
        if other.ranks.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let dim = self.algebra.dim();
        let ranks: Vec<usize> = (lo..=hi).map(|i| self.rank(i) + other.rank(i)).collect();
        let mut diffs = Vec::new();
        for i in lo + 1..=hi {
            let mut m = RMatrix::zeros(ranks[(i - lo) as usize], ranks[(i - 1 - lo) as usize], dim);
            if let Some(a) = self.differential(i) {
                for r in 0..a.rows() {
                    for c in 0..a.cols() {
                        m.set_entry(r, c, a.entry(r, c));
                    }
                }
            }
            if let Some(b) = other.differential(i) {
                let (ro, co) = (self.rank(i), self.rank(i - 1));
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        m.set_entry(ro + r, co + c, b.entry(r, c));
                    }
                }
            }
            diffs.push(m);
        }
        ChainComplex::new(self.algebra.clone(), lo, ranks, diffs)
    }
}

/// Basis of `Ext^i(F, F)`: homotopy classes of degree `-i` chain maps.
#[derive(Clone, Debug)]
pub struct ExtBasis<F> {
    degree: i32,
    reps: Vec<GradedMap<F>>,
    chain_maps: Subspace<F>,
    /// Solves `f = Σ c_a rep_a + [d, h]` for `(c, h)`.
    solver: LinearSolver<F>,
}

/// An element of `Ext^i` in the coordinates of a fixed [`ExtBasis`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtClass<F> {
    pub degree: i32,
    pub coords: Vec<F>,
}

impl<F: Field> ExtBasis<F> {
    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[GradedMap<F>] {
        &self.reps
    }

    pub fn chain_maps(&self) -> &Subspace<F> {
        &self.chain_maps
    }

    pub fn class(&self, coords: Vec<F>) -> Result<ExtClass<F>> {
        if coords.len() != self.dim() {
            return Err(Error::Shape(format!("{} coordinates for Ext^{} of dimension {}", coords.len(), self.degree, self.dim())));
        }
        Ok(ExtClass { degree: self.degree, coords })
    }

    pub fn representative(&self, c: &ExtClass<F>, complex: &ChainComplex<F>) -> Result<GradedMap<F>> {
        let mut f = complex.zero_map(-self.degree);
        for (rep, x) in self.reps.iter().zip(&c.coords) {
            f.add_scaled(x, rep)?;
        }
        Ok(f)
    }
}

/// Chain maps of degree `-i` modulo null-homotopic ones.
///
/// Representatives: reduce the echelon basis of the chain-map space modulo
/// the homotopy subspace and keep the vectors that are new, in order.
pub fn ext_space<F: Field>(complex: &ChainComplex<F>, i: i32) -> ExtBasis<F> {
    let j = -i;
    let chain_maps = Subspace::span(complex.hom_dim(j), complex.d_bracket_matrix(j).kernel());
    let homotopy = complex.d_bracket_matrix(j + 1);
    let boundaries = Subspace::span(complex.hom_dim(j), (0..homotopy.cols()).map(|c| homotopy.col(c)));
    let mut acc = boundaries.clone();
    let mut rep_vecs = Vec::new();
    for z in chain_maps.basis() {
        let r = boundaries.reduce(z);
        if acc.insert(r.clone()) {
            rep_vecs.push(r);
        }
    }
    let n = complex.hom_dim(j);
    let mut cols = rep_vecs.clone();
    cols.extend((0..homotopy.cols()).map(|c| homotopy.col(c)));
    let solver = LinearSolver::new(&KMatrix::from_cols(n, &cols).expect("shape"));
    let reps = rep_vecs.iter().map(|v| complex.map_from_vec(j, v).expect("shape")).collect();
    ExtBasis { degree: i, reps, chain_maps, solver }
}

/// Writes a chain map as `Σ coords_a · rep_a + [d, witness]`.
pub fn reduce_mod_homotopy<F: Field>(complex: &ChainComplex<F>, basis: &ExtBasis<F>, f: &GradedMap<F>) -> Result<(Vec<F>, GradedMap<F>)> {
    if f.degree() != -basis.degree {
        return Err(Error::Shape(format!("degree {} map against Ext^{}", f.degree(), basis.degree)));
    }
    let v = f.to_vec();
    if !basis.chain_maps.contains(&v) {
        return Err(Error::NotChainMap(format!("degree {} map with [d, f] ≠ 0", f.degree())));
    }
    let x = basis.solver.solve(&v).ok_or_else(|| Error::Invariant("chain map not in span of representatives and homotopies".into()))?;
    let r = basis.dim();
    let coords = x[..r].to_vec();
    let witness = complex.map_from_vec(f.degree() + 1, &x[r..])?;
    // exact reconstruction
    let mut back = complex.d_bracket(&witness)?;
    for (rep, c) in basis.reps.iter().zip(&coords) {
        back.add_scaled(c, rep)?;
    }
    if &back != f {
        return Err(Error::Invariant("homotopy reconstruction mismatch".into()));
    }
    Ok((coords, witness))
}

/// Ext bases in degrees `0..=max_degree` of a fixed complex.
#[derive(Clone, Debug)]
pub struct ExtAlgebra<F> {
    complex: ChainComplex<F>,
    bases: Vec<ExtBasis<F>>,
}

impl<F: Field> ExtAlgebra<F> {
    pub fn new(complex: &ChainComplex<F>, max_degree: usize) -> Self {
        let bases = (0..=max_degree as i32).map(|i| ext_space(complex, i)).collect();
        ExtAlgebra { complex: complex.clone(), bases }
    }

    pub fn complex(&self) -> &ChainComplex<F> {
        &self.complex
    }

    pub fn basis(&self, i: usize) -> &ExtBasis<F> {
        &self.bases[i]
    }

    pub fn dim(&self, i: usize) -> usize {
        self.bases[i].dim()
    }

    pub fn unit_class(&self, i: usize, a: usize) -> ExtClass<F> {
        ExtClass { degree: i as i32, coords: unit_vec(self.dim(i), a) }
    }

    pub fn reduce(&self, f: &GradedMap<F>) -> Result<(Vec<F>, GradedMap<F>)> {
        let i = -f.degree();
        let basis =
            usize::try_from(i).ok().and_then(|i| self.bases.get(i)).ok_or_else(|| Error::Invalid(format!("Ext^{i} not computed")))?;
        reduce_mod_homotopy(&self.complex, basis, f)
    }

    /// `[f][g] = [f·g]`
    pub fn yoneda(&self, a: &ExtClass<F>, b: &ExtClass<F>) -> Result<ExtClass<F>> {
        let (i, j) = (a.degree as usize, b.degree as usize);
        if i + j >= self.bases.len() {
            return Err(Error::Invalid(format!("Ext^{} not computed", i + j)));
        }
        let f = self.bases[i].representative(a, &self.complex)?;
        let g = self.bases[j].representative(b, &self.complex)?;
        let fg = self.complex.compose(&f, &g)?;
        let (coords, _) = reduce_mod_homotopy(&self.complex, &self.bases[i + j], &fg)?;
        Ok(ExtClass { degree: (i + j) as i32, coords })
    }

    /// Span of all products of two degree-one classes, in Ext^2 coordinates.
    pub fn ext1_squared(&self) -> Result<Subspace<F>> {
        let e2 = self.bases.get(2).map_or(0, |b| b.dim());
        let mut s = Subspace::zero(e2);
        let r = self.dim(1);
        for a in 0..r {
            for b in 0..r {
                let p = self.yoneda(&self.unit_class(1, a), &self.unit_class(1, b))?;
                s.insert(p.coords);
            }
        }
        Ok(s)
    }
}
