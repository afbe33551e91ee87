//! Module-side computations over the parameter algebra: minimal resolutions
//! of the residue field, `Ext²(k, k)` two ways, the degree-one family of a
//! presentation, and the comparison of small extensions with Ext².

use std::sync::Arc;

use crate::algebra::{Algebra, RMatrix};
use crate::complexes::ChainComplex;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::freealg::{abelianize, format_term, join_terms, IdealSpan, Monomial, MonomialSpace, QuotientBasis, TruncSeries};
use crate::lifting::{LiftState, TruncatedLift};
use crate::linalg::{unit_vec, KMatrix, Subspace};
use crate::smallext::{artifact_report, injectivity_report, small_ext_space};

/// A minimal free resolution `F_L → … → F_0 → k` over a local algebra.
#[derive(Clone, Debug)]
pub struct Resolution<F> {
    complex: ChainComplex<F>,
}

impl<F: Field> Resolution<F> {
    pub fn complex(&self) -> &ChainComplex<F> {
        &self.complex
    }

    pub fn algebra(&self) -> &Algebra<F> {
        self.complex.algebra()
    }

    pub fn length(&self) -> usize {
        self.complex.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        self.complex.ranks()
    }

    /// Every differential has its entries in the radical.
    pub fn is_minimal(&self) -> bool {
        (1..=self.length() as i32).all(|i| {
            let d = self.complex.differential(i).expect("in range");
            (0..d.rows()).all(|a| (0..d.cols()).all(|b| d.entry(a, b)[0].is_zero()))
        })
    }
}

/// Elements spanning the radical modulo its square; they generate the
/// radical as a left ideal.
fn radical_generators<F: Field>(alg: &Algebra<F>) -> Vec<Vec<F>> {
    let n = alg.dim();
    let mut acc = Subspace::span(n, (1..n).flat_map(|i| (1..n).map(move |j| (i, j))).map(|(i, j)| alg.product(i, j).to_vec()));
    (1..n).map(|i| unit_vec(n, i)).filter(|e| acc.insert(e.clone())).collect()
}

/// Componentwise `a·v` for `v ∈ A^n` in flat coefficients.
fn left_mul_flat<F: Field>(alg: &Algebra<F>, a: &[F], v: &[F]) -> Vec<F> {
    v.chunks(alg.dim()).flat_map(|x| alg.mul(a, x)).collect()
}

/// Minimal resolution of `k` up to `F_length`, built from iterated kernels.
pub fn resolve_simple<F: Field>(alg: Arc<Algebra<F>>, length: usize) -> Result<Resolution<F>> {
    alg.check_local()?;
    let d = alg.dim();
    let gens = radical_generators(&alg);
    let mut ranks = vec![1];
    let mut diffs = Vec::new();
    let mut kernel: Vec<Vec<F>> = (1..d).map(|i| unit_vec(d, i)).collect();
    for i in 0..length {
        let n_i = ranks[i];
        let rad_k =
            Subspace::span(n_i * d, gens.iter().flat_map(|g| kernel.iter().map(move |v| (g, v))).map(|(g, v)| left_mul_flat(&alg, g, v)));
        let mut acc = rad_k;
        let mut minimal = Vec::new();
        for v in &kernel {
            if acc.insert(v.clone()) {
                minimal.push(v.clone());
            }
        }
        let entries: Vec<Vec<F>> = minimal.iter().flat_map(|v| v.chunks(d).map(|c| c.to_vec()).collect::<Vec<_>>()).collect();
        let diff = RMatrix::from_entries(minimal.len(), n_i, d, entries)?;
        let lin = diff.k_linear(&alg);
        if lin.rank() != kernel.len() {
            return Err(Error::Invariant(format!("resolution is not exact at F_{i}")));
        }
        ranks.push(minimal.len());
        kernel = if i + 1 < length { lin.kernel() } else { Vec::new() };
        diffs.push(diff);
    }
    let complex = ChainComplex::new(alg, 0, ranks, diffs)?;
    let res = Resolution { complex };
    if !res.is_minimal() {
        return Err(Error::Invariant("resolution is not minimal".into()));
    }
    Ok(res)
}

/// `dim Ext^i_A(k, k)`, the rank of `F_i` in the minimal resolution.
pub fn ext_k_k<F: Field>(alg: Arc<Algebra<F>>, i: usize) -> Result<usize> {
    Ok(resolve_simple(alg, i)?.ranks()[i])
}

/// `dim J/(𝔪J + J𝔪)` for `J` plus `𝔪^{N+1}`, computed in `T_{guard-1}` by
/// matrix ranks.
pub fn second_syzygy_dim<F: Field>(ideal: &IdealSpan<F>, guard: usize) -> Result<usize> {
    let n = ideal.order_cap();
    if guard < n + 2 {
        return Err(Error::GuardTooSmall { guard, needed: n + 2 });
    }
    let from = ideal.space();
    let space = MonomialSpace::new(from.vars(), guard - 1);
    let mut rows: Vec<Vec<F>> = ideal.span().basis().iter().map(|b| from.transport(b, &space)).collect();
    rows.extend((n + 1..=space.cap()).flat_map(|d| space.degree_range(d)).map(|m| unit_vec(space.dim(), m)));
    let mut products = Vec::new();
    for v in &rows {
        for i in 0..space.vars() {
            products.push(space.mul_var(v, i, true));
            products.push(space.mul_var(v, i, false));
        }
    }
    let j = KMatrix::from_rows(space.dim(), rows)?.rank();
    let p = KMatrix::from_rows(space.dim(), products)?.rank();
    Ok(j - p)
}

/// The degree-one differential of the lifted complex: one matrix over `R`
/// per normal monomial of the parameter algebra.
#[derive(Clone, Debug)]
pub struct FamilyPresentation<F> {
    algebra: Arc<Algebra<F>>,
    vars: usize,
    order_cap: usize,
    ideal: IdealSpan<F>,
    rows: usize,
    cols: usize,
    terms: Vec<(Monomial, RMatrix<F>)>,
}

/// `Σ_w g_w ⊗ w` restricted to the map `F_degree → F_{degree-1}`.
pub fn h0_family<F: Field>(state: &LiftState<F>, degree: i32) -> Result<FamilyPresentation<F>> {
    let c = state.complex();
    if degree - 1 < c.lo() || degree > c.hi() {
        return Err(Error::Invalid(format!("no presentation map out of degree {degree} in degrees {}..={}", c.lo(), c.hi())));
    }
    let k = (degree - c.lo()) as usize;
    let d = c.differential(degree).expect("in range");
    let terms = state.lift().terms().map(|(w, g)| (w, g.component(k).clone())).collect();
    Ok(FamilyPresentation {
        algebra: c.algebra_arc().clone(),
        vars: state.vars(),
        order_cap: state.order(),
        ideal: state.ideal().clone(),
        rows: d.rows(),
        cols: d.cols(),
        terms,
    })
}

impl<F: Field> FamilyPresentation<F> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn terms(&self) -> &[(Monomial, RMatrix<F>)] {
        &self.terms
    }

    /// The family at `t = 0`.
    pub fn specialize_zero(&self) -> RMatrix<F> {
        self.terms
            .iter()
            .find(|(w, _)| w.degree() == 0)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| RMatrix::zeros(self.rows, self.cols, self.algebra.dim()))
    }

    /// Coefficient series of the `b`-th basis element of `R` in entry `(i, j)`.
    pub fn entry_series(&self, i: usize, j: usize, b: usize) -> TruncSeries<F> {
        TruncSeries::from_terms(self.vars, self.order_cap, self.terms.iter().map(|(w, m)| (w.clone(), m.entry(i, j)[b].clone())))
    }

    /// Entry text, highest basis element of `R` first, e.g.
    /// `x^3 + t2*x^2 + t1*x + t0`.
    pub fn format_entry(&self, i: usize, j: usize) -> String {
        let labels = self.algebra.labels();
        let mut parts = Vec::new();
        for b in (0..self.algebra.dim()).rev() {
            for (w, c) in self.entry_series(i, j, b).terms() {
                let label = match (w.degree(), labels[b].as_str()) {
                    (0, l) => l.to_string(),
                    (_, "1") => w.format(self.vars),
                    (_, l) => format!("{}*{l}", w.format(self.vars)),
                };
                parts.push(format_term(c, &label, "1", "*"));
            }
        }
        join_terms(parts)
    }

    pub fn format(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.format_entry(i, j)).collect()).collect()
    }

    /// For a 1×1 family `x^n + s_{n-1} x^{n-1} + … + s_0` over
    /// `k[x]/(x^m)`: the companion matrix with last row `(-s_0, …, -s_{n-1})`,
    /// entries reduced in the abelianized parameter algebra.
    pub fn companion(&self) -> Result<Vec<Vec<String>>> {
        if (self.rows, self.cols) != (1, 1) {
            return Err(Error::Invalid("companion form needs a 1x1 family".into()));
        }
        let m = self.algebra.dim();
        let poly = Algebra::<F>::truncated_poly(m)?;
        if self.algebra.table() != poly.table() || self.algebra.unit() != poly.unit() {
            return Err(Error::Invalid("companion form needs R = k[x]/(x^m)".into()));
        }
        let ab = abelianize(&self.ideal);
        let s: Vec<TruncSeries<F>> = (0..m).map(|b| ab.reduce(&self.entry_series(0, 0, b))).collect();
        let n = s.iter().rposition(|x| !x.is_zero()).ok_or_else(|| Error::Invalid("zero family".into()))?;
        if s[n] != TruncSeries::one(self.vars, self.order_cap) {
            return Err(Error::Invalid("family is not monic in x".into()));
        }
        let mut out = vec![vec!["0".to_string(); n]; n];
        for (i, row) in out.iter_mut().enumerate().take(n.saturating_sub(1)) {
            row[i + 1] = "1".to_string();
        }
        if n > 0 {
            for (b, cell) in out[n - 1].iter_mut().enumerate() {
                *cell = s[b].scale(&-F::one()).format();
            }
        }
        Ok(out)
    }
}

/// One truncation `A_n = T/(I + 𝔪^n)` in the comparison.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RhoRow {
    pub n: usize,
    pub ext2_k_k: usize,
    pub second_syzygy: usize,
    pub small_ext_dim: usize,
    pub artifact_dim: usize,
    pub relation_dim: usize,
    pub alpha_rank_on_relations: usize,
    /// rank of `α` on the artifact directions
    pub artifact_image_dim: usize,
    pub dims_agree: bool,
    pub injective: bool,
    /// `α` of the artifact directions spans the next order's obstructions
    pub artifact_matches_next_order: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct RhoReport {
    pub ext2_dim: usize,
    pub rows: Vec<RhoRow>,
}

impl RhoReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.dims_agree && r.injective && r.artifact_matches_next_order)
    }
}

/// The lift restricted to `T/(I + 𝔪^{cap+1})`.
pub fn restrict_lift<F: Field>(state: &LiftState<F>, cap: usize) -> Result<TruncatedLift<F>> {
    if cap > state.order() {
        return Err(Error::Invalid(format!("cannot restrict an order {} lift to order {cap}", state.order())));
    }
    let quotient = QuotientBasis::new(state.ideal().truncate(cap));
    let coeffs = state.lift().terms().filter(|(w, _)| w.degree() <= cap).map(|(_, g)| g.clone()).collect();
    TruncatedLift::new(state.complex().clone(), quotient, coeffs)
}

/// For `n = 2..=N`: `Ext²_{A_n}(k, k)` by resolution, by second syzygy, and
/// as small extensions, and the rank of `α` on the relation directions.
pub fn rho_report<F: Field>(state: &LiftState<F>) -> Result<RhoReport> {
    if state.order() < 2 {
        return Err(Error::Invalid("comparison needs order at least 2".into()));
    }
    let mut rows = Vec::new();
    for n in 2..=state.order() {
        let lift = restrict_lift(state, n - 1)?;
        let a = lift.quotient();
        let alg = Arc::new(a.to_algebra()?);
        let ext2_k_k = ext_k_k(alg, 2)?;
        let second_syzygy = second_syzygy_dim(a.ideal(), n + 1)?;
        let small_ext_dim = small_ext_space(a, n + 1)?.dim();
        let inj = injectivity_report(&lift, state.ext2(), n + 1)?;
        let art = artifact_report(&lift, state.ext2(), n + 1)?;
        rows.push(RhoRow {
            n,
            ext2_k_k,
            second_syzygy,
            small_ext_dim,
            artifact_dim: inj.artifact_dim,
            relation_dim: inj.relation_dim,
            alpha_rank_on_relations: inj.alpha_rank_on_relations,
            artifact_image_dim: art.alpha_image_dim,
            dims_agree: ext2_k_k == second_syzygy && second_syzygy == small_ext_dim,
            injective: inj.injective,
            artifact_matches_next_order: art.matches,
        });
    }
    Ok(RhoReport { ext2_dim: state.ext2().dim(), rows })
}
