//! Order-by-order construction of the universal lift.
//!
//! At order `N` the state holds an ideal `S_N ⊆ T_N` with quotient
//! `A_N = T_N / S_N` and a differential `Δ = Σ_w g_w ⊗ w` over the normal
//! monomials `w` of `A_N`, with `g_1 = d`, `g_{t_i}` the Ext¹ basis and
//! `Δ² = 0` in `R ⊗ A_N`.
//!
//! One step works in `T_{N+1}`. With `J = S_N + 𝔪^{N+1}` and
//! `M = 𝔪J + J𝔪`, the ring `T_{N+1}/M` is a small extension of `A_N` by
//! `K = J/M`. Lifting `Δ` verbatim gives `Δ² = Σ_q σ_q ⊗ κ_q` over a basis
//! `κ_q` of `K`, with each `σ_q` a degree -2 chain map. Writing
//! `σ_q = Σ_a c_{qa} e_a + [d, h_q]` over an Ext² basis `e_a`, the
//! corrected `Δ - Σ_q h_q ⊗ κ_q` squares to `Σ_a e_a ⊗ ρ_a` with
//! `ρ_a = Σ_q c_{qa} κ_q`, so `S_{N+1} = M + span(ρ_a)`.

use crate::algebra::Algebra;
use crate::complexes::{ext_space, reduce_mod_homotopy, ChainComplex, ExtBasis, GradedMap};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::freealg::{IdealSpan, Monomial, MonomialSpace, QuotientBasis, TruncSeries};
use crate::linalg::{axpy, is_zero_vec, unit_vec, KMatrix, QuotientMap, Subspace};
use crate::smallext::small_extension_map;

/// `Δ` over a truncated quotient `T_N / I`, one degree -1 map per normal
/// monomial.
#[derive(Clone, Debug)]
pub struct TruncatedLift<F> {
    complex: ChainComplex<F>,
    quotient: QuotientBasis<F>,
    coeffs: Vec<GradedMap<F>>,
}

impl<F: Field> TruncatedLift<F> {
    /// `coeffs` runs parallel to `quotient.normal_indices()`.
    pub fn new(complex: ChainComplex<F>, quotient: QuotientBasis<F>, coeffs: Vec<GradedMap<F>>) -> Result<Self> {
        if coeffs.len() != quotient.dim() {
            return Err(Error::Shape(format!("{} coefficients for {} normal monomials", coeffs.len(), quotient.dim())));
        }
        if let Some(g) = coeffs.iter().find(|g| g.degree() != -1) {
            return Err(Error::Shape(format!("lift coefficient of degree {}", g.degree())));
        }
        Ok(TruncatedLift { complex, quotient, coeffs })
    }

    pub fn complex(&self) -> &ChainComplex<F> {
        &self.complex
    }

    pub fn quotient(&self) -> &QuotientBasis<F> {
        &self.quotient
    }

    pub fn coeffs(&self) -> &[GradedMap<F>] {
        &self.coeffs
    }

    pub fn coeff(&self, m: &Monomial) -> Option<&GradedMap<F>> {
        let idx = self.quotient.space().index(m)?;
        self.quotient.position(idx).map(|k| &self.coeffs[k])
    }

    pub fn coeff_mut(&mut self, m: &Monomial) -> Option<&mut GradedMap<F>> {
        let idx = self.quotient.space().index(m)?;
        self.quotient.position(idx).map(move |k| &mut self.coeffs[k])
    }

    /// `(normal monomial, g_w)` pairs in deglex order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &GradedMap<F>)> {
        let sp = self.quotient.space();
        self.quotient.normal_indices().iter().map(move |&i| sp.monomial(i)).zip(self.coeffs.iter())
    }

    /// `Σ_{uv = m} g_u·g_v` for every monomial `m` of `space`, computed by
    /// concatenation in the free algebra without reducing.
    pub fn square_by_monomial(&self, space: MonomialSpace) -> Vec<GradedMap<F>> {
        let c = &self.complex;
        let one = F::one();
        let mut out = vec![c.zero_map(-2); space.dim()];
        let nf = self.quotient.normal_indices();
        for (a, &u) in nf.iter().enumerate() {
            for (b, &v) in nf.iter().enumerate() {
                if let Some(w) = space.concat(u, v) {
                    c.compose_acc(&mut out[w], &one, &self.coeffs[a], &self.coeffs[b]);
                }
            }
        }
        out
    }

    /// The square as one coordinate vector over `space` per entry of a
    /// degree -2 map.
    pub fn square_columns(&self, space: MonomialSpace) -> Vec<Vec<F>> {
        let by_monomial: Vec<Vec<F>> = self.square_by_monomial(space).iter().map(|g| g.to_vec()).collect();
        let entries = self.complex.hom_dim(-2);
        (0..entries).map(|e| by_monomial.iter().map(|v| v[e].clone()).collect()).collect()
    }

    /// True iff `Δ² = 0` in `R ⊗ T_N / I`.
    pub fn squares_to_zero(&self) -> bool {
        let sp = self.quotient.space();
        let ideal = self.quotient.ideal().span();
        self.square_columns(sp).iter().all(|col| ideal.contains(col))
    }
}

/// A relation of the parameter algebra with its leading degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSeries<F> {
    pub series: TruncSeries<F>,
    pub leading_order: usize,
}

/// Summary of one extension step.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct OrderLog {
    pub order: usize,
    /// `dim J/(𝔪J + J𝔪)` at the previous order
    pub small_ext_dim: usize,
    /// directions of that space coming from the new degree
    pub artifact_dim: usize,
    /// rank of the obstruction map into Ext²
    pub obstruction_rank: usize,
    pub relations: usize,
    pub quotient_dims: Vec<usize>,
}

/// Obstruction data of a lift over `T/J` into `T_cap / (𝔪J + J𝔪)`.
#[derive(Clone, Debug)]
pub struct Obstruction<F> {
    pub space: MonomialSpace,
    /// `J / (𝔪J + J𝔪)` with its complement basis `κ_q`
    pub small: QuotientMap<F>,
    /// degree -2 chain maps `σ_q`
    pub sigma: Vec<GradedMap<F>>,
    /// Ext² coordinates of `σ_q`
    pub classes: Vec<Vec<F>>,
    /// degree -1 maps with `σ_q = Σ_a classes[q][a] e_a + [d, h_q]`
    pub witnesses: Vec<GradedMap<F>>,
}

impl<F: Field> Obstruction<F> {
    pub fn dim(&self) -> usize {
        self.small.dim()
    }

    pub fn kappa(&self, q: usize) -> Vec<F> {
        self.small.complement_vector(q)
    }

    /// Ext² rows × small-extension columns.
    pub fn matrix(&self, ext2_dim: usize) -> KMatrix<F> {
        let cols: Vec<Vec<F>> = self.classes.clone();
        KMatrix::from_cols(ext2_dim, &cols).expect("class length")
    }

    /// Directions supported in degrees above `order_cap`.
    pub fn artifact_span(&self, order_cap: usize) -> Subspace<F> {
        let sp = self.space;
        let vs = (order_cap + 1..=sp.cap()).flat_map(|d| sp.degree_range(d)).map(|m| self.small.coords_unchecked(&unit_vec(sp.dim(), m)));
        Subspace::span(self.dim(), vs)
    }
}

/// Computes the obstruction of `lift` against the small extension
/// `T_cap / (𝔪J + J𝔪)` where `J` is the lift's ideal plus `𝔪^{N+1}`.
pub fn obstruction<F: Field>(lift: &TruncatedLift<F>, ext2: &ExtBasis<F>, cap: usize) -> Result<Obstruction<F>> {
    let n = lift.quotient.order_cap();
    let (space, small) = small_extension_map(&lift.quotient, cap)?;

    let complex = &lift.complex;
    let columns = lift.square_columns(space);
    for col in &columns {
        if !small.outer().contains(col) {
            return Err(Error::Invariant(format!("Δ² does not vanish over the order {n} quotient")));
        }
    }
    let k = small.dim();
    let mut sigma_vecs = vec![vec![F::zero(); columns.len()]; k];
    for (e, col) in columns.iter().enumerate() {
        for (q, x) in small.coords_unchecked(col).into_iter().enumerate() {
            sigma_vecs[q][e] = x;
        }
    }
    let mut sigma = Vec::with_capacity(k);
    let mut classes = Vec::with_capacity(k);
    let mut witnesses = Vec::with_capacity(k);
    for v in sigma_vecs {
        let s = complex.map_from_vec(-2, &v)?;
        if is_zero_vec(&v) {
            classes.push(vec![F::zero(); ext2.dim()]);
            witnesses.push(complex.zero_map(-1));
        } else {
            let (c, h) = reduce_mod_homotopy(complex, ext2, &s).map_err(|e| match e {
                Error::NotChainMap(m) => Error::Invariant(format!("obstruction is not a chain map: {m}")),
                other => other,
            })?;
            classes.push(c);
            witnesses.push(h);
        }
        sigma.push(s);
    }
    Ok(Obstruction { space, small, sigma, classes, witnesses })
}

/// One obstruction direction, keyed by the leading monomial of `κ`.
#[derive(Clone, Debug)]
pub struct ObstructionTerm<F> {
    pub leading: Monomial,
    pub kappa: TruncSeries<F>,
    pub map: GradedMap<F>,
    pub class: Vec<F>,
}

/// The lift being built, with its relations and history.
#[derive(Clone, Debug)]
pub struct LiftState<F> {
    lift: TruncatedLift<F>,
    relations: Vec<RelationSeries<F>>,
    order: usize,
    log: Vec<OrderLog>,
    ext1: ExtBasis<F>,
    ext2: ExtBasis<F>,
    /// Ext¹ coordinates of the linear coefficients, one row per variable
    linear_coords: KMatrix<F>,
}

impl<F: Field> LiftState<F> {
    pub fn lift(&self) -> &TruncatedLift<F> {
        &self.lift
    }

    pub fn complex(&self) -> &ChainComplex<F> {
        &self.lift.complex
    }

    pub fn algebra(&self) -> &Algebra<F> {
        self.lift.complex.algebra()
    }

    pub fn quotient(&self) -> &QuotientBasis<F> {
        &self.lift.quotient
    }

    pub fn ideal(&self) -> &IdealSpan<F> {
        self.lift.quotient.ideal()
    }

    pub fn relations(&self) -> &[RelationSeries<F>] {
        &self.relations
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vars(&self) -> usize {
        self.lift.quotient.vars()
    }

    pub fn log(&self) -> &[OrderLog] {
        &self.log
    }

    pub fn ext1(&self) -> &ExtBasis<F> {
        &self.ext1
    }

    pub fn ext2(&self) -> &ExtBasis<F> {
        &self.ext2
    }

    pub fn linear_coords(&self) -> &KMatrix<F> {
        &self.linear_coords
    }

    pub fn quotient_dims(&self) -> Vec<usize> {
        self.lift.quotient.dims_per_degree()
    }

    /// `dim I/(I ∩ 𝔪^d)` for `d = 0..=N+1`.
    pub fn ladder(&self) -> Vec<usize> {
        self.ideal().ladder()
    }
}

/// `δ = d ⊗ 1 + Σ t_i* ⊗ t_i` over `T / 𝔪²` with the canonical Ext¹ basis.
pub fn first_order_lift<F: Field>(complex: &ChainComplex<F>) -> Result<LiftState<F>> {
    let ext1 = ext_space(complex, 1);
    let reps = ext1.reps().to_vec();
    first_order_lift_with_basis(complex, reps)
}

/// As [`first_order_lift`] with the linear terms given by `reps`, which must
/// represent a basis of Ext¹.
pub fn first_order_lift_with_basis<F: Field>(complex: &ChainComplex<F>, reps: Vec<GradedMap<F>>) -> Result<LiftState<F>> {
    let ext1 = ext_space(complex, 1);
    let ext2 = ext_space(complex, 2);
    let r = ext1.dim();
    if reps.len() != r {
        return Err(Error::Invalid(format!("{} linear terms for Ext^1 of dimension {r}", reps.len())));
    }
    let mut rows = Vec::with_capacity(r);
    for g in &reps {
        let (c, _) = reduce_mod_homotopy(complex, &ext1, g)?;
        rows.push(c);
    }
    let linear_coords = KMatrix::from_rows(r, rows)?;
    if linear_coords.rank() != r {
        return Err(Error::Invalid("linear terms do not form a basis of Ext^1".into()));
    }
    let quotient = QuotientBasis::free(r, 1);
    let mut coeffs = vec![complex.d()];
    coeffs.extend(reps);
    let lift = TruncatedLift::new(complex.clone(), quotient, coeffs)?;
    let state = LiftState { lift, relations: Vec::new(), order: 1, log: Vec::new(), ext1, ext2, linear_coords };
    Ok(state)
}

/// Obstructions to extending the state by one order, one per basis vector of
/// `J/(𝔪J + J𝔪)`.
pub fn obstruction_at_order<F: Field>(state: &LiftState<F>) -> Result<Vec<ObstructionTerm<F>>> {
    let ob = obstruction(&state.lift, &state.ext2, state.order + 1)?;
    let sp = ob.space;
    Ok((0..ob.dim())
        .map(|q| {
            let kappa = ob.kappa(q);
            ObstructionTerm {
                leading: sp.monomial(ob.small.complement_pivots()[q]),
                kappa: TruncSeries::from_coords(sp, &kappa),
                map: ob.sigma[q].clone(),
                class: ob.classes[q].clone(),
            }
        })
        .collect())
}

/// Extends a consistent order-`N` state to order `N+1`.
pub fn extend_one_order<F: Field>(state: &LiftState<F>) -> Result<LiftState<F>> {
    let n = state.order;
    let ob = obstruction(&state.lift, &state.ext2, n + 1)?;
    let space = ob.space;
    let ell = state.ext2.dim();

    let mut ideal_span = ob.small.inner().clone();
    for a in 0..ell {
        let mut rho = vec![F::zero(); space.dim()];
        for q in 0..ob.dim() {
            let c = &ob.classes[q][a];
            if !c.is_zero() {
                axpy(&mut rho, c, &ob.kappa(q));
            }
        }
        ideal_span.insert(rho);
    }
    let ideal = IdealSpan::from_closed_span(space, ideal_span)?;
    if ideal.truncate(n).span() != state.ideal().span() {
        return Err(Error::Invariant(format!("order {} relations change the order {n} quotient", n + 1)));
    }
    let quotient = QuotientBasis::new(ideal);

    let complex = state.complex();
    let old = &state.lift;
    let mut coeffs = Vec::with_capacity(quotient.dim());
    for &w in quotient.normal_indices() {
        let g = old.quotient.position(w).map_or_else(|| complex.zero_map(-1), |k| old.coeffs[k].clone());
        coeffs.push(g);
    }
    for q in 0..ob.dim() {
        if ob.witnesses[q].is_zero() {
            continue;
        }
        let nf = quotient.reduce_coords(&ob.kappa(q));
        for (k, c) in nf.iter().enumerate() {
            if !c.is_zero() {
                coeffs[k].add_scaled(&-c.clone(), &ob.witnesses[q])?;
            }
        }
    }
    let lift = TruncatedLift::new(complex.clone(), quotient, coeffs)?;
    if !lift.squares_to_zero() {
        return Err(Error::Invariant(format!("Δ² ≠ 0 after extending to order {}", n + 1)));
    }

    let relations: Vec<RelationSeries<F>> = lift
        .quotient
        .ideal()
        .generators()
        .iter()
        .map(|s| RelationSeries { leading_order: s.leading_order().unwrap_or(0), series: s.clone() })
        .collect();
    if relations.len() > ell {
        return Err(Error::TooManyRelations { found: relations.len(), bound: ell });
    }
    if let Some(r) = relations.iter().find(|r| r.leading_order < 2) {
        return Err(Error::Invariant(format!("relation {} of order {}", r.series, r.leading_order)));
    }
    let dims = lift.quotient.dims_per_degree();
    if dims[0] != 1 || dims.get(1).copied().unwrap_or(0) != state.vars() {
        return Err(Error::Invariant(format!("quotient dimensions {dims:?} lost linear terms")));
    }

    let obstruction_rank = ob.matrix(ell).rank();
    let mut log = state.log.clone();
    log.push(OrderLog {
        order: n + 1,
        small_ext_dim: ob.dim(),
        artifact_dim: ob.artifact_span(n).dim(),
        obstruction_rank,
        relations: relations.len(),
        quotient_dims: dims,
    });
    Ok(LiftState {
        lift,
        relations,
        order: n + 1,
        log,
        ext1: state.ext1.clone(),
        ext2: state.ext2.clone(),
        linear_coords: state.linear_coords.clone(),
    })
}

/// Extends `state` until it reaches `order`.
pub fn extend_to<F: Field>(mut state: LiftState<F>, order: usize) -> Result<LiftState<F>> {
    while state.order < order {
        state = extend_one_order(&state)?;
        let check = verify_lift(&state);
        if !check.passed() {
            return Err(Error::Invariant(check.failures.join("; ")));
        }
    }
    Ok(state)
}

/// The universal lift truncated at `𝔪^{order+1}`.
pub fn universal_lift<F: Field>(complex: &ChainComplex<F>, order: usize) -> Result<LiftState<F>> {
    if order == 0 {
        return Err(Error::Invalid("truncation order must be at least 1".into()));
    }
    extend_to(first_order_lift(complex)?, order)
}

/// Outcome of [`verify_lift`].
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct LiftCheck {
    pub delta_squared_zero: bool,
    pub constant_term_is_d: bool,
    pub linear_terms_ok: bool,
    pub failures: Vec<String>,
}

impl LiftCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `Δ² = 0`, that the constant term is `d`, and that the linear
/// terms are chain maps with the recorded Ext¹ coordinates.
pub fn verify_lift<F: Field>(state: &LiftState<F>) -> LiftCheck {
    let lift = &state.lift;
    let complex = state.complex();
    let mut failures = Vec::new();

    let delta_squared_zero = lift.squares_to_zero();
    if !delta_squared_zero {
        failures.push("Δ² is nonzero".to_string());
    }
    let constant_term_is_d = lift.coeff(&Monomial::one()) == Some(&complex.d());
    if !constant_term_is_d {
        failures.push("constant term differs from d".to_string());
    }
    let mut linear_terms_ok = true;
    for i in 0..state.vars() {
        let ok = match lift.coeff(&Monomial::var(i)) {
            Some(g) => matches!(
                reduce_mod_homotopy(complex, &state.ext1, g),
                Ok((c, _)) if c.as_slice() == state.linear_coords.row(i)
            ),
            None => false,
        };
        if !ok {
            linear_terms_ok = false;
            failures.push(format!("linear term {} is not the recorded Ext^1 class", Monomial::var(i).format(state.vars())));
        }
    }
    LiftCheck { delta_squared_zero, constant_term_is_d, linear_terms_ok, failures }
}

/// Changes the Ext¹ basis by the invertible `r × r` matrix `p`: the new
/// `i`-th linear term is `Σ_j p[i][j] rep_j`.
pub fn change_of_basis<F: Field>(complex: &ChainComplex<F>, p: &KMatrix<F>) -> Result<Vec<GradedMap<F>>> {
    let ext1 = ext_space(complex, 1);
    let r = ext1.dim();
    if p.rows() != r || p.cols() != r {
        return Err(Error::Shape(format!("{}x{} basis change for Ext^1 of dimension {r}", p.rows(), p.cols())));
    }
    (0..r).map(|i| ext1.representative(&ext1.class(p.row(i).to_vec())?, complex)).collect()
}
