//! Small extensions of a truncated quotient `A = T/J` and the obstruction
//! map into Ext².
//!
//! Classes of small extensions are coordinates on `J/(𝔪J + J𝔪)`: a
//! functional `f` there defines `A' = T/ker f`, whose kernel over `A` is
//! spanned by any `ε` with `f(ε) = 1`.

use crate::complexes::{reduce_mod_homotopy, ExtBasis};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::freealg::{boundary_span, MonomialSpace, QuotientBasis, TruncSeries};
use crate::lifting::{obstruction, LiftState, TruncatedLift};
use crate::linalg::{unit_vec, KMatrix, QuotientMap, Subspace};

/// `J + 𝔪^{N+1}` and `𝔪J + J𝔪` inside `T_cap`, as a quotient map.
pub(crate) fn small_extension_map<F: Field>(a: &QuotientBasis<F>, cap: usize) -> Result<(MonomialSpace, QuotientMap<F>)> {
    let n = a.order_cap();
    if cap < n + 1 {
        return Err(Error::GuardTooSmall { guard: cap + 1, needed: n + 2 });
    }
    let from = a.space();
    let space = MonomialSpace::new(from.vars(), cap);
    let mut big = Subspace::span(space.dim(), a.ideal().span().basis().iter().map(|b| from.transport(b, &space)));
    for d in n + 1..=cap {
        for m in space.degree_range(d) {
            big.insert(unit_vec(space.dim(), m));
        }
    }
    let boundary = boundary_span(space, big.basis());
    Ok((space, QuotientMap::new(big, boundary)?))
}

/// The space of small extensions of `A`, through functionals on
/// `J/(𝔪J + J𝔪)`.
#[derive(Clone, Debug)]
pub struct SmallExtSpace<F> {
    base: QuotientBasis<F>,
    guard: usize,
    space: MonomialSpace,
    map: QuotientMap<F>,
}

/// A small extension class in the coordinates of a [`SmallExtSpace`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallExtClass<F> {
    pub coords: Vec<F>,
}

impl<F: Field> SmallExtClass<F> {
    pub fn zero(dim: usize) -> Self {
        SmallExtClass { coords: vec![F::zero(); dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b.clone()).collect();
        SmallExtClass { coords }
    }

    pub fn scale(&self, c: &F) -> Self {
        SmallExtClass { coords: self.coords.iter().map(|a| c.clone() * a.clone()).collect() }
    }
}

/// `J/(𝔪J + J𝔪)` computed in `T_{guard-1}`; needs `guard ≥ N + 2`.
pub fn small_ext_space<F: Field>(a: &QuotientBasis<F>, guard: usize) -> Result<SmallExtSpace<F>> {
    let needed = a.order_cap() + 2;
    if guard < needed {
        return Err(Error::GuardTooSmall { guard, needed });
    }
    let (space, map) = small_extension_map(a, guard - 1)?;
    Ok(SmallExtSpace { base: a.clone(), guard, space, map })
}

impl<F: Field> SmallExtSpace<F> {
    pub fn base(&self) -> &QuotientBasis<F> {
        &self.base
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    pub fn space(&self) -> MonomialSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn quotient_map(&self) -> &QuotientMap<F> {
        &self.map
    }

    /// Representative in `J` of the `q`-th basis direction.
    pub fn direction(&self, q: usize) -> TruncSeries<F> {
        TruncSeries::from_coords(self.space, &self.map.complement_vector(q))
    }

    /// Class of `v ∈ J` in `J/(𝔪J + J𝔪)`.
    pub fn coords(&self, v: &[F]) -> Result<Vec<F>> {
        self.map.coords(v)
    }

    /// The value of the `q`-th coordinate functional on each basis monomial
    /// that lies in `J`, `None` elsewhere.
    pub fn functional(&self, q: usize) -> Vec<Option<F>> {
        (0..self.space.dim())
            .map(|m| {
                let e = unit_vec(self.space.dim(), m);
                self.map.coords(&e).ok().map(|c| c[q].clone())
            })
            .collect()
    }

    /// Directions coming from the truncation: the image of
    /// `J ∩ 𝔪^{N+1}`.
    pub fn artifact_span(&self) -> Subspace<F> {
        let sp = self.space;
        let vs = (self.base.order_cap() + 1..=sp.cap())
            .flat_map(|d| sp.degree_range(d))
            .map(|m| self.map.coords_unchecked(&unit_vec(sp.dim(), m)));
        Subspace::span(self.dim(), vs)
    }

    /// Classes of the minimal relation generators of `J`.
    pub fn relation_classes(&self) -> Vec<Vec<F>> {
        let from = self.base.space();
        self.base
            .ideal()
            .minimal_generators()
            .iter()
            .map(|g| self.map.coords_unchecked(&from.transport(&g.to_coords(), &self.space)))
            .collect()
    }
}

/// `α(c)`: lift `Δ` verbatim to the extension defined by `c` and reduce
/// `σ` in `Δ'² = σ ⊗ ε` modulo homotopy.
pub fn alpha<F: Field>(lift: &TruncatedLift<F>, ext2: &ExtBasis<F>, space: &SmallExtSpace<F>, c: &SmallExtClass<F>) -> Result<Vec<F>> {
    if c.coords.len() != space.dim() {
        return Err(Error::Shape(format!("{} coordinates for a {}-dimensional space", c.coords.len(), space.dim())));
    }
    if lift.quotient().ideal().span() != space.base.ideal().span() {
        return Err(Error::Invalid("lift and small extension have different bases".into()));
    }
    if c.is_zero() {
        return Ok(vec![F::zero(); ext2.dim()]);
    }
    let complex = lift.complex();
    let f = |v: &[F]| -> F {
        let x = space.map.coords_unchecked(v);
        x.iter().zip(&c.coords).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    };
    let mut sigma = Vec::new();
    for col in lift.square_columns(space.space) {
        if !space.map.outer().contains(&col) {
            return Err(Error::Invariant("Δ² does not vanish over the base".into()));
        }
        sigma.push(f(&col));
    }
    let s = complex.map_from_vec(-2, &sigma)?;
    let (coords, _) = reduce_mod_homotopy(complex, ext2, &s).map_err(|e| match e {
        Error::NotChainMap(m) => Error::Invariant(format!("obstruction is not a chain map: {m}")),
        other => other,
    })?;
    Ok(coords)
}

/// Matrix of `α` on the coordinate basis: Ext² rows, one column per
/// small-extension direction.
pub fn alpha_matrix<F: Field>(lift: &TruncatedLift<F>, ext2: &ExtBasis<F>, guard: usize) -> Result<KMatrix<F>> {
    let needed = lift.quotient().order_cap() + 2;
    if guard < needed {
        return Err(Error::GuardTooSmall { guard, needed });
    }
    Ok(obstruction(lift, ext2, guard - 1)?.matrix(ext2.dim()))
}

/// Rank of `α` on the non-artifact directions.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct InjectivityReport {
    pub small_ext_dim: usize,
    pub artifact_dim: usize,
    pub relation_dim: usize,
    pub alpha_rank: usize,
    pub alpha_rank_on_relations: usize,
    pub injective: bool,
}

pub fn injectivity_report<F: Field>(lift: &TruncatedLift<F>, ext2: &ExtBasis<F>, guard: usize) -> Result<InjectivityReport> {
    let space = small_ext_space(lift.quotient(), guard)?;
    let alpha = alpha_matrix(lift, ext2, guard)?;
    let relations = space.relation_classes();
    let artifact = space.artifact_span();
    let mut combined = artifact.clone();
    for r in &relations {
        combined.insert(r.clone());
    }
    if combined.dim() != space.dim() || artifact.dim() + relations.len() != space.dim() {
        return Err(Error::Invariant("relation classes do not complement the artifact directions".into()));
    }
    let images: Vec<Vec<F>> = relations.iter().map(|r| alpha.mul_vec(r).expect("shape")).collect();
    let alpha_rank_on_relations = Subspace::span(ext2.dim(), images).dim();
    Ok(InjectivityReport {
        small_ext_dim: space.dim(),
        artifact_dim: artifact.dim(),
        relation_dim: relations.len(),
        alpha_rank: alpha.rank(),
        alpha_rank_on_relations,
        injective: alpha_rank_on_relations == relations.len(),
    })
}

/// `α` on the artifact directions against the obstruction to the next
/// order: the two images in Ext² should coincide.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ArtifactReport {
    pub artifact_dim: usize,
    pub alpha_image_dim: usize,
    pub next_order_image_dim: usize,
    pub matches: bool,
}

pub fn artifact_report<F: Field>(lift: &TruncatedLift<F>, ext2: &ExtBasis<F>, guard: usize) -> Result<ArtifactReport> {
    let n = lift.quotient().order_cap();
    let space = small_ext_space(lift.quotient(), guard)?;
    let artifact = space.artifact_span();
    let mut direct = Subspace::zero(ext2.dim());
    for v in artifact.basis() {
        direct.insert(alpha(lift, ext2, &space, &SmallExtClass { coords: v.clone() })?);
    }
    // Classes of the degree N+1 coefficients of Δ², as the next lifting
    // step sees them.
    let ob = obstruction(lift, ext2, n + 1)?;
    let m = ob.matrix(ext2.dim());
    let sp = ob.space;
    let next = Subspace::span(
        ext2.dim(),
        sp.degree_range(n + 1).map(|i| m.mul_vec(&ob.small.coords_unchecked(&unit_vec(sp.dim(), i))).expect("shape")),
    );
    Ok(ArtifactReport {
        artifact_dim: artifact.dim(),
        alpha_image_dim: direct.dim(),
        next_order_image_dim: next.dim(),
        matches: direct == next,
    })
}

/// `dim (Ext¹)²` against `dim I/(I ∩ 𝔪³)`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SquareIsoReport {
    pub ext1_squared_dim: usize,
    pub quadratic_relations_dim: usize,
    pub passed: bool,
}

pub fn square_iso_report<F: Field>(state: &LiftState<F>) -> Result<SquareIsoReport> {
    if state.order() < 3 {
        return Err(Error::Invalid(format!("square comparison needs order 3, state is at order {}", state.order())));
    }
    let complex = state.complex();
    let mut products = Subspace::zero(state.ext2().dim());
    for a in state.ext1().reps() {
        for b in state.ext1().reps() {
            let (c, _) = reduce_mod_homotopy(complex, state.ext2(), &complex.compose(a, b)?)?;
            products.insert(c);
        }
    }
    let ext1_squared_dim = products.dim();
    let quadratic_relations_dim = state.ladder()[3];
    Ok(SquareIsoReport { ext1_squared_dim, quadratic_relations_dim, passed: ext1_squared_dim == quadratic_relations_dim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{ext_space, ExtAlgebra};
    use crate::fixtures;
    use crate::freealg::{ideal_span, IdealSpan};
    use crate::lifting::{first_order_lift, universal_lift};
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_i64(n)
    }

    fn t_squared(n: usize) -> QuotientBasis<Q> {
        QuotientBasis::new(ideal_span(1, &[TruncSeries::parse("t.t", 1, n).unwrap()], n))
    }

    #[test]
    fn small_ext_dims() {
        // T/𝔪² with r = 2: every degree-2 monomial
        assert_eq!(small_ext_space(&QuotientBasis::<Q>::free(2, 1), 3).unwrap().dim(), 4);
        // A = k, J = 𝔪
        let k = QuotientBasis::new(IdealSpan::<Q>::zero(3, 0));
        assert_eq!(small_ext_space(&k, 2).unwrap().dim(), 3);
        assert_eq!(small_ext_space(&t_squared(3), 5).unwrap().dim(), 1);
        assert!(matches!(small_ext_space(&t_squared(3), 4), Err(Error::GuardTooSmall { .. })));
    }

    #[test]
    fn larger_guard_changes_nothing() {
        let a = t_squared(2);
        let d4 = small_ext_space(&a, 4).unwrap().dim();
        let d6 = small_ext_space(&a, 6).unwrap().dim();
        assert_eq!(d4, d6);
    }

    #[test]
    fn alpha_of_zero_is_zero() {
        let k = fixtures::obstructed_k::<Q>();
        let s = universal_lift(&k, 3).unwrap();
        let sp = small_ext_space(s.quotient(), 5).unwrap();
        let z = alpha(s.lift(), s.ext2(), &sp, &SmallExtClass::zero(sp.dim())).unwrap();
        assert!(z.iter().all(|c| c == &q(0)));
    }

    #[test]
    fn alpha_over_first_order_is_yoneda() {
        let kk = fixtures::obstructed_k::<Q>().direct_sum(&fixtures::obstructed_k()).unwrap();
        let s = first_order_lift(&kk).unwrap();
        let sp = small_ext_space(s.quotient(), 3).unwrap();
        let ext = ExtAlgebra::new(&kk, 2);
        let r = s.vars();
        // functional with values c_ij on t_i t_j
        let cs: Vec<Q> = (0..r * r).map(|k| q(k as i64 % 3 - 1)).collect();
        let mut coords = vec![q(0); sp.dim()];
        for (idx, c) in cs.iter().enumerate() {
            let m = sp.space().offset(2) + idx;
            let v = unit_vec(sp.space().dim(), m);
            let x = sp.coords(&v).unwrap();
            for (a, b) in coords.iter_mut().zip(&x) {
                *a += c.clone() * b.clone();
            }
        }
        let got = alpha(s.lift(), s.ext2(), &sp, &SmallExtClass { coords }).unwrap();
        let mut want = vec![q(0); s.ext2().dim()];
        for i in 0..r {
            for j in 0..r {
                let p = ext.yoneda(&ext.unit_class(1, i), &ext.unit_class(1, j)).unwrap();
                for (w, x) in want.iter_mut().zip(&p.coords) {
                    *w += cs[i * r + j].clone() * x.clone();
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn alpha_image_over_first_order_is_ext1_squared() {
        for c in [fixtures::obstructed_k::<Q>(), fixtures::jordan(2, 4)] {
            let s = first_order_lift(&c).unwrap();
            let m = alpha_matrix(s.lift(), s.ext2(), 3).unwrap();
            let image = Subspace::span(m.rows(), (0..m.cols()).map(|j| m.col(j)));
            assert_eq!(image, ExtAlgebra::new(&c, 2).ext1_squared().unwrap());
        }
    }

    #[test]
    fn fixture_k_revives_t_squared() {
        let k = fixtures::obstructed_k::<Q>();
        let s = universal_lift(&k, 4).unwrap();
        let r = injectivity_report(s.lift(), s.ext2(), 6).unwrap();
        assert_eq!(r.relation_dim, 1);
        assert_eq!(r.alpha_rank_on_relations, 1);
        assert!(r.injective);
        assert_eq!(ext_space(&k, 2).dim(), 1);
    }

    #[test]
    fn square_iso_on_fixtures() {
        let k = fixtures::obstructed_k::<Q>();
        let r = square_iso_report(&universal_lift(&k, 3).unwrap()).unwrap();
        assert_eq!((r.ext1_squared_dim, r.quadratic_relations_dim), (1, 1));
        let j = fixtures::jordan::<Q>(2, 4);
        let r = square_iso_report(&universal_lift(&j, 3).unwrap()).unwrap();
        assert_eq!((r.ext1_squared_dim, r.quadratic_relations_dim), (0, 0));
        let kk = k.direct_sum(&k).unwrap();
        let r = square_iso_report(&universal_lift(&kk, 3).unwrap()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn artifact_images_are_next_order_obstructions() {
        let k = fixtures::obstructed_k::<Q>();
        let first = first_order_lift(&k).unwrap();
        let r = artifact_report(first.lift(), first.ext2(), 3).unwrap();
        assert_eq!((r.artifact_dim, r.alpha_image_dim, r.next_order_image_dim), (1, 1, 1));
        assert!(r.matches);
        let s = universal_lift(&k, 3).unwrap();
        let r = artifact_report(s.lift(), s.ext2(), 6).unwrap();
        assert_eq!((r.artifact_dim, r.alpha_image_dim), (0, 0));
        assert!(r.matches);
        let kk = k.direct_sum(&k).unwrap();
        let first = first_order_lift(&kk).unwrap();
        let r = artifact_report(first.lift(), first.ext2(), 3).unwrap();
        assert_eq!((r.artifact_dim, r.alpha_image_dim), (16, 4));
        assert!(r.matches);
    }

    #[test]
    fn small_ext_dim_stabilizes() {
        let k = fixtures::obstructed_k::<Q>();
        let s = universal_lift(&k, 5).unwrap();
        let dims: Vec<usize> = (2..=5)
            .map(|n| {
                let a = QuotientBasis::new(s.ideal().truncate(n - 1));
                small_ext_space(&a, n + 1).unwrap().dim()
            })
            .collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(dims[dims.len() - 1], dims[dims.len() - 2]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn alpha_is_linear(u in proptest::collection::vec(-3i64..4, 4), v in proptest::collection::vec(-3i64..4, 4), a in -3i64..4, b in -3i64..4) {
            let kk = fixtures::obstructed_k::<Q>().direct_sum(&fixtures::obstructed_k()).unwrap();
            let s = first_order_lift(&kk).unwrap();
            let sp = small_ext_space(s.quotient(), 3).unwrap();
            let mk = |x: &[i64]| SmallExtClass { coords: (0..sp.dim()).map(|i| q(x[i % x.len()] + i as i64 % 2)).collect::<Vec<Q>>() };
            let (cu, cv) = (mk(&u), mk(&v));
            let lhs = alpha(s.lift(), s.ext2(), &sp, &cu.scale(&q(a)).add(&cv.scale(&q(b)))).unwrap();
            let au = alpha(s.lift(), s.ext2(), &sp, &cu).unwrap();
            let av = alpha(s.lift(), s.ext2(), &sp, &cv).unwrap();
            let rhs: Vec<Q> = au.iter().zip(&av).map(|(x, y)| q(a) * x.clone() + q(b) * y.clone()).collect();
            prop_assert_eq!(lhs, rhs);
            let m = alpha_matrix(s.lift(), s.ext2(), 3).unwrap();
            prop_assert_eq!(m.mul_vec(&cu.coords).unwrap(), au);
        }
    }
}
