//! Universal lifts of finite projective complexes over truncated
//! non-commutative power series rings.

pub mod algebra;
pub mod complexes;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod freealg;
pub mod lifting;
pub mod linalg;
pub mod modcomp;
pub mod problem;
pub mod report;
pub mod smallext;

pub use algebra::{Algebra, AlgebraElement, RMatrix};
pub use complexes::{ext_space, reduce_mod_homotopy, ChainComplex, ExtAlgebra, ExtBasis, ExtClass, GradedMap};
pub use error::{Error, Result};
pub use field::{Field, Fp};
pub use freealg::{abelianize, ideal_span, IdealSpan, Monomial, MonomialSpace, QuotientBasis, TruncSeries};
pub use linalg::{KMatrix, LinearSolver, QuotientMap, Subspace};

pub type Rational = num_rational::BigRational;
pub type Gf2 = Fp<2>;
pub type Gf3 = Fp<3>;
pub type Gf5 = Fp<5>;
pub type Gf7 = Fp<7>;
pub type Gf10007 = Fp<10007>;
pub type QMatrix = KMatrix<Rational>;
