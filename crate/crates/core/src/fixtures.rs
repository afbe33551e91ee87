//! Small named complexes used throughout the tests and shipped as problem
//! files.

use std::sync::Arc;

use crate::algebra::{Algebra, RMatrix};
use crate::complexes::ChainComplex;
use crate::field::Field;
use crate::linalg::unit_vec;

/// `J(n, m)`: over `k[x]/(x^m)`, the complex `0 → R --x^n--> R → 0` in
/// degrees 1, 0. Presents `k[x]/(x^n)` when `m ≥ n + 1`.
pub fn jordan<F: Field>(n: usize, m: usize) -> ChainComplex<F> {
    assert!(m > n, "jordan fixture needs m > n");
    let alg = Arc::new(Algebra::truncated_poly(m).expect("m ≥ 1"));
    let d = RMatrix::from_entries(1, 1, m, vec![unit_vec(m, n)]).expect("shape");
    ChainComplex::new(alg, 0, vec![1, 1], vec![d]).expect("d² = 0")
}

/// `K`: over `k[x]/(x^2)`, the complex `0 → R --x--> R --x--> R → 0` in
/// degrees 2, 1, 0.
pub fn obstructed_k<F: Field>() -> ChainComplex<F> {
    let alg = Arc::new(Algebra::truncated_poly(2).expect("m ≥ 1"));
    let x = RMatrix::from_entries(1, 1, 2, vec![unit_vec(2, 1)]).expect("shape");
    ChainComplex::new(alg, 0, vec![1, 1, 1], vec![x.clone(), x]).expect("d² = 0")
}
