//! Dense complex linear algebra: Hermitian eigensolver, SVD, orthonormalization.

mod eigen;
mod matrix;
mod svd;

pub use eigen::{eigenvalues, hermitian_eig, EigenDecomposition, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{ComplexMatrix, HermitianMatrix, Order, OrderedSpectrum, C64};
pub use svd::{inverse, singular_values, svd, SingularDecomposition};

use crate::error::{Error, Result};

/// Orthonormal basis of the column space of `m`.
///
/// Left singular vectors whose singular value exceeds `rank_tol · s_max` are
/// kept, so the column count is the numerical rank.
pub fn orthonormalize(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let d = svd(m)?;
    let s = d.singular_values.values();
    let s_max = s.first().copied().unwrap_or(0.0);
    if s_max == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let keep: Vec<usize> = (0..s.len()).filter(|&j| s[j] > rank_tol * s_max).collect();
    if keep.is_empty() {
        return Err(Error::ZeroMatrix);
    }
    Ok(d.left_vectors.select_columns(&keep))
}

/// Orthogonal projector `Q Q*` onto the span of the orthonormal columns of `q`.
pub fn projector_of(q: &ComplexMatrix) -> HermitianMatrix {
    HermitianMatrix::new(q.matmul(&q.adjoint()).expect("q q* always defined"))
        .expect("square by construction")
}
