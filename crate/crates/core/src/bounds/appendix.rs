//! Classical majorization facts about singular values and eigenvalues, as
//! checkable oracles. They are the building blocks of the Ritz-value bounds and
//! double as independent invariants in tests.

use serde::{Deserialize, Serialize};

use crate::bounds::{add, mul};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{eigenvalues, singular_values, ComplexMatrix, HermitianMatrix};
use crate::majorization::{majorizes, pad_zeros, sort_desc, submajorizes, MajorizationVerdict};
use crate::subspace::SubspaceBasis;

fn violated(item: u8, reason: impl Into<String>) -> Error {
    Error::PreconditionViolated {
        item,
        reason: reason.into(),
    }
}

/// Singular-value relations for square `C, D`:
///
/// 1. `s(C + D) ≺_w s(C) + s(D)`
/// 2. `s(re C) ≺_w s(C)`, `re C = (C + C*)/2`
/// 3. `s(CD) ≺_w s(C) s(D)`
/// 4. if `CD` is Hermitian, `s(CD) ≺_w s(re(DC))`
pub fn singular_value_oracle(c: &ComplexMatrix, d: &ComplexMatrix, item: u8, tol: f64) -> Result<MajorizationVerdict> {
    if !c.is_square() || c.shape() != d.shape() {
        return Err(mismatch("singular_value_oracle", format!("{:?}", c.shape()), format!("{:?}", d.shape())));
    }
    let s = |m: &ComplexMatrix| singular_values(m);
    match item {
        1 => submajorizes(&s(&c.add(d)?)?, &add(&s(c)?, &s(d)?), tol),
        2 => submajorizes(&s(&c.real_part()?)?, &s(c)?, tol),
        3 => submajorizes(&s(&c.matmul(d)?)?, &mul(&s(c)?, &s(d)?), tol),
        4 => {
            let cd = c.matmul(d)?;
            let skew = cd.max_abs_diff(&cd.adjoint())?;
            if skew > 1e-10 * cd.frobenius_norm().max(1.0) {
                return Err(violated(4, format!("CD is not Hermitian (deviation {skew:.3e})")));
            }
            submajorizes(&s(&cd)?, &s(&d.matmul(c)?.real_part()?)?, tol)
        }
        _ => Err(violated(item, "item must be 1, 2, 3 or 4")),
    }
}

/// Eigenvalue relations for Hermitian `C, D`:
///
/// 1. `λ(C) − λ(D) ≺ λ(C − D) ≺ λ(C) − λ↑(D)`
/// 2. `|λ(C) − λ(D)| ≺_w s(C − D)`
/// 3. `λ(Σ P_i C P_i) ≺ λ(C)` for the system of projections onto the given
///    blocks, which must be mutually orthogonal and fill the space.
pub fn hermitian_spectral_oracle(
    c: &HermitianMatrix,
    d: &HermitianMatrix,
    item: u8,
    blocks: &[SubspaceBasis],
    tol: f64,
) -> Result<MajorizationVerdict> {
    if c.dim() != d.dim() {
        return Err(mismatch("hermitian_spectral_oracle", c.dim(), d.dim()));
    }
    let lc = eigenvalues(c)?;
    let ld = eigenvalues(d)?;
    let diff = c.as_matrix().sub(d.as_matrix())?;
    match item {
        1 => {
            let low: Vec<f64> = lc.iter().zip(&ld).map(|(a, b)| a - b).collect();
            let mid = eigenvalues(&HermitianMatrix::new(diff)?)?;
            let high: Vec<f64> = lc.iter().zip(ld.iter().rev()).map(|(a, b)| a - b).collect();
            Ok(majorizes(&low, &mid, tol)?.and(&majorizes(&mid, &high, tol)?))
        }
        2 => {
            let low: Vec<f64> = lc.iter().zip(&ld).map(|(a, b)| (a - b).abs()).collect();
            submajorizes(&low, &singular_values(&diff)?, tol)
        }
        3 => {
            let n = c.dim();
            let mut all = ComplexMatrix::zeros(n, 0);
            for b in blocks {
                if b.ambient_dim() != n {
                    return Err(violated(3, "block lives in a different space"));
                }
                all = all.hcat(b.matrix())?;
            }
            if all.cols() != n || all.orthonormality_defect() > 1e-10 {
                return Err(violated(3, "blocks are not a system of projections"));
            }
            let mut pinched = ComplexMatrix::zeros(n, n);
            for b in blocks {
                let q = b.matrix();
                let inner = q.adjoint_matmul(&c.as_matrix().matmul(q)?)?;
                pinched = pinched.add(&q.matmul(&inner)?.matmul(&q.adjoint())?)?;
            }
            majorizes(&eigenvalues(&HermitianMatrix::new(pinched)?)?, &lc, tol)
        }
        _ => Err(violated(item, "item must be 1, 2 or 3")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatTrick {
    /// `λ([[0, E], [E*, 0]])`
    pub computed: Vec<f64>,
    /// `(s(E), −s(E*))` arranged non-increasing, each padded to its block size.
    pub expected: Vec<f64>,
    pub max_deviation: f64,
}

/// Spectrum of the Hermitian dilation of a `k × (d−k)` matrix `E`.
pub fn hat_trick(e: &ComplexMatrix) -> Result<HatTrick> {
    let (k, m) = e.shape();
    if k == 0 || m == 0 {
        return Err(Error::Empty("hat_trick"));
    }
    let d = k + m;
    let hat = ComplexMatrix::from_fn(d, d, |i, j| match (i < k, j < k) {
        (true, false) => e[(i, j - k)],
        (false, true) => e[(j, i - k)].conj(),
        _ => 0.0.into(),
    });
    let computed = eigenvalues(&HermitianMatrix::new(hat)?)?;
    let top = pad_zeros(&singular_values(e)?, k)?;
    let bottom = pad_zeros(&singular_values(&e.adjoint())?, m)?;
    let joined: Vec<f64> = top.into_iter().chain(bottom.into_iter().map(|v| -v)).collect();
    let expected = sort_desc(&joined)?.into_values();
    let max_deviation = computed
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(HatTrick {
        computed,
        expected,
        max_deviation,
    })
}
