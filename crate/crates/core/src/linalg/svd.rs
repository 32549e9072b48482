//! One-sided (Hestenes) Jacobi SVD for complex matrices.

use crate::error::{Error, Result};
use crate::linalg::eigen::{Rotation, MAX_SWEEPS};
use crate::linalg::matrix::{ComplexMatrix, OrderedSpectrum, C64};

/// `B = U diag(s) V*` with `s` non-increasing and `min(rows, cols)` entries.
#[derive(Clone, Debug)]
pub struct SingularDecomposition {
    pub singular_values: OrderedSpectrum,
    pub left_vectors: ComplexMatrix,
    pub right_vectors: ComplexMatrix,
}

impl SingularDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let u = &self.left_vectors;
        let s = self.singular_values.values();
        let us = ComplexMatrix::from_fn(u.rows(), u.cols(), |i, j| u[(i, j)] * s[j]);
        us.matmul(&self.right_vectors.adjoint()).expect("factor shapes agree")
    }
}

pub fn svd(b: &ComplexMatrix) -> Result<SingularDecomposition> {
    if b.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if b.rows() < b.cols() {
        let t = tall_svd(&b.adjoint())?;
        return Ok(SingularDecomposition {
            singular_values: t.singular_values,
            left_vectors: t.right_vectors,
            right_vectors: t.left_vectors,
        });
    }
    tall_svd(b)
}

/// Singular values only, non-increasing.
pub fn singular_values(b: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(b)?.singular_values.into_values())
}

fn tall_svd(b: &ComplexMatrix) -> Result<SingularDecomposition> {
    let (m, n) = b.shape();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| b.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let tol = (m.max(1) as f64) * f64::EPSILON;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                if gamma.norm() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                let Some(rot) = Rotation::annihilating(alpha, beta, gamma) else {
                    continue;
                };
                rotated = true;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    (*x, *y) = rot.apply_right(*x, *y);
                }
                let (left, right) = v.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    (*x, *y) = rot.apply_right(*x, *y);
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let norms: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let s_max = perm.first().map_or(0.0, |&i| norms[i]);

    // Columns with negligible norm carry no reliable direction; their left
    // vectors are completed to an orthonormal set instead.
    let cutoff = 1e-13 * s_max;
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (slot, &j) in perm.iter().enumerate() {
        if norms[j] > cutoff && norms[j] > 0.0 {
            left.push(cols[j].iter().map(|z| z / norms[j]).collect());
        } else {
            left.push(Vec::new());
            deficient.push(slot);
        }
    }
    for slot in deficient {
        let filled: Vec<&Vec<C64>> = left.iter().filter(|c| !c.is_empty()).collect();
        let completion = complete_orthonormal(m, &filled);
        left[slot] = completion;
    }

    let singular_values = OrderedSpectrum::descending(perm.iter().map(|&j| norms[j]).collect())?;
    let left_vectors = ComplexMatrix::from_columns(m, &left)?;
    let right_cols: Vec<Vec<C64>> = perm.iter().map(|&j| v[j].clone()).collect();
    let right_vectors = ComplexMatrix::from_columns(n, &right_cols)?;
    Ok(SingularDecomposition {
        singular_values,
        left_vectors,
        right_vectors,
    })
}

/// A unit vector orthogonal to every vector in `basis` (twice-iterated
/// Gram–Schmidt over the standard basis, keeping the best candidate).
pub(crate) fn complete_orthonormal(dim: usize, basis: &[&Vec<C64>]) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for e in 0..dim {
        let mut w = vec![C64::new(0.0, 0.0); dim];
        w[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis {
                let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b.iter()) {
                    *wi -= proj * bi;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(n, _)| norm > *n) {
            best = Some((norm, w));
        }
        if norm > 0.5 {
            break;
        }
    }
    let (norm, w) = best.expect("dim >= 1");
    w.into_iter().map(|z| z / norm).collect()
}

/// Inverse through the SVD, `V diag(1/s) U*`.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(crate::error::mismatch("inverse", a.rows(), a.cols()));
    }
    let d = svd(a)?;
    let s = d.singular_values.values();
    let s_max = s.first().copied().unwrap_or(0.0);
    if s.last().is_none_or(|&x| x <= 1e-14 * s_max) || s_max == 0.0 {
        return Err(Error::Singular);
    }
    let v = &d.right_vectors;
    let vs = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] / s[j]);
    vs.matmul(&d.left_vectors.adjoint())
}
