//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianMatrix, OrderedSpectrum, C64};

pub const MAX_SWEEPS: usize = 100;
/// Convergence threshold on the off-diagonal Frobenius norm, relative to `‖A‖_F`.
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;

/// `A = V diag(λ) V*` with λ non-increasing.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: OrderedSpectrum,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `‖A V − V diag(λ)‖_F`.
    pub fn residual(&self, a: &HermitianMatrix) -> f64 {
        let av = a.as_matrix().matmul(&self.eigenvectors).expect("square");
        let n = a.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for (j, &l) in self.eigenvalues.values().iter().enumerate() {
                acc += (av[(i, j)] - self.eigenvectors[(i, j)] * l).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Unitary 2x2 Jacobi rotation annihilating the off-diagonal entry of
/// `[[alpha, gamma], [conj(gamma), beta]]`.
///
/// With `gamma = r e^{iφ}` the rotation is
/// `U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]`, and `U* G U` has diagonal
/// `(alpha - t r, beta + t r)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rotation {
    pub c: f64,
    pub s: f64,
    /// `e^{iφ}`
    pub phase: C64,
    pub t: f64,
}

impl Rotation {
    pub fn annihilating(alpha: f64, beta: f64, gamma: C64) -> Option<Self> {
        let r = gamma.norm();
        if r == 0.0 || !r.is_finite() {
            return None;
        }
        let phase = gamma / r;
        let zeta = (beta - alpha) / (2.0 * r);
        let t = if zeta.abs() > 1e150 {
            0.5 / zeta
        } else {
            let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
            sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Some(Self { c, s: t * c, phase, t })
    }

    /// `(x, y) <- (c x - s e^{-iφ} y, s x + c e^{-iφ} y)`, i.e. right-multiplication
    /// of the column pair by `U`.
    #[inline]
    pub fn apply_right(&self, x: C64, y: C64) -> (C64, C64) {
        let ep = self.phase.conj();
        (x * self.c - ep * y * self.s, x * self.s + ep * y * self.c)
    }

    /// Left-multiplication of the row pair by `U*`.
    #[inline]
    pub fn apply_left(&self, x: C64, y: C64) -> (C64, C64) {
        let e = self.phase;
        (x * self.c - e * y * self.s, x * self.s + e * y * self.c)
    }
}

pub fn hermitian_eig(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let src = a.as_matrix();
    if src.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut m = src.clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let Some(rot) = Rotation::annihilating(m[(p, p)].re, m[(q, q)].re, m[(p, q)])
                else {
                    continue;
                };
                let r = m[(p, q)].norm();
                let (app, aqq) = (m[(p, p)].re, m[(q, q)].re);
                for i in 0..n {
                    let (x, y) = rot.apply_right(m[(i, p)], m[(i, q)]);
                    m[(i, p)] = x;
                    m[(i, q)] = y;
                }
                for j in 0..n {
                    let (x, y) = rot.apply_left(m[(p, j)], m[(q, j)]);
                    m[(p, j)] = x;
                    m[(q, j)] = y;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(app - rot.t * r, 0.0);
                m[(q, q)] = C64::new(aqq + rot.t * r, 0.0);
                for i in 0..n {
                    let (x, y) = rot.apply_right(v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x;
                    v[(i, q)] = y;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > threshold {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let eigenvalues = OrderedSpectrum::descending(perm.iter().map(|&i| diag[i]).collect())?;
    let eigenvectors = v.select_columns(&perm);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, non-increasing.
pub fn eigenvalues(a: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(a)?.eigenvalues.into_values())
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}
