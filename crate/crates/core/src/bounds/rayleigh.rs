use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Result};
use crate::linalg::{eigenvalues, singular_values, ComplexMatrix, HermitianMatrix, OrderedSpectrum};
use crate::subspace::{compress, SubspaceBasis};

/// Rayleigh quotient `ρ(X) = X*AX`, its eigenvalues, and the residual
/// `R_X = AX − Xρ(X)`.
#[derive(Clone, Debug)]
pub struct RayleighData {
    pub rho: HermitianMatrix,
    pub ritz_values: OrderedSpectrum,
    pub residual: ComplexMatrix,
    pub residual_singulars: OrderedSpectrum,
}

pub fn rayleigh(a: &HermitianMatrix, x: &SubspaceBasis) -> Result<RayleighData> {
    if a.dim() != x.ambient_dim() {
        return Err(mismatch("rayleigh", a.dim(), x.ambient_dim()));
    }
    let q = x.matrix();
    let aq = a.as_matrix().matmul(q)?;
    let rho = HermitianMatrix::new(q.adjoint_matmul(&aq)?)?;
    let residual = aq.sub(&q.matmul(rho.as_matrix())?)?;
    Ok(RayleighData {
        ritz_values: OrderedSpectrum::descending(eigenvalues(&rho)?)?,
        residual_singulars: OrderedSpectrum::descending(singular_values(&residual)?)?,
        rho,
        residual,
    })
}

/// `Spr_i(A, Z) = λ_i(A_Z) − λ_{p−i+1}(A_Z)`, `i = 1..p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSpread {
    pub values: OrderedSpectrum,
    /// `λ(A_Z)`, non-increasing; kept because several bounds also use
    /// `λ_i(A_Z) − λ_min(A_Z)`.
    pub compression_eigenvalues: OrderedSpectrum,
}

impl SpectralSpread {
    /// First `k` spread entries.
    pub fn leading(&self, k: usize) -> &[f64] {
        &self.values.values()[..k.min(self.values.len())]
    }

    /// `(λ_i(A_Z) − λ_min(A_Z))_{i ≤ k}`.
    pub fn gaps_to_min(&self, k: usize) -> Vec<f64> {
        let l = self.compression_eigenvalues.values();
        let min = l.last().copied().unwrap_or(0.0);
        l.iter().take(k).map(|v| v - min).collect()
    }

    /// `λ_max(A_Z) − λ_min(A_Z)`.
    pub fn width(&self) -> f64 {
        self.values.values().first().copied().unwrap_or(0.0)
    }
}

pub fn spectral_spread(a: &HermitianMatrix, z: &SubspaceBasis) -> Result<SpectralSpread> {
    let l = eigenvalues(&compress(a, z)?)?;
    let p = l.len();
    let values = (0..p).map(|i| l[i] - l[p - 1 - i]).collect();
    Ok(SpectralSpread {
        values: OrderedSpectrum::descending(values)?,
        compression_eigenvalues: OrderedSpectrum::descending(l)?,
    })
}
