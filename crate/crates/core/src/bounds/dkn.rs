//! Separation-based (`tan Θ`) bounds: the separation certificate, the
//! classical and the compressed `tan Θ` bounds, and the quadratic a posteriori
//! bounds that follow from them.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::bounds::mixed::PairData;
use crate::bounds::{
    abs_ritz_change, absolute_tol, check_invariant, norm_table, rayleigh, same_dims, scaled,
    BoundReport, Metadata, ANGLE_MARGIN,
};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, orthonormalize, singular_values, HermitianMatrix};
use crate::majorization::NormTable;
use crate::subspace::{
    compress, invariant_subspace, orthocomplement, restrict, subspace_sum, PrincipalAngles,
    SubspaceBasis, SUM_RANK_TOL,
};

/// Separation constants at or below `SEPARATION_TOL · max(1, ‖A‖_F)` count
/// as no separation.
pub const SEPARATION_TOL: f64 = 1e-12;
/// Slack used when validating a supplied certificate.
pub const CERTIFICATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Below,
    Above,
}

/// The spectrum of `X⊥* A X⊥` lies in `[a, b]` and every Ritz value of `Y`
/// lies in `(−∞, a − δ] ∪ [b + δ, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DknCertificate {
    pub interval: (f64, f64),
    pub delta: f64,
    /// Side of the interval for each Ritz value of `Y` (non-increasing order).
    pub side_assignment: Vec<Side>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Certified(DknCertificate),
    /// Best achievable separation constant, `≤ 0` up to tolerance.
    NoSeparation { delta: f64 },
}

impl Separation {
    pub fn delta(&self) -> Option<f64> {
        match self {
            Self::Certified(c) => Some(c.delta),
            Self::NoSeparation { .. } => None,
        }
    }
}

/// Signed distance of `mu` from `[a, b]` (negative inside).
fn signed_distance(mu: f64, a: f64, b: f64) -> f64 {
    if mu < a {
        a - mu
    } else if mu > b {
        mu - b
    } else {
        -(mu - a).min(b - mu)
    }
}

fn separate(block: &[f64], ritz: &[f64], scale: f64) -> Separation {
    let a = block.iter().copied().fold(f64::INFINITY, f64::min);
    let b = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delta = ritz
        .iter()
        .map(|&mu| signed_distance(mu, a, b))
        .fold(f64::INFINITY, f64::min);
    if delta <= SEPARATION_TOL * scale.max(1.0) {
        return Separation::NoSeparation { delta };
    }
    let side_assignment = ritz
        .iter()
        .map(|&mu| if mu < a { Side::Below } else { Side::Above })
        .collect();
    Separation::Certified(DknCertificate {
        interval: (a, b),
        delta,
        side_assignment,
    })
}

/// Tightest separation certificate for `(A, X, Y)` with `X` invariant.
///
/// The interval is exactly the hull of `λ(X⊥* A X⊥)`; every admissible
/// interval contains it, so the returned `δ` is the largest possible.
pub fn dkn_certificate(a: &HermitianMatrix, x: &SubspaceBasis, y: &SubspaceBasis) -> Result<Separation> {
    same_dims(a, x, y, "dkn_certificate")?;
    check_invariant(a, x)?;
    let block = eigenvalues(&compress(a, &orthocomplement(x)?)?)?;
    let ritz = rayleigh(a, y)?.ritz_values.into_values();
    Ok(separate(&block, &ritz, a.frobenius_norm()))
}

fn validate(a: &HermitianMatrix, x: &SubspaceBasis, y: &SubspaceBasis, cert: &DknCertificate) -> Result<()> {
    same_dims(a, x, y, "tan_theta_classical")?;
    check_invariant(a, x)?;
    let slack = CERTIFICATE_TOL * a.frobenius_norm().max(1.0);
    let (lo, hi) = cert.interval;
    let invalid = |m: String| Err(Error::InvalidCertificate(m));
    if !(cert.delta > 0.0 && cert.delta.is_finite()) || lo > hi {
        return invalid(format!("delta {} / interval [{lo}, {hi}]", cert.delta));
    }
    let block = eigenvalues(&compress(a, &orthocomplement(x)?)?)?;
    if let Some(l) = block.iter().find(|&&l| l < lo - slack || l > hi + slack) {
        return invalid(format!("eigenvalue {l} of the complement block is outside [{lo}, {hi}]"));
    }
    let ritz = rayleigh(a, y)?.ritz_values.into_values();
    if let Some(mu) = ritz
        .iter()
        .find(|&&mu| mu > lo - cert.delta + slack && mu < hi + cert.delta - slack)
    {
        return invalid(format!("Ritz value {mu} is closer than delta to the interval"));
    }
    Ok(())
}

/// `c · tan Θ`; angles at `π/2` make the claim fail rather than overflow.
fn scaled_tan(theta: &PrincipalAngles, c: f64) -> (Vec<f64>, Option<String>) {
    if theta.max() >= FRAC_PI_2 - ANGLE_MARGIN {
        let flag = format!("largest angle {:.6} is not below pi/2", theta.max());
        return (vec![f64::MAX; theta.len()], Some(flag));
    }
    (scaled(&theta.tan(), c), None)
}

fn tan_report(
    id: &str,
    theta: &PrincipalAngles,
    c: f64,
    rhs: Vec<f64>,
    pd: &PairData,
    rel_tol: f64,
    meta: Metadata,
) -> Result<BoundReport> {
    let (lhs, flag) = scaled_tan(theta, c);
    let tol = pd.tol(rel_tol, &rhs);
    let r = BoundReport::submajorization(id, lhs, rhs, tol, meta)?;
    Ok(match flag {
        Some(f) => r.with_flag(f),
        None => r,
    })
}

/// `δ tan Θ ≺_w s(R_Y)` for a valid certificate.
pub fn tan_theta_classical(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    cert: &DknCertificate,
    rel_tol: f64,
) -> Result<BoundReport> {
    validate(a, x, y, cert)?;
    let pd = PairData::new(a, x, y, "tan_theta_classical")?;
    let meta = Metadata {
        delta: Some(cert.delta),
        ..pd.metadata()
    };
    let rhs = pd.ry.residual_singulars.values().to_vec();
    tan_report("tan-classical", &pd.theta, cert.delta, rhs, &pd, rel_tol, meta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImprovedTan {
    /// `δ' tan Θ ≺_w s(P_{X+Y} R_Y)`.
    pub improved: BoundReport,
    /// `δ tan Θ ≺_w s(P_{X+Y} R_Y)`, when the ambient certificate exists.
    pub corollary: Option<BoundReport>,
    /// `δ ≤ δ'` (absolute slack `CERTIFICATE_TOL`), when both exist and are finite.
    pub monotonicity: Option<BoundReport>,
    pub delta: Option<f64>,
    /// `f64::INFINITY` when `X + Y = X` (nothing to separate from).
    pub delta_prime: f64,
}

/// Separation constant of the compression to `X + Y`.
fn compressed_delta(a: &HermitianMatrix, pd: &PairData) -> Result<f64> {
    if pd.p() == pd.k {
        return Ok(f64::INFINITY);
    }
    let s = &pd.sum;
    let sep = dkn_certificate(&compress(a, s)?, &restrict(&pd.x, s)?, &restrict(&pd.y, s)?)?;
    match sep {
        Separation::Certified(c) => Ok(c.delta),
        Separation::NoSeparation { delta } => Err(Error::NoSeparation { delta }),
    }
}

fn ambient_delta(a: &HermitianMatrix, pd: &PairData) -> Result<Option<f64>> {
    if pd.k == pd.d {
        return Ok(None);
    }
    Ok(dkn_certificate(a, &pd.x, &pd.y)?.delta())
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Compressed `tan Θ` bound with the separation constant `δ'` of
/// `(S*AS, S*X, S*Y)`, `S` an orthonormal basis of `X + Y`.
pub fn tan_theta_improved(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<ImprovedTan> {
    let pd = PairData::new(a, x, y, "tan_theta_improved")?;
    check_invariant(a, x)?;
    let delta_prime = compressed_delta(a, &pd)?;
    let delta = ambient_delta(a, &pd)?;
    let meta = Metadata {
        delta,
        delta_prime: finite(delta_prime),
        ..pd.metadata()
    };
    let rhs = pd.ps_ry()?;
    let improved = if delta_prime.is_finite() {
        tan_report("tan-improved", &pd.theta, delta_prime, rhs.clone(), &pd, rel_tol, meta.clone())?
    } else {
        let tol = pd.tol(rel_tol, &rhs);
        BoundReport::submajorization("tan-improved", vec![0.0; pd.k], rhs.clone(), tol, meta.clone())?
    };
    let corollary = delta
        .map(|dl| tan_report("tan-compressed-residual", &pd.theta, dl, rhs.clone(), &pd, rel_tol, meta.clone()))
        .transpose()?;
    let monotonicity = match (delta, finite(delta_prime)) {
        (Some(dl), Some(dp)) => Some(BoundReport::entrywise(
            "separation-monotone",
            vec![dl],
            vec![dp],
            CERTIFICATE_TOL,
            meta,
        )),
        _ => None,
    };
    Ok(ImprovedTan {
        improved,
        corollary,
        monotonicity,
        delta,
        delta_prime,
    })
}

/// `N` applied to `s` with every norm squared and divided by `delta`.
fn squared_over(t: &NormTable, delta: f64) -> NormTable {
    NormTable {
        ky_fan: t.ky_fan.iter().map(|v| v * v / delta).collect(),
        schatten_1: t.schatten_1.powi(2) / delta,
        schatten_2: t.schatten_2.powi(2) / delta,
        schatten_inf: t.schatten_inf.powi(2) / delta,
    }
}

/// `‖λ(ρ(X)) − λ(ρ(Y))‖ ≤ ‖P_{X+Y} R_Y‖² / δ_used` for every Ky Fan norm and
/// Schatten 1, 2, ∞.
///
/// `δ_used` must be a valid separation constant for `(A, X, Y)` or for the
/// compression to `X + Y`, i.e. positive and at most the larger of the two
/// best constants.
pub fn quadratic_aposteriori(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    delta_used: f64,
    rel_tol: f64,
) -> Result<BoundReport> {
    let pd = PairData::new(a, x, y, "quadratic_aposteriori")?;
    check_invariant(a, x)?;
    if !(delta_used > 0.0 && delta_used.is_finite()) {
        return Err(Error::InvalidCertificate(format!("delta {delta_used} is not positive")));
    }
    let delta = ambient_delta(a, &pd)?;
    let delta_prime = match compressed_delta(a, &pd) {
        Ok(v) => Some(v),
        Err(Error::NoSeparation { .. }) => None,
        Err(e) => return Err(e),
    };
    let best = delta.into_iter().chain(delta_prime).fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::InvalidCertificate("no separation for the instance or its compression".into()));
    }
    if delta_used > best + CERTIFICATE_TOL * a.frobenius_norm().max(1.0) {
        return Err(Error::InvalidCertificate(format!(
            "delta {delta_used} exceeds the best separation constant {best}"
        )));
    }
    let meta = Metadata {
        delta: Some(delta_used),
        delta_prime: delta_prime.and_then(finite),
        ..pd.metadata()
    };
    let lhs = norm_table(&pd.ritz_change())?;
    let rhs = squared_over(&norm_table(&pd.ps_ry()?)?, delta_used);
    let tol = absolute_tol(rel_tol, &rhs.ky_fan, pd.a_norm);
    Ok(BoundReport::norm_family("quadratic-aposteriori", &lhs, &rhs, tol, meta))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsecutiveBound {
    pub report: BoundReport,
    /// 1-based: `λ_{j+1}(A) ≤ λ_1(Y*AY) < λ_j(A)`.
    pub j: usize,
    /// `λ_j(A) − λ_1(Y*AY)`.
    pub eta: f64,
    /// Basis of `(I − P_U) Y`, `U` the span of the top `j` eigenvectors.
    #[serde(skip)]
    pub x: Option<SubspaceBasis>,
}

/// Quadratic bound for `k` consecutive eigenvalues below the top `j`:
/// `‖(λ_{i+j}(A))_{i≤k} − λ(ρ(Y))‖ ≤ ‖P_{X+Y} R_Y‖² / η`.
///
/// `j` is the number of eigenvalues of `A` strictly above `λ_1(Y*AY)`
/// (hypothesis 1); hypothesis 2 requires `λ_i(Y*AY) ≥ λ_{i+j}(A)`.
pub fn consecutive_eigenvalue_bound(
    a: &HermitianMatrix,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<ConsecutiveBound> {
    let d = a.dim();
    let k = y.dim();
    if y.ambient_dim() != d {
        return Err(crate::error::mismatch("consecutive_eigenvalue_bound", d, y.ambient_dim()));
    }
    if k >= d {
        return Err(Error::FullSpace);
    }
    let lambda = eigenvalues(a)?;
    let ry = rayleigh(a, y)?;
    let mu = ry.ritz_values.values();
    let slack = 1e-10 * a.frobenius_norm().max(1.0);
    let j = lambda.iter().take_while(|&&l| l > mu[0]).count();
    let failed = |condition: u8, reason: String| Err(Error::HypothesisFailed { condition, reason });
    if j == 0 {
        return failed(1, format!("no eigenvalue of A exceeds the top Ritz value {}", mu[0]));
    }
    let eta = lambda[j - 1] - mu[0];
    if eta <= 1e-10 {
        return failed(1, format!("gap eta = {eta:.3e} is not positive"));
    }
    if let Some(i) = (0..k).find(|&i| mu[i] < lambda[i + j] - slack) {
        return failed(
            2,
            format!("Ritz value {} is below eigenvalue {} (i = {}, j = {j})", mu[i], lambda[i + j], i + 1),
        );
    }

    let u = invariant_subspace(a, &(0..j).collect::<Vec<_>>())?;
    let um = u.matrix();
    let w = y.matrix().sub(&um.matmul(&um.adjoint_matmul(y.matrix())?)?)?;
    let q = orthonormalize(&w, SUM_RANK_TOL)?;
    if q.cols() < k {
        return failed(1, "the top eigenspace meets span Y non-trivially".into());
    }
    let x = SubspaceBasis::from_isometry(q)?;
    let s = subspace_sum(&x, y, SUM_RANK_TOL)?;
    let ps_ry = singular_values(&s.matrix().adjoint_matmul(&ry.residual)?)?;

    let lhs = norm_table(&abs_ritz_change(&lambda[j..j + k], mu))?;
    let rhs = squared_over(&norm_table(&ps_ry)?, eta);
    let tol = absolute_tol(rel_tol, &rhs.ky_fan, a.frobenius_norm());
    let meta = Metadata {
        d,
        k,
        p: Some(s.dim()),
        theta1: Some(crate::subspace::principal_angles(&x, y)?.max()),
        delta: Some(eta),
        ..Metadata::default()
    };
    Ok(ConsecutiveBound {
        report: BoundReport::norm_family("consecutive-eigenvalues", &lhs, &rhs, tol, meta),
        j,
        eta,
        x: Some(x),
    })
}
