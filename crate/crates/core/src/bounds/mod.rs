//! Ritz-value bounds as executable checks.
//!
//! Every check evaluates both sides of one inequality on a concrete
//! `(A, X, Y)` and returns a [`BoundReport`]. A report never panics on a
//! violated inequality; violations are data (`verdict.holds == false`).
//! Preconditions that the underlying statement needs (angles below `π/2`,
//! invariance, separation, ...) are errors instead.
//!
//! Tolerances are relative: a check called with `rel_tol` accepts margins down
//! to `−rel_tol · max(1, ‖rhs‖_∞ · k, ‖A‖_F)`.

mod apriori;
mod appendix;
mod dkn;
mod mixed;
mod rayleigh;

pub use apriori::{
    apriori_constant_corollary, apriori_invariant_quadratic, apriori_mixed_theorem,
    apriori_spread_partial, corollary_prefactor, fem_reference_bounds, FemRegime,
};
pub use appendix::{hat_trick, hermitian_spectral_oracle, singular_value_oracle, HatTrick};
pub use dkn::{
    consecutive_eigenvalue_bound, dkn_certificate, quadratic_aposteriori, tan_theta_classical,
    tan_theta_improved, ConsecutiveBound, DknCertificate, ImprovedTan, Separation, Side,
    CERTIFICATE_TOL, SEPARATION_TOL,
};
pub use mixed::{
    eigenlist_distance_bound, mixed_bound_cos, mixed_bound_tan, positive_t_distance_bound,
    residual_projection_bound, squared_mixed_bounds,
};
pub use rayleigh::{rayleigh, spectral_spread, RayleighData, SpectralSpread};

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::HermitianMatrix;
use crate::majorization::{submajorizes, uin_norms, MajorizationVerdict, NormTable};
use crate::subspace::{PrincipalAngles, SubspaceBasis};

/// Relative tolerance used when callers have no better value.
pub const DEFAULT_REL_TOL: f64 = 1e-9;
/// Angles at or above `π/2 − ANGLE_MARGIN` are treated as `π/2`.
pub const ANGLE_MARGIN: f64 = 1e-8;
/// `‖R_X‖_F ≤ INVARIANCE_TOL · ‖A‖_F` is accepted as `A`-invariance.
pub const INVARIANCE_TOL: f64 = 1e-9;

/// How `lhs` and `rhs` of a report are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≺_w rhs`; margins are prefix-sum differences.
    Submajorization,
    /// `lhs` and `rhs` are [`NormTable`]s flattened as
    /// `(ky_fan_1, …, ky_fan_k, schatten_1, schatten_2, schatten_inf)`;
    /// margins are `rhs_i − lhs_i`.
    NormInequalityFamily,
    /// `lhs_i ≤ rhs_i` for every `i` without rearrangement.
    Entrywise,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub d: usize,
    pub k: usize,
    /// `dim(X + Y)` when the bound uses it.
    pub p: Option<usize>,
    pub theta1: Option<f64>,
    pub delta: Option<f64>,
    /// `None` with `p == Some(k)` means the compressed complement is empty and
    /// any separation constant is admissible.
    pub delta_prime: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_id: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub verdict: MajorizationVerdict,
    pub relation: Relation,
    /// Absolute slack the verdict was computed with.
    pub tol: f64,
    /// `false` for statements that are evaluated but not claimed (conjectures).
    pub must_hold: bool,
    pub metadata: Metadata,
    /// Instance-level observations that do not by themselves fail the check.
    pub flags: Vec<String>,
}

impl BoundReport {
    pub(crate) fn submajorization(
        theorem_id: &str,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        tol: f64,
        metadata: Metadata,
    ) -> Result<Self> {
        let verdict = submajorizes(&lhs, &rhs, tol)?;
        Ok(Self {
            theorem_id: theorem_id.to_string(),
            lhs,
            rhs,
            verdict,
            relation: Relation::Submajorization,
            tol,
            must_hold: true,
            metadata,
            flags: Vec::new(),
        })
    }

    /// Norm-family comparison `N(lhs) ≤ N(rhs)` where the caller supplies the
    /// already-evaluated tables.
    pub(crate) fn norm_family(
        theorem_id: &str,
        lhs: &NormTable,
        rhs: &NormTable,
        tol: f64,
        metadata: Metadata,
    ) -> Self {
        let lhs = flatten(lhs);
        let rhs = flatten(rhs);
        Self::pointwise(theorem_id, lhs, rhs, tol, metadata, Relation::NormInequalityFamily)
    }

    pub(crate) fn entrywise(
        theorem_id: &str,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        tol: f64,
        metadata: Metadata,
    ) -> Self {
        Self::pointwise(theorem_id, lhs, rhs, tol, metadata, Relation::Entrywise)
    }

    fn pointwise(
        theorem_id: &str,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        tol: f64,
        metadata: Metadata,
        relation: Relation,
    ) -> Self {
        let verdict = pointwise_verdict(&lhs, &rhs, tol);
        Self {
            theorem_id: theorem_id.to_string(),
            lhs,
            rhs,
            verdict,
            relation,
            tol,
            must_hold: true,
            metadata,
            flags: Vec::new(),
        }
    }

    /// Recomputes the verdict from `lhs`, `rhs` and `tol`.
    pub fn recheck(&self) -> Result<MajorizationVerdict> {
        match self.relation {
            Relation::Submajorization => submajorizes(&self.lhs, &self.rhs, self.tol),
            Relation::NormInequalityFamily | Relation::Entrywise => {
                if self.lhs.len() != self.rhs.len() {
                    return Err(mismatch("recheck", self.lhs.len(), self.rhs.len()));
                }
                Ok(pointwise_verdict(&self.lhs, &self.rhs, self.tol))
            }
        }
    }

    /// True when the report is a failed claim (ignores conjectures).
    pub fn is_violation(&self) -> bool {
        self.must_hold && !self.verdict.holds
    }

    pub(crate) fn with_flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    pub(crate) fn conjecture(mut self) -> Self {
        self.must_hold = false;
        self
    }

    /// Largest `|rhs_i − lhs_i|` (entries compared in stored order).
    pub fn max_gap(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn flatten(t: &NormTable) -> Vec<f64> {
    let mut v = t.ky_fan.clone();
    v.extend([t.schatten_1, t.schatten_2, t.schatten_inf]);
    v
}

fn pointwise_verdict(lhs: &[f64], rhs: &[f64], tol: f64) -> MajorizationVerdict {
    let margins: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| b - a).collect();
    let holds = margins.iter().all(|&m| m >= -tol) && lhs.iter().chain(rhs).all(|v| !v.is_nan());
    let gap = rhs.iter().sum::<f64>() - lhs.iter().sum::<f64>();
    MajorizationVerdict::from_margins(margins, gap, holds)
}

/// Absolute slack for a comparison against `rhs` on a matrix of size `a_norm`.
pub fn absolute_tol(rel_tol: f64, rhs: &[f64], a_norm: f64) -> f64 {
    let sup = rhs.iter().filter(|v| v.is_finite()).fold(0.0_f64, |m, v| m.max(v.abs()));
    rel_tol * (sup * rhs.len() as f64).max(a_norm).max(1.0)
}

pub(crate) fn norm_table(v: &[f64]) -> Result<NormTable> {
    uin_norms(&v.iter().map(|x| x.abs()).collect::<Vec<_>>())
}

/// `|λ(ρ(X)) − λ(ρ(Y))|` from two non-increasing lists, resorted non-increasing.
pub(crate) fn abs_ritz_change(rx: &[f64], ry: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = rx.iter().zip(ry).map(|(a, b)| (a - b).abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub(crate) fn same_dims(a: &HermitianMatrix, x: &SubspaceBasis, y: &SubspaceBasis, op: &'static str) -> Result<()> {
    if x.ambient_dim() != a.dim() {
        return Err(mismatch(op, a.dim(), x.ambient_dim()));
    }
    if y.ambient_dim() != a.dim() {
        return Err(mismatch(op, a.dim(), y.ambient_dim()));
    }
    if x.dim() != y.dim() {
        return Err(mismatch(op, x.dim(), y.dim()));
    }
    Ok(())
}

pub(crate) fn require_acute(theta: &PrincipalAngles) -> Result<()> {
    let theta1 = theta.max();
    if theta1 >= FRAC_PI_2 - ANGLE_MARGIN {
        return Err(Error::AnglesTooLarge { theta1 });
    }
    Ok(())
}

pub(crate) fn check_invariant(a: &HermitianMatrix, x: &SubspaceBasis) -> Result<RayleighData> {
    let data = rayleigh(a, x)?;
    let residual = data.residual.frobenius_norm();
    let threshold = INVARIANCE_TOL * a.frobenius_norm();
    if residual > threshold {
        return Err(Error::NotInvariant { residual, threshold });
    }
    Ok(data)
}

pub(crate) fn mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

pub(crate) fn add(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

pub(crate) fn scaled(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|a| a * c).collect()
}
