//! Mixed a posteriori / a priori bounds: the eigenvalue-list distance bound
//! and the `1/cos Θ` and `tan Θ` bounds on `|λ(ρ(X)) − λ(ρ(Y))|`.

use crate::bounds::{
    abs_ritz_change, absolute_tol, add, mul, rayleigh, require_acute, same_dims, BoundReport,
    Metadata, RayleighData,
};
use crate::error::{mismatch, Error, Result};
use crate::linalg::{eigenvalues, singular_values, ComplexMatrix, HermitianMatrix};
use crate::majorization::{apply_monotone_convex, MonotoneConvex};
use crate::subspace::{principal_angles, subspace_sum, PrincipalAngles, SubspaceBasis, SUM_RANK_TOL};

/// Quantities shared by every bound on a pair `(X, Y)`.
pub(crate) struct PairData {
    pub d: usize,
    pub k: usize,
    pub a_norm: f64,
    pub rx: RayleighData,
    pub ry: RayleighData,
    pub theta: PrincipalAngles,
    pub sum: SubspaceBasis,
    pub x: SubspaceBasis,
    pub y: SubspaceBasis,
}

impl PairData {
    pub fn new(a: &HermitianMatrix, x: &SubspaceBasis, y: &SubspaceBasis, op: &'static str) -> Result<Self> {
        same_dims(a, x, y, op)?;
        Ok(Self {
            d: a.dim(),
            k: x.dim(),
            a_norm: a.frobenius_norm(),
            rx: rayleigh(a, x)?,
            ry: rayleigh(a, y)?,
            theta: principal_angles(x, y)?,
            sum: subspace_sum(x, y, SUM_RANK_TOL)?,
            x: x.clone(),
            y: y.clone(),
        })
    }

    pub fn p(&self) -> usize {
        self.sum.dim()
    }

    pub fn metadata(&self) -> Metadata {
        Metadata {
            d: self.d,
            k: self.k,
            p: Some(self.p()),
            theta1: Some(self.theta.max()),
            ..Metadata::default()
        }
    }

    /// `s(P_Q R)`, computed as `s(Q* R)`; `k` entries.
    pub fn s_proj(&self, q: &SubspaceBasis, r: &ComplexMatrix) -> Result<Vec<f64>> {
        singular_values(&q.matrix().adjoint_matmul(r)?)
    }

    pub fn ritz_change(&self) -> Vec<f64> {
        abs_ritz_change(self.rx.ritz_values.values(), self.ry.ritz_values.values())
    }

    pub fn tol(&self, rel_tol: f64, rhs: &[f64]) -> f64 {
        absolute_tol(rel_tol, rhs, self.a_norm)
    }

    /// `s(P_X R_Y)`
    pub fn px_ry(&self) -> Result<Vec<f64>> {
        self.s_proj(&self.x, &self.ry.residual)
    }

    /// `s(P_Y R_X)`
    pub fn py_rx(&self) -> Result<Vec<f64>> {
        self.s_proj(&self.y, &self.rx.residual)
    }

    /// `s(P_{X+Y} R_Y)`
    pub fn ps_ry(&self) -> Result<Vec<f64>> {
        self.s_proj(&self.sum, &self.ry.residual)
    }

    /// `s(P_{X+Y} R_X)`
    pub fn ps_rx(&self) -> Result<Vec<f64>> {
        self.s_proj(&self.sum, &self.rx.residual)
    }
}

fn square_hermitian_pair(c: &HermitianMatrix, d: &HermitianMatrix, t: &ComplexMatrix, op: &'static str) -> Result<()> {
    if c.dim() != d.dim() {
        return Err(mismatch(op, c.dim(), d.dim()));
    }
    if t.shape() != (c.dim(), c.dim()) {
        return Err(mismatch(op, c.dim(), format!("{}x{}", t.rows(), t.cols())));
    }
    Ok(())
}

/// `s(T⁻¹) · s(CT − TD)` with `s(T⁻¹) = 1/s(T)` reordered non-increasing.
fn weighted_commutator(c: &HermitianMatrix, d: &HermitianMatrix, t: &ComplexMatrix) -> Result<Vec<f64>> {
    let s = singular_values(t)?;
    let s_max = s.first().copied().unwrap_or(0.0);
    if s_max == 0.0 || s.last().is_some_and(|&m| m <= 1e-12 * s_max) {
        return Err(Error::SingularT);
    }
    let inv: Vec<f64> = s.iter().rev().map(|v| 1.0 / v).collect();
    let comm = c.as_matrix().matmul(t)?.sub(&t.matmul(d.as_matrix())?)?;
    Ok(mul(&inv, &singular_values(&comm)?))
}

/// `|λ(C) − λ(D)| ≺_w s(T⁻¹) s(CT − TD)` for invertible `T`.
pub fn eigenlist_distance_bound(
    c: &HermitianMatrix,
    d: &HermitianMatrix,
    t: &ComplexMatrix,
    rel_tol: f64,
) -> Result<BoundReport> {
    square_hermitian_pair(c, d, t, "eigenlist_distance_bound")?;
    let rhs = weighted_commutator(c, d, t)?;
    let lhs = abs_ritz_change(&eigenvalues(c)?, &eigenvalues(d)?);
    let scale = c.frobenius_norm().max(d.frobenius_norm());
    let tol = absolute_tol(rel_tol, &rhs, scale);
    let meta = Metadata {
        d: c.dim(),
        k: c.dim(),
        ..Metadata::default()
    };
    BoundReport::submajorization("eigenlist-distance", lhs, rhs, tol, meta)
}

/// `s(C − D) ≺_w s(T⁻¹) s(CT − TD)` for positive definite `T`.
pub fn positive_t_distance_bound(
    c: &HermitianMatrix,
    d: &HermitianMatrix,
    t: &HermitianMatrix,
    rel_tol: f64,
) -> Result<BoundReport> {
    square_hermitian_pair(c, d, t.as_matrix(), "positive_t_distance_bound")?;
    let min_eigenvalue = eigenvalues(t)?.last().copied().unwrap_or(0.0);
    if min_eigenvalue <= 0.0 {
        return Err(Error::NotPositiveDefinite { min_eigenvalue });
    }
    let rhs = weighted_commutator(c, d, t.as_matrix())?;
    let lhs = singular_values(&c.as_matrix().sub(d.as_matrix())?)?;
    let scale = c.frobenius_norm().max(d.frobenius_norm());
    let tol = absolute_tol(rel_tol, &rhs, scale);
    let meta = Metadata {
        d: c.dim(),
        k: c.dim(),
        ..Metadata::default()
    };
    BoundReport::submajorization("positive-t-distance", lhs, rhs, tol, meta)
}

fn cos_rhs(pd: &PairData) -> Result<Vec<f64>> {
    Ok(mul(&add(&pd.py_rx()?, &pd.px_ry()?), &pd.theta.sec()))
}

fn tan_rhs(pd: &PairData) -> Result<Vec<f64>> {
    Ok(mul(&add(&pd.ps_rx()?, &pd.ps_ry()?), &pd.theta.tan()))
}

/// `|λ(ρ(X)) − λ(ρ(Y))| ≺_w (s(P_Y R_X) + s(P_X R_Y)) / cos Θ`.
pub fn mixed_bound_cos(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<BoundReport> {
    let pd = PairData::new(a, x, y, "mixed_bound_cos")?;
    require_acute(&pd.theta)?;
    let rhs = cos_rhs(&pd)?;
    let tol = pd.tol(rel_tol, &rhs);
    BoundReport::submajorization("mixed-cos", pd.ritz_change(), rhs, tol, pd.metadata())
}

/// `|λ(ρ(X)) − λ(ρ(Y))| ≺_w (s(P_{X+Y} R_X) + s(P_{X+Y} R_Y)) tan Θ`.
pub fn mixed_bound_tan(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<BoundReport> {
    let pd = PairData::new(a, x, y, "mixed_bound_tan")?;
    require_acute(&pd.theta)?;
    let rhs = tan_rhs(&pd)?;
    let tol = pd.tol(rel_tol, &rhs);
    BoundReport::submajorization("mixed-tan", pd.ritz_change(), rhs, tol, pd.metadata())
}

/// Squares of both sides of [`mixed_bound_cos`] and [`mixed_bound_tan`].
pub fn squared_mixed_bounds(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<[BoundReport; 2]> {
    let pd = PairData::new(a, x, y, "squared_mixed_bounds")?;
    require_acute(&pd.theta)?;
    let lhs = apply_monotone_convex(&pd.ritz_change(), MonotoneConvex::Square)?;
    let mut out = Vec::with_capacity(2);
    for (id, rhs) in [("mixed-cos-squared", cos_rhs(&pd)?), ("mixed-tan-squared", tan_rhs(&pd)?)] {
        let rhs = apply_monotone_convex(&rhs, MonotoneConvex::Square)?;
        let tol = pd.tol(rel_tol, &rhs);
        out.push(BoundReport::submajorization(id, lhs.clone(), rhs, tol, pd.metadata())?);
    }
    let tan = out.pop().expect("two reports");
    let cos = out.pop().expect("two reports");
    Ok([cos, tan])
}

/// `s(P_X R_Y) ≺_w s(P_{X+Y} R_Y) sin Θ`.
pub fn residual_projection_bound(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<BoundReport> {
    let pd = PairData::new(a, x, y, "residual_projection_bound")?;
    let rhs = mul(&pd.ps_ry()?, &pd.theta.sin());
    let tol = pd.tol(rel_tol, &rhs);
    BoundReport::submajorization("residual-projection", pd.px_ry()?, rhs, tol, pd.metadata())
}
