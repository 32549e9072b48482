//! Subspaces of `C^d` represented by isometries, and the geometry between them.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::{
    hermitian_eig, orthonormalize, projector_of, singular_values, svd, ComplexMatrix,
    HermitianMatrix, OrderedSpectrum,
};
use crate::majorization::{pad_zeros, MajorizationVerdict};

/// Maximum `|Q*Q − I|` entry accepted for a basis.
pub const ISOMETRY_TOL: f64 = 1e-12;
/// Relative rank threshold used to form `X + Y`.
pub const SUM_RANK_TOL: f64 = 1e-10;
/// Principal angles at or below this value count as zero.
pub const ANGLE_TOL: f64 = 1e-8;
/// Gap below which two eigenvalues are treated as one cluster, relative to `‖A‖`.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// `d × k` matrix with orthonormal columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceBasis {
    basis: ComplexMatrix,
}

impl SubspaceBasis {
    /// Wraps `q`, checking that its columns are orthonormal.
    pub fn from_isometry(q: ComplexMatrix) -> Result<Self> {
        if q.cols() == 0 || q.cols() > q.rows() {
            return Err(mismatch("SubspaceBasis", q.rows(), q.cols()));
        }
        let deviation = q.orthonormality_defect();
        if deviation > ISOMETRY_TOL {
            return Err(Error::NotIsometry { deviation });
        }
        Ok(Self { basis: q })
    }

    /// Orthonormal basis of the column span of `m`.
    pub fn span_of(m: &ComplexMatrix, rank_tol: f64) -> Result<Self> {
        Self::from_isometry(orthonormalize(m, rank_tol)?)
    }

    /// `span{e_i : i ∈ indices}` in `C^dim`.
    pub fn coordinate(dim: usize, indices: &[usize]) -> Result<Self> {
        if let Some(&index) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let q = ComplexMatrix::from_fn(dim, indices.len(), |i, j| {
            if indices[j] == i {
                1.0.into()
            } else {
                0.0.into()
            }
        });
        Self::from_isometry(q)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.basis
    }

    /// `U·X` for a unitary (or isometry) `U`.
    pub fn mapped(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::from_isometry(u.matmul(&self.basis)?)
    }
}

fn same_ambient(x: &SubspaceBasis, y: &SubspaceBasis, op: &'static str) -> Result<()> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(mismatch(op, x.ambient_dim(), y.ambient_dim()));
    }
    Ok(())
}

/// Principal angles, non-increasing, each in `[0, π/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAngles {
    angles: Vec<f64>,
}

impl PrincipalAngles {
    pub fn from_values(mut angles: Vec<f64>) -> Result<Self> {
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::NonFinite);
        }
        for a in angles.iter_mut() {
            *a = a.clamp(0.0, FRAC_PI_2);
        }
        angles.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { angles })
    }

    pub fn values(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// `Θ_1`, the largest angle.
    pub fn max(&self) -> f64 {
        self.angles.first().copied().unwrap_or(0.0)
    }

    pub fn cos(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.cos()).collect()
    }

    pub fn sin(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.sin()).collect()
    }

    pub fn sin_squared(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.sin().powi(2)).collect()
    }

    /// `tan Θ`; the caller checks `Θ_1 < π/2` first.
    pub fn tan(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.tan()).collect()
    }

    /// `1 / cos Θ`, non-increasing; the caller checks `Θ_1 < π/2` first.
    pub fn sec(&self) -> Vec<f64> {
        self.angles.iter().map(|a| 1.0 / a.cos()).collect()
    }

    /// Number of angles at or below [`ANGLE_TOL`].
    pub fn zero_count(&self) -> usize {
        self.angles.iter().filter(|&&a| a <= ANGLE_TOL).count()
    }
}

/// Principal angles between `span X` and `span Y`.
///
/// Cosines come from `s(X*Y)` (clamped into `[0, 1]`) and sines from
/// `s((I − P_X) Y)`; each angle is taken from whichever is better conditioned,
/// so angles near zero are not lost to the flatness of `arccos` at 1.
pub fn principal_angles(x: &SubspaceBasis, y: &SubspaceBasis) -> Result<PrincipalAngles> {
    same_ambient(x, y, "principal_angles")?;
    let (wide, narrow) = if x.dim() >= y.dim() { (x, y) } else { (y, x) };
    let m = narrow.dim();
    let cos_desc = singular_values(&x.matrix().adjoint_matmul(y.matrix())?)?;
    // cos Θ_i = s_{m-i+1}(X*Y)
    let cos_of_angle: Vec<f64> = cos_desc.iter().rev().map(|c| c.clamp(0.0, 1.0)).collect();

    let w = wide.matrix();
    let n = narrow.matrix();
    let proj = w.matmul(&w.adjoint_matmul(n)?)?;
    let sin_desc = singular_values(&n.sub(&proj)?)?;

    let angles = (0..m)
        .map(|i| {
            let s = sin_desc[i].clamp(0.0, 1.0);
            let c = cos_of_angle[i];
            if s < c {
                s.asin()
            } else {
                c.acos()
            }
        })
        .collect();
    PrincipalAngles::from_values(angles)
}

/// `P = X X*`.
pub fn projector(x: &SubspaceBasis) -> HermitianMatrix {
    projector_of(x.matrix())
}

/// Orthonormal basis of the orthogonal complement of `span X`.
pub fn orthocomplement(x: &SubspaceBasis) -> Result<SubspaceBasis> {
    let d = x.ambient_dim();
    let k = x.dim();
    if k >= d {
        return Err(Error::FullSpace);
    }
    // The trailing left singular vectors of the d×d matrix [X | 0] span X^⊥.
    let padded = x.matrix().hcat(&ComplexMatrix::zeros(d, d - k))?;
    let dec = svd(&padded)?;
    let tail: Vec<usize> = (k..d).collect();
    let q = dec.left_vectors.select_columns(&tail);
    // One cleanup pass against X keeps the cross term at rounding level.
    let cross = x.matrix().adjoint_matmul(&q)?;
    let cleaned = q.sub(&x.matrix().matmul(&cross)?)?;
    SubspaceBasis::span_of(&cleaned, 0.5)
}

/// Orthonormal basis of `X + Y` from the concatenation `[X | Y]`.
pub fn subspace_sum(x: &SubspaceBasis, y: &SubspaceBasis, rank_tol: f64) -> Result<SubspaceBasis> {
    same_ambient(x, y, "subspace_sum")?;
    SubspaceBasis::span_of(&x.matrix().hcat(y.matrix())?, rank_tol)
}

/// `S* A S`.
pub fn compress(a: &HermitianMatrix, s: &SubspaceBasis) -> Result<HermitianMatrix> {
    if a.dim() != s.ambient_dim() {
        return Err(mismatch("compress", a.dim(), s.ambient_dim()));
    }
    a.congruence(s.matrix())
}

/// `S* X` as a basis of `C^p`, for `X ⊆ range(S)`.
pub fn restrict(x: &SubspaceBasis, s: &SubspaceBasis) -> Result<SubspaceBasis> {
    same_ambient(x, s, "restrict")?;
    let xs = s.matrix().adjoint_matmul(x.matrix())?;
    if xs.orthonormality_defect() <= ISOMETRY_TOL {
        SubspaceBasis::from_isometry(xs)
    } else {
        SubspaceBasis::span_of(&xs, SUM_RANK_TOL)
    }
}

/// Span of the eigenvectors of `A` at the given positions of the
/// non-increasing eigenvalue list (0-based).
///
/// Refuses to split a numerically repeated eigenvalue: every selected
/// eigenvalue must be at least `DEGENERACY_TOL · ‖A‖` away from every
/// unselected one.
pub fn invariant_subspace(a: &HermitianMatrix, eigen_indices: &[usize]) -> Result<SubspaceBasis> {
    let d = a.dim();
    if let Some(&index) = eigen_indices.iter().find(|&&i| i >= d) {
        return Err(Error::IndexOutOfRange { index, dim: d });
    }
    let eig = hermitian_eig(a)?;
    let lambda = eig.eigenvalues.values();
    let norm = lambda.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let threshold = DEGENERACY_TOL * norm.max(f64::MIN_POSITIVE);
    let selected: Vec<bool> = (0..d).map(|i| eigen_indices.contains(&i)).collect();
    for &i in eigen_indices {
        for j in (0..d).filter(|&j| !selected[j]) {
            let gap = (lambda[i] - lambda[j]).abs();
            if gap < threshold {
                return Err(Error::DegenerateCut { index: i, gap });
            }
        }
    }
    let mut indices = eigen_indices.to_vec();
    indices.sort_unstable();
    indices.dedup();
    SubspaceBasis::from_isometry(eig.eigenvectors.select_columns(&indices))
}

/// Result of comparing the four spectral expressions of `sin² Θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinSquaredIdentity {
    /// `(sin² Θ, 0_{d−k})`, non-increasing.
    pub target: Vec<f64>,
    /// `λ(P_X P_{Y⊥} P_X)`, `s(P_X P_{Y⊥} P_X)`, `s²(P_Y P_{X⊥})`, `s²(P_{X⊥} P_Y)`.
    pub computed: [Vec<f64>; 4],
    pub max_deviation: f64,
    pub verdict: MajorizationVerdict,
}

/// Checks `λ(P_X P_{Y⊥} P_X) = s(P_X P_{Y⊥} P_X) = s²(P_Y P_{X⊥}) = s²(P_{X⊥} P_Y) = (sin²Θ, 0)`.
///
/// The verdict treats equality as `≺_w` in both directions: each prefix margin
/// is minus the largest prefix-sum discrepancy against the closed form.
pub fn sin_squared_identity_check(
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    tol: f64,
) -> Result<SinSquaredIdentity> {
    same_ambient(x, y, "sin_squared_identity_check")?;
    if x.dim() != y.dim() {
        return Err(mismatch("sin_squared_identity_check", x.dim(), y.dim()));
    }
    let d = x.ambient_dim();
    let theta = principal_angles(x, y)?;
    let target = pad_zeros(&theta.sin_squared(), d)?;

    let px = projector(x).into_matrix();
    let py = projector(y).into_matrix();
    let id = ComplexMatrix::identity(d);
    let px_perp = id.sub(&px)?;
    let py_perp = id.sub(&py)?;

    let pxqpx = px.matmul(&py_perp)?.matmul(&px)?;
    let eig = hermitian_eig(&HermitianMatrix::new(pxqpx.clone())?)?.eigenvalues.into_values();
    let sv = singular_values(&pxqpx)?;
    let sq = |v: Vec<f64>| v.into_iter().map(|s| s * s).collect::<Vec<_>>();
    let s1 = sq(singular_values(&py.matmul(&px_perp)?)?);
    let s2 = sq(singular_values(&px_perp.matmul(&py)?)?);
    let computed = [eig, sv, s1, s2];

    let prefix = |v: &[f64]| {
        let sorted = OrderedSpectrum::descending(v.to_vec())
            .expect("finite")
            .into_values();
        sorted
            .iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect::<Vec<f64>>()
    };
    let target_prefix = prefix(&target);
    let mut margins = vec![0.0_f64; d];
    let mut max_deviation = 0.0_f64;
    for v in &computed {
        for (a, b) in v.iter().zip(&target) {
            max_deviation = max_deviation.max((a - b).abs());
        }
        for (m, (a, b)) in margins.iter_mut().zip(prefix(v).iter().zip(&target_prefix)) {
            *m = m.min(-(a - b).abs());
        }
    }
    let worst_index = margins
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let verdict = MajorizationVerdict {
        holds: max_deviation <= tol && margins.iter().all(|&m| m >= -tol),
        prefix_margins: margins,
        worst_index,
        trace_gap: 0.0,
    };
    Ok(SinSquaredIdentity {
        target,
        computed,
        max_deviation,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn y_theta(theta: f64) -> SubspaceBasis {
        let q = ComplexMatrix::from_real_rows(&[
            vec![1.0, 0.0],
            vec![0.0, theta.cos()],
            vec![0.0, theta.sin()],
            vec![0.0, 0.0],
        ])
        .unwrap();
        SubspaceBasis::from_isometry(q).unwrap()
    }

    #[test]
    fn angles_of_rotated_plane() {
        let x = SubspaceBasis::coordinate(4, &[0, 1]).unwrap();
        let theta = 0.7;
        let a = principal_angles(&x, &y_theta(theta)).unwrap();
        assert!((a.values()[0] - theta).abs() < 1e-15);
        assert_eq!(a.values()[1], 0.0);
        let same = principal_angles(&x, &x).unwrap();
        assert_eq!(same.values(), &[0.0, 0.0]);
    }

    #[test]
    fn angles_need_same_ambient() {
        let x = SubspaceBasis::coordinate(3, &[0]).unwrap();
        let y = SubspaceBasis::coordinate(4, &[0]).unwrap();
        assert!(matches!(
            principal_angles(&x, &y),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projectors_and_complements() {
        let e1 = SubspaceBasis::coordinate(2, &[0]).unwrap();
        let p = projector(&e1);
        assert_eq!(*p.as_matrix(), ComplexMatrix::diag_real(&[1.0, 0.0]));
        let full = SubspaceBasis::coordinate(3, &[0, 1, 2]).unwrap();
        assert_eq!(*projector(&full).as_matrix(), ComplexMatrix::identity(3));
        assert_eq!(orthocomplement(&full), Err(Error::FullSpace));

        let x = SubspaceBasis::coordinate(4, &[0, 1]).unwrap();
        let xp = orthocomplement(&x).unwrap();
        assert_eq!(xp.dim(), 2);
        let expected = projector(&SubspaceBasis::coordinate(4, &[2, 3]).unwrap());
        assert!(projector(&xp).as_matrix().max_abs_diff(expected.as_matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn sum_of_rotated_plane_is_three_dimensional() {
        let x = SubspaceBasis::coordinate(4, &[0, 1]).unwrap();
        let s = subspace_sum(&x, &y_theta(1.0), SUM_RANK_TOL).unwrap();
        assert_eq!(s.dim(), 3);
        let expected = projector(&SubspaceBasis::coordinate(4, &[0, 1, 2]).unwrap());
        assert!(projector(&s).as_matrix().max_abs_diff(expected.as_matrix()).unwrap() < 1e-14);
        assert_eq!(subspace_sum(&x, &x, SUM_RANK_TOL).unwrap().dim(), 2);
    }

    #[test]
    fn compression_onto_coordinate_block() {
        let a = HermitianMatrix::from_real_diagonal(&[0.0, 1.0, 3.0, 2.0]);
        let s = SubspaceBasis::coordinate(4, &[0, 1, 2]).unwrap();
        let c = compress(&a, &s).unwrap();
        assert_eq!(*c.as_matrix(), ComplexMatrix::diag_real(&[0.0, 1.0, 3.0]));
        let id = SubspaceBasis::coordinate(4, &[0, 1, 2, 3]).unwrap();
        assert_eq!(compress(&a, &id).unwrap(), a);
    }

    #[test]
    fn invariant_subspaces() {
        let a = HermitianMatrix::from_real_diagonal(&[3.0, 2.0, 1.0, 0.0]);
        let x = invariant_subspace(&a, &[0, 1]).unwrap();
        let p = projector(&x);
        let expected = projector(&SubspaceBasis::coordinate(4, &[0, 1]).unwrap());
        assert!(p.as_matrix().max_abs_diff(expected.as_matrix()).unwrap() < 1e-15);

        let degenerate = HermitianMatrix::from_real_diagonal(&[1.0, 1.0, 0.0]);
        assert!(matches!(
            invariant_subspace(&degenerate, &[0]),
            Err(Error::DegenerateCut { .. })
        ));
        assert!(invariant_subspace(&degenerate, &[0, 1]).is_ok());
        assert!(matches!(
            invariant_subspace(&degenerate, &[3]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn sin_squared_identity_on_rotated_plane() {
        let x = SubspaceBasis::coordinate(4, &[0, 1]).unwrap();
        let theta = 0.4;
        let r = sin_squared_identity_check(&x, &y_theta(theta), 1e-9).unwrap();
        assert!(r.verdict.holds, "{r:?}");
        assert!((r.target[0] - theta.sin().powi(2)).abs() < 1e-15);
        assert_eq!(&r.target[1..], &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn basis_validation() {
        let bad = ComplexMatrix::from_fn(2, 1, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(
            SubspaceBasis::from_isometry(bad),
            Err(Error::NotIsometry { .. })
        ));
    }
}
