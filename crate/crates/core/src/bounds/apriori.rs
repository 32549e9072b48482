//! A priori bounds in terms of the spectral spread of `A` on `X + Y` and the
//! principal angles, plus the earlier reference bounds they are compared with.

use std::f64::consts::{FRAC_PI_4, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bounds::mixed::PairData;
use crate::bounds::{
    check_invariant, mul, require_acute, scaled, spectral_spread, BoundReport, SpectralSpread,
};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, HermitianMatrix};
use crate::subspace::SubspaceBasis;

/// Spread entries below this are treated as negative when paired with a
/// non-zero sine.
const NEGATIVE_SPREAD_TOL: f64 = 1e-10;

/// `Spr_k(A, X+Y) · sin Θ`, flagging negative spread entries that meet a
/// non-zero angle (which the theory rules out).
fn spread_times(pd: &PairData, spr: &SpectralSpread, factor: &[f64]) -> (Vec<f64>, Option<String>) {
    let lead = spr.leading(pd.k);
    let mut flag = None;
    for (i, (&s, &f)) in lead.iter().zip(factor).enumerate() {
        if s < -NEGATIVE_SPREAD_TOL && f > crate::subspace::ANGLE_TOL {
            flag = Some(format!(
                "negative spread entry {s:.3e} at index {i} paired with non-zero angle factor {f:.3e}"
            ));
        }
    }
    let mut padded = lead.to_vec();
    padded.resize(pd.k, 0.0);
    (mul(&padded, factor), flag)
}

fn flagged(report: BoundReport, flag: Option<String>) -> BoundReport {
    match flag {
        Some(f) => report.with_flag(f),
        None => report,
    }
}

/// `s(P_X R_Y) ≺_w Spr(A, X+Y) sin Θ`.
pub fn apriori_spread_partial(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<BoundReport> {
    let pd = PairData::new(a, x, y, "apriori_spread_partial")?;
    let spr = spectral_spread(a, &pd.sum)?;
    let (rhs, flag) = spread_times(&pd, &spr, &pd.theta.sin());
    let tol = pd.tol(rel_tol, &rhs);
    let r = BoundReport::submajorization("spread-partial", pd.px_ry()?, rhs, tol, pd.metadata())?;
    Ok(flagged(r, flag))
}

/// `|λ(ρ(X)) − λ(ρ(Y))| ≺_w 2 Spr(A, X+Y) sin Θ / cos Θ`.
pub fn apriori_mixed_theorem(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<BoundReport> {
    let pd = PairData::new(a, x, y, "apriori_mixed_theorem")?;
    require_acute(&pd.theta)?;
    let spr = spectral_spread(a, &pd.sum)?;
    let factor = scaled(&mul(&pd.theta.sin(), &pd.theta.sec()), 2.0);
    let (rhs, flag) = spread_times(&pd, &spr, &factor);
    let tol = pd.tol(rel_tol, &rhs);
    let r = BoundReport::submajorization("apriori-mixed", pd.ritz_change(), rhs, tol, pd.metadata())?;
    Ok(flagged(r, flag))
}

/// For `A`-invariant `X`, returns
///
/// 0. `s(P_X R_Y) ≺_w 2 (λ_i(A_{X+Y}) − λ_min(A_{X+Y}))_{i≤k} sin²Θ`
/// 1. `|λ(ρ(X)) − λ(ρ(Y))| ≺_w` the same vector divided by `cos Θ`.
pub fn apriori_invariant_quadratic(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    rel_tol: f64,
) -> Result<[BoundReport; 2]> {
    let pd = PairData::new(a, x, y, "apriori_invariant_quadratic")?;
    check_invariant(a, x)?;
    require_acute(&pd.theta)?;
    let spr = spectral_spread(a, &pd.sum)?;
    let w = scaled(&mul(&spr.gaps_to_min(pd.k), &pd.theta.sin_squared()), 2.0);
    let tol = pd.tol(rel_tol, &w);
    let prop = BoundReport::submajorization("invariant-residual-sin2", pd.px_ry()?, w.clone(), tol, pd.metadata())?;
    let rhs = mul(&w, &pd.theta.sec());
    let tol = pd.tol(rel_tol, &rhs);
    let thm = BoundReport::submajorization("invariant-quadratic", pd.ritz_change(), rhs, tol, pd.metadata())?;
    Ok([prop, thm])
}

/// `2 / cos Θ_1`.
pub fn corollary_prefactor(theta1: f64) -> f64 {
    2.0 / theta1.cos()
}

/// Scalar-prefactor forms:
///
/// * `|Δλ| ≺_w (2/cos Θ_1) Spr(A, X+Y) sin Θ` (always);
/// * `|Δλ| ≺_w (2/cos Θ_1) (λ_i(A_{X+Y}) − λ_min)_{i≤k} sin²Θ` when `invariant`;
/// * both again with the constant `2√2` when `Θ_1 ≤ π/4`.
pub fn apriori_constant_corollary(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    invariant: bool,
    rel_tol: f64,
) -> Result<Vec<BoundReport>> {
    let pd = PairData::new(a, x, y, "apriori_constant_corollary")?;
    require_acute(&pd.theta)?;
    if invariant {
        check_invariant(a, x)?;
    }
    let spr = spectral_spread(a, &pd.sum)?;
    let lhs = pd.ritz_change();
    let theta1 = pd.theta.max();
    let mut constants = vec![("", corollary_prefactor(theta1))];
    if theta1 <= FRAC_PI_4 + 1e-12 {
        constants.push(("-2sqrt2", 2.0 * SQRT_2));
    }
    let mut out = Vec::new();
    for (suffix, c) in constants {
        let (rhs, flag) = spread_times(&pd, &spr, &scaled(&pd.theta.sin(), c));
        let tol = pd.tol(rel_tol, &rhs);
        let id = format!("constant-spread{suffix}");
        let r = BoundReport::submajorization(&id, lhs.clone(), rhs, tol, pd.metadata())?;
        out.push(flagged(r, flag));
        if invariant {
            let rhs = scaled(&mul(&spr.gaps_to_min(pd.k), &pd.theta.sin_squared()), c);
            let tol = pd.tol(rel_tol, &rhs);
            let id = format!("constant-invariant{suffix}");
            out.push(BoundReport::submajorization(&id, lhs.clone(), rhs, tol, pd.metadata())?);
        }
    }
    Ok(out)
}

/// Which hypotheses the caller asserts for [`fem_reference_bounds`]; each is
/// verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FemRegime {
    General,
    /// `X` is `A`-invariant.
    Invariant,
    /// `X` is the invariant subspace of the `k` largest eigenvalues.
    TopK,
}

/// Reference bounds stated in terms of `λ_max − λ_min` of `A_{X+Y}`, and the
/// two spread conjectures (reported with `must_hold = false`).
///
/// * `fem-width-sin`: `|Δλ| ≺_w (λ_max − λ_min) sin Θ`
/// * `conjecture-spread-sin`: `|Δλ| ≺_w Spr sin Θ`
/// * `fem-width-sin2` (invariant): `|Δλ| ≺_w (λ_max − λ_min) sin²Θ`
/// * `conjecture-spread-sin2` (invariant): `|Δλ| ≺_w Spr sin²Θ`
/// * `fem-topk-sign` (top-k): `0 ≤ λ(ρ(X)) − λ(ρ(Y))` entrywise
/// * `fem-topk` (top-k): `λ(ρ(X)) − λ(ρ(Y)) ≺_w (λ_i − λ_min)_{i≤k} sin²Θ`
pub fn fem_reference_bounds(
    a: &HermitianMatrix,
    x: &SubspaceBasis,
    y: &SubspaceBasis,
    regime: FemRegime,
    rel_tol: f64,
) -> Result<Vec<BoundReport>> {
    let pd = PairData::new(a, x, y, "fem_reference_bounds")?;
    if regime != FemRegime::General {
        check_invariant(a, x)?;
    }
    if regime == FemRegime::TopK {
        let top = eigenvalues(a)?;
        let ritz = pd.rx.ritz_values.values();
        let slack = 1e-9 * a.frobenius_norm().max(1.0);
        if ritz.iter().zip(&top).any(|(r, l)| (r - l).abs() > slack) {
            return Err(Error::NotTopK);
        }
    }
    let spr = spectral_spread(a, &pd.sum)?;
    let lhs = pd.ritz_change();
    let sin = pd.theta.sin();
    let sin2 = pd.theta.sin_squared();
    let mut out = Vec::new();
    let mut push = |id: &str, lhs: Vec<f64>, rhs: Vec<f64>, conjecture: bool, flag: Option<String>| -> Result<()> {
        let tol = pd.tol(rel_tol, &rhs);
        let mut r = flagged(BoundReport::submajorization(id, lhs, rhs, tol, pd.metadata())?, flag);
        if conjecture {
            r = r.conjecture();
        }
        out.push(r);
        Ok(())
    };

    push("fem-width-sin", lhs.clone(), scaled(&sin, spr.width()), false, None)?;
    let (rhs, flag) = spread_times(&pd, &spr, &sin);
    push("conjecture-spread-sin", lhs.clone(), rhs, true, flag)?;
    if regime != FemRegime::General {
        push("fem-width-sin2", lhs.clone(), scaled(&sin2, spr.width()), false, None)?;
        let (rhs, flag) = spread_times(&pd, &spr, &sin2);
        push("conjecture-spread-sin2", lhs.clone(), rhs, true, flag)?;
    }
    if regime == FemRegime::TopK {
        let signed: Vec<f64> = pd
            .rx
            .ritz_values
            .values()
            .iter()
            .zip(pd.ry.ritz_values.values())
            .map(|(a, b)| a - b)
            .collect();
        let rhs = mul(&spr.gaps_to_min(pd.k), &sin2);
        push("fem-topk", signed.clone(), rhs, false, None)?;
        let tol = pd.tol(rel_tol, &signed);
        out.push(BoundReport::entrywise("fem-topk-sign", vec![0.0; pd.k], signed, tol, pd.metadata()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, C64};

    fn exa1(theta: f64) -> (HermitianMatrix, SubspaceBasis, SubspaceBasis) {
        let a = HermitianMatrix::from_real_diagonal(&[0.0, 1.0, 2.0, 3.0]);
        let x = SubspaceBasis::coordinate(4, &[0, 1]).unwrap();
        let mut y = ComplexMatrix::zeros(4, 2);
        y[(0, 0)] = C64::new(1.0, 0.0);
        y[(1, 1)] = C64::new(theta.cos(), 0.0);
        y[(2, 1)] = C64::new(theta.sin(), 0.0);
        (a, x, SubspaceBasis::from_isometry(y).unwrap())
    }

    #[test]
    fn diagonal_family_values() {
        let t = std::f64::consts::FRAC_PI_3;
        let (a, x, y) = exa1(t);
        let r = apriori_spread_partial(&a, &x, &y, 1e-9).unwrap();
        assert!((r.lhs[0] - 0.375).abs() < 1e-12);
        assert!((r.rhs[0] - 3f64.sqrt()).abs() < 1e-12 && r.rhs[1].abs() < 1e-12);
        let m = apriori_mixed_theorem(&a, &x, &y, 1e-9).unwrap();
        assert!((m.rhs[0] - 4.0 * 3f64.sqrt()).abs() < 1e-10);
        let [prop, thm] = apriori_invariant_quadratic(&a, &x, &y, 1e-9).unwrap();
        assert!((prop.rhs[0] - 3.0).abs() < 1e-12);
        assert!(prop.verdict.holds && thm.verdict.holds);
        let fem = fem_reference_bounds(&a, &x, &y, FemRegime::Invariant, 1e-9).unwrap();
        let apr2 = fem.iter().find(|r| r.theorem_id == "fem-width-sin2").unwrap();
        assert!((apr2.rhs[0] - 1.5).abs() < 1e-12);
        assert!(fem.iter().all(|r| !r.is_violation()));
    }

    #[test]
    fn bottom_block_is_not_top_k() {
        let (a, x, y) = exa1(0.3);
        assert_eq!(
            fem_reference_bounds(&a, &x, &y, FemRegime::TopK, 1e-9).unwrap_err(),
            Error::NotTopK
        );
        let top = SubspaceBasis::coordinate(4, &[2, 3]).unwrap();
        assert!(matches!(
            apriori_invariant_quadratic(&a, &y, &top, 1e-9),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn small_angle_corollary_adds_two_root_two_forms() {
        let (a, x, y) = exa1(std::f64::consts::FRAC_PI_6);
        let r = apriori_constant_corollary(&a, &x, &y, true, 1e-9).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|b| b.verdict.holds));
        assert!((corollary_prefactor(FRAC_PI_4) - 2.0 * SQRT_2).abs() < 1e-12);
    }
}
