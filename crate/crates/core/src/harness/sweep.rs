//! Angle sweeps over the two diagonal `4 × 4` examples.
//!
//! * `exa1`: `A = diag(a, b, c, d)`, both mixed bounds are attained. `lhs` is
//!   the largest Ritz-value change, `classical_rhs` / `improved_rhs` the leading
//!   entries of the `cos` and `tan` bounds, and `margin` the largest entrywise
//!   gap between either bound and `lhs`.
//! * `exa2`: `A = diag(a, b, d, c)`. `lhs = tan Θ_1`, `classical_rhs =
//!   s_1(R_Y)/δ` (absent once the ambient separation is lost),
//!   `improved_rhs = s_1(P_{X+Y} R_Y)/δ'`, `margin = improved_rhs − lhs`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::generate::{generate, InstanceSpec, SpectrumSpec};
use crate::bounds::{dkn_certificate, mixed_bound_cos, mixed_bound_tan, tan_theta_classical, tan_theta_improved, Separation};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    Exa1,
    Exa2,
}

impl std::str::FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exa1" => Ok(Self::Exa1),
            "exa2" => Ok(Self::Exa2),
            other => Err(Error::SpecInvalid(format!("unknown example {other:?} (expected exa1 or exa2)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    pub lhs: f64,
    pub classical_rhs: Option<f64>,
    pub improved_rhs: Option<f64>,
    pub delta: Option<f64>,
    pub delta_prime: Option<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub example: Example,
    pub params: [f64; 4],
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep table serializes")
    }
}

fn spec(example: Example, [a, b, c, d]: [f64; 4], theta: f64) -> InstanceSpec {
    let spectrum = match example {
        Example::Exa1 => SpectrumSpec::PaperExa1 { a, b, c, d, theta },
        Example::Exa2 => SpectrumSpec::PaperExa2 { a, b, c, d, theta },
    };
    InstanceSpec {
        spectrum,
        ..InstanceSpec::paper_exa1(theta)
    }
}

fn row(example: Example, params: [f64; 4], theta: f64, rel_tol: f64) -> Result<SweepRow> {
    let inst = generate(&spec(example, params, theta))?;
    let (a, x, y) = (&inst.a, &inst.x, &inst.y);
    match example {
        Example::Exa1 => {
            let cos = mixed_bound_cos(a, x, y, rel_tol)?;
            let tan = mixed_bound_tan(a, x, y, rel_tol)?;
            Ok(SweepRow {
                theta,
                lhs: cos.lhs[0],
                classical_rhs: Some(cos.rhs[0]),
                improved_rhs: Some(tan.rhs[0]),
                delta: None,
                delta_prime: None,
                margin: cos.max_gap().max(tan.max_gap()),
            })
        }
        Example::Exa2 => {
            let (classical_rhs, delta) = match dkn_certificate(a, x, y)? {
                Separation::Certified(c) => {
                    let r = tan_theta_classical(a, x, y, &c, rel_tol)?;
                    (Some(r.rhs[0] / c.delta), Some(c.delta))
                }
                Separation::NoSeparation { .. } => (None, None),
            };
            let (improved_rhs, delta_prime) = match tan_theta_improved(a, x, y, rel_tol) {
                Ok(imp) => (Some(imp.improved.rhs[0] / imp.delta_prime), Some(imp.delta_prime)),
                Err(Error::NoSeparation { .. }) => (None, None),
                Err(e) => return Err(e),
            };
            let lhs = theta.tan();
            Ok(SweepRow {
                theta,
                lhs,
                classical_rhs,
                improved_rhs,
                delta,
                delta_prime,
                margin: improved_rhs.map_or(f64::NAN, |r| r - lhs),
            })
        }
    }
}

/// One row per grid angle; every angle must lie in `(0, π/2)`.
pub fn sweep_theta(example: Example, params: [f64; 4], grid: &[f64], rel_tol: f64) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::GridInvalid("grid is empty".into()));
    }
    if let Some(t) = grid.iter().find(|t| !(**t > 0.0 && **t < FRAC_PI_2)) {
        return Err(Error::GridInvalid(format!("angle {t} outside (0, pi/2)")));
    }
    let rows = grid
        .iter()
        .map(|&t| row(example, params, t, rel_tol))
        .collect::<Result<_>>()?;
    Ok(SweepTable { example, params, rows })
}
