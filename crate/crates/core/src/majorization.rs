//! Weak majorization and majorization of real vectors.
//!
//! `x ≺_w y` holds when every prefix sum of the non-increasing rearrangement
//! of `x` is dominated by the corresponding prefix sum for `y`; `x ≺ y`
//! additionally requires equal totals. All verdicts carry the per-prefix
//! margins `Σ_{i≤j} y↓_i − Σ_{i≤j} x↓_i` whether or not the relation holds.

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::OrderedSpectrum;

/// Smallest divisor magnitude accepted by [`entrywise_div`].
pub const MIN_DIVISOR: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub prefix_margins: Vec<f64>,
    pub worst_index: usize,
    /// `Σy − Σx`
    pub trace_gap: f64,
}

impl MajorizationVerdict {
    pub fn min_margin(&self) -> f64 {
        self.prefix_margins
            .get(self.worst_index)
            .copied()
            .unwrap_or(0.0)
    }

    pub(crate) fn from_margins(prefix_margins: Vec<f64>, trace_gap: f64, holds: bool) -> Self {
        let worst_index = prefix_margins
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(i, _)| i);
        Self {
            holds,
            prefix_margins,
            worst_index,
            trace_gap,
        }
    }

    /// Conjunction of two verdicts over vectors of the same length:
    /// per-prefix minimum margins.
    pub fn and(&self, other: &Self) -> Self {
        let margins = self
            .prefix_margins
            .iter()
            .zip(&other.prefix_margins)
            .map(|(a, b)| a.min(*b))
            .collect();
        let gap = if self.trace_gap.abs() >= other.trace_gap.abs() {
            self.trace_gap
        } else {
            other.trace_gap
        };
        Self::from_margins(margins, gap, self.holds && other.holds)
    }
}

fn check_pair(x: &[f64], y: &[f64], op: &'static str) -> Result<()> {
    if x.len() != y.len() {
        return Err(mismatch(op, x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::Empty(op));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn prefix_margins(x: &[f64], y: &[f64]) -> Vec<f64> {
    let xs = sort_desc(x).expect("finite").into_values();
    let ys = sort_desc(y).expect("finite").into_values();
    let mut sx = 0.0;
    let mut sy = 0.0;
    xs.iter()
        .zip(&ys)
        .map(|(a, b)| {
            sx += a;
            sy += b;
            sy - sx
        })
        .collect()
}

/// `x ≺_w y` with absolute slack `tol`.
pub fn submajorizes(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    check_pair(x, y, "submajorizes")?;
    let margins = prefix_margins(x, y);
    let gap = y.iter().sum::<f64>() - x.iter().sum::<f64>();
    let holds = margins.iter().all(|&m| m >= -tol);
    Ok(MajorizationVerdict::from_margins(margins, gap, holds))
}

/// `x ≺ y`: submajorization plus `|Σy − Σx| ≤ tol`.
pub fn majorizes(x: &[f64], y: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    let mut v = submajorizes(x, y, tol)?;
    v.holds = v.holds && v.trace_gap.abs() <= tol;
    Ok(v)
}

pub fn sort_desc(x: &[f64]) -> Result<OrderedSpectrum> {
    OrderedSpectrum::descending(x.to_vec())
}

pub fn sort_asc(x: &[f64]) -> Result<OrderedSpectrum> {
    OrderedSpectrum::ascending(x.to_vec())
}

/// `(x_i y_i)_i`, kept in the given entry order.
pub fn entrywise_mul(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(mismatch("entrywise_mul", x.len(), y.len()));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b).collect())
}

/// `(x_i / y_i)_i`; every `|y_i|` must exceed [`MIN_DIVISOR`].
pub fn entrywise_div(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(mismatch("entrywise_div", x.len(), y.len()));
    }
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(index, (a, b))| {
            if b.abs() > MIN_DIVISOR {
                Ok(a / b)
            } else {
                Err(Error::DivisionByZero { index })
            }
        })
        .collect()
}

pub fn entrywise_add(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(mismatch("entrywise_add", x.len(), y.len()));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a + b).collect())
}

/// `x` followed by zeros up to length `len`.
pub fn pad_zeros(x: &[f64], len: usize) -> Result<Vec<f64>> {
    if x.len() > len {
        return Err(mismatch("pad_zeros", x.len(), len));
    }
    let mut out = x.to_vec();
    out.resize(len, 0.0);
    Ok(out)
}

/// Non-decreasing convex functions on `[0, ∞)` that preserve `≺_w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonotoneConvex {
    Square,
}

pub fn apply_monotone_convex(x: &[f64], f: MonotoneConvex) -> Result<Vec<f64>> {
    match f {
        MonotoneConvex::Square => x
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                if v < 0.0 {
                    Err(Error::NegativeInput { index, value: v })
                } else {
                    Ok(v * v)
                }
            })
            .collect(),
    }
}

fn is_non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

fn reordered(v: &[f64], desc: bool) -> Vec<f64> {
    if desc {
        sort_desc(v).expect("finite").into_values()
    } else {
        sort_asc(v).expect("finite").into_values()
    }
}

/// Evaluates one item of the elementary (sub)majorization rules for
/// rearranged sums and products:
///
/// 1. `x↓ + y↑ ≺ x + y ≺ x↓ + y↓`
/// 2. `x ≺_w y` with `y, z` non-increasing implies `x + z ≺_w y + z`
/// 3. for non-negative vectors, `x↓ y↑ ≺_w x y ≺_w x↓ y↓`
/// 4. `x ≺_w y` with non-negative non-increasing `y, z` implies `x z ≺_w y z`
///
/// Chained relations are returned as a single verdict with per-prefix minimum
/// margins. `z` is ignored by items 1 and 3.
pub fn lemma_props_oracle(
    x: &[f64],
    y: &[f64],
    z: &[f64],
    item: u8,
    tol: f64,
) -> Result<MajorizationVerdict> {
    check_pair(x, y, "lemma_props_oracle")?;
    let needs_z = matches!(item, 2 | 4);
    if needs_z {
        check_pair(y, z, "lemma_props_oracle")?;
    }
    let violated = |reason: &str| Error::PreconditionViolated {
        item,
        reason: reason.to_string(),
    };
    let nonneg = |v: &[f64]| v.iter().all(|&a| a >= 0.0);
    match item {
        1 => {
            let low = entrywise_add(&reordered(x, true), &reordered(y, false))?;
            let mid = entrywise_add(x, y)?;
            let high = entrywise_add(&reordered(x, true), &reordered(y, true))?;
            Ok(majorizes(&low, &mid, tol)?.and(&majorizes(&mid, &high, tol)?))
        }
        2 => {
            if !is_non_increasing(y) || !is_non_increasing(z) {
                return Err(violated("y and z must be non-increasing"));
            }
            if !submajorizes(x, y, tol)?.holds {
                return Err(violated("x is not submajorized by y"));
            }
            submajorizes(&entrywise_add(x, z)?, &entrywise_add(y, z)?, tol)
        }
        3 => {
            if !nonneg(x) || !nonneg(y) {
                return Err(violated("x and y must be non-negative"));
            }
            let low = entrywise_mul(&reordered(x, true), &reordered(y, false))?;
            let mid = entrywise_mul(x, y)?;
            let high = entrywise_mul(&reordered(x, true), &reordered(y, true))?;
            Ok(submajorizes(&low, &mid, tol)?.and(&submajorizes(&mid, &high, tol)?))
        }
        4 => {
            if !nonneg(x) || !nonneg(y) || !nonneg(z) {
                return Err(violated("x, y and z must be non-negative"));
            }
            if !is_non_increasing(y) || !is_non_increasing(z) {
                return Err(violated("y and z must be non-increasing"));
            }
            if !submajorizes(x, y, tol)?.holds {
                return Err(violated("x is not submajorized by y"));
            }
            submajorizes(&entrywise_mul(x, z)?, &entrywise_mul(y, z)?, tol)
        }
        _ => Err(violated("item must be 1, 2, 3 or 4")),
    }
}

/// Ky Fan and Schatten norms of a matrix with singular values `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    /// `ky_fan[k-1]` is the sum of the `k` largest entries.
    pub ky_fan: Vec<f64>,
    pub schatten_1: f64,
    pub schatten_2: f64,
    pub schatten_inf: f64,
}

pub fn uin_norms(s: &[f64]) -> Result<NormTable> {
    if let Some((index, &value)) = s.iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(Error::NegativeSingularValue { index, value });
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let sorted = sort_desc(s)?.into_values();
    let mut acc = 0.0;
    let ky_fan: Vec<f64> = sorted
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect();
    Ok(NormTable {
        schatten_1: acc,
        schatten_2: sorted.iter().map(|v| v * v).sum::<f64>().sqrt(),
        schatten_inf: sorted.first().copied().unwrap_or(0.0),
        ky_fan,
    })
}

/// Default absolute slack for a verdict against right-hand side `y`:
/// `1e-9 · max(1, ‖y‖_∞ · k)`.
pub fn default_tol(y: &[f64]) -> f64 {
    let sup = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-9 * (sup * y.len() as f64).max(1.0)
}
