//! JSON matrix files.
//!
//! Hermitian matrix: `{"d": n, "entries": [[re, im], ...]}` with `n²` entries
//! in row-major order. Basis: `{"rows": n, "cols": k, "entries": [...]}` in the
//! same layout. Floats are written with Rust's shortest round-trip formatting,
//! so save → load is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::subspace::SubspaceBasis;

/// Largest `|m_ij − conj(m_ji)|` accepted in a Hermitian matrix file,
/// relative to `max(1, max |m_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| parse_err(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

fn count(obj: &Value, field: &str) -> Result<usize> {
    let v = obj.get(field).ok_or_else(|| parse_err(field, "missing field"))?;
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| parse_err(field, format!("expected a non-negative integer, found {v}")))
}

fn entries(obj: &Value, len: usize) -> Result<Vec<C64>> {
    let list = obj
        .get("entries")
        .ok_or_else(|| parse_err("entries", "missing field"))?
        .as_array()
        .ok_or_else(|| parse_err("entries", "expected an array"))?;
    if list.len() != len {
        return Err(parse_err("entries", format!("expected {len} entries, found {}", list.len())));
    }
    list.iter()
        .enumerate()
        .map(|(i, e)| {
            let pair = e
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| parse_err(format!("entries[{i}]"), format!("expected [re, im], found {e}")))?;
            let part = |j: usize| {
                pair[j]
                    .as_f64()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(format!("entries[{i}][{j}]"), format!("expected a finite number, found {}", pair[j])))
            };
            Ok(C64::new(part(0)?, part(1)?))
        })
        .collect()
}

fn object(text: &str) -> Result<Value> {
    let v = parse_value(text)?;
    if !v.is_object() {
        return Err(parse_err("top level", "expected a JSON object"));
    }
    Ok(v)
}

pub fn parse_hermitian(text: &str) -> Result<HermitianMatrix> {
    let v = object(text)?;
    let d = count(&v, "d")?;
    if d == 0 {
        return Err(parse_err("d", "dimension must be positive"));
    }
    let m = ComplexMatrix::new(d, d, entries(&v, d * d)?)?;
    let skew = m.max_abs_diff(&m.adjoint())?;
    if skew > HERMITIAN_TOL * m.max_abs().max(1.0) {
        let (i, j) = (0..d * d)
            .map(|n| (n / d, n % d))
            .max_by(|&(i, j), &(p, q)| {
                (m[(i, j)] - m[(j, i)].conj()).norm().total_cmp(&(m[(p, q)] - m[(q, p)].conj()).norm())
            })
            .expect("d > 0");
        return Err(parse_err(
            format!("entries[{}]", i * d + j),
            format!("matrix is not Hermitian (entry ({i}, {j}) differs from the conjugate of ({j}, {i}) by {skew:.3e})"),
        ));
    }
    HermitianMatrix::new(m)
}

/// Reads a basis. Columns that are orthonormal to `1e-12` are kept as they
/// are; otherwise the file is taken to describe the column span, which must
/// have full column rank.
pub fn parse_basis(text: &str) -> Result<SubspaceBasis> {
    let v = object(text)?;
    let rows = count(&v, "rows")?;
    let cols = count(&v, "cols")?;
    if cols == 0 || cols > rows {
        return Err(parse_err("cols", format!("need 1 <= cols <= rows, got rows = {rows}, cols = {cols}")));
    }
    let m = ComplexMatrix::new(rows, cols, entries(&v, rows * cols)?)?;
    match SubspaceBasis::from_isometry(m.clone()) {
        Err(Error::NotIsometry { .. }) => {
            let b = SubspaceBasis::span_of(&m, 1e-12)?;
            if b.dim() < cols {
                return Err(parse_err("entries", format!("columns are rank deficient ({} < {cols})", b.dim())));
            }
            Ok(b)
        }
        other => other,
    }
}

fn write_entries(out: &mut String, m: &ComplexMatrix) {
    out.push_str("  \"entries\": [");
    let (r, c) = m.shape();
    for i in 0..r {
        out.push_str("\n    ");
        for j in 0..c {
            let z = m[(i, j)];
            let sep = if i + 1 == r && j + 1 == c { "" } else { ", " };
            write!(out, "[{:?}, {:?}]{sep}", z.re, z.im).expect("writing to a String");
        }
    }
    out.push_str("\n  ]\n}\n");
}

pub fn hermitian_to_json(a: &HermitianMatrix) -> String {
    let mut out = format!("{{\n  \"d\": {},\n", a.dim());
    write_entries(&mut out, a.as_matrix());
    out
}

pub fn basis_to_json(x: &SubspaceBasis) -> String {
    let mut out = format!("{{\n  \"rows\": {},\n  \"cols\": {},\n", x.ambient_dim(), x.dim());
    write_entries(&mut out, x.matrix());
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { location, message } => Error::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        e => e,
    }
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<HermitianMatrix> {
    let path = path.as_ref();
    parse_hermitian(&read(path)?).map_err(|e| in_file(path, e))
}

pub fn save_matrix(path: impl AsRef<Path>, a: &HermitianMatrix) -> Result<()> {
    write(path.as_ref(), &hermitian_to_json(a))
}

pub fn load_basis(path: impl AsRef<Path>) -> Result<SubspaceBasis> {
    let path = path.as_ref();
    parse_basis(&read(path)?).map_err(|e| in_file(path, e))
}

pub fn save_basis(path: impl AsRef<Path>, x: &SubspaceBasis) -> Result<()> {
    write(path.as_ref(), &basis_to_json(x))
}
