use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};

pub type C64 = Complex64;

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(mismatch("ComplexMatrix::new", rows * cols, data.len()));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(mismatch("from_real_rows", c, "ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::new(r, c, data)
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(mismatch(
                "matmul",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (l, &a) in row.iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let src = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self* · rhs` without materializing the adjoint.
    pub fn adjoint_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(mismatch(
                "adjoint_matmul",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = Self::zeros(self.cols, rhs.cols);
        for l in 0..self.rows {
            let left = &self.data[l * self.cols..(l + 1) * self.cols];
            let right = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
            for (i, a) in left.iter().enumerate() {
                let a = a.conj();
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(right) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    fn zip_with(&self, rhs: &Self, op: &'static str, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(mismatch(
                op,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(mismatch("from_columns", rows, "column of different length"));
        }
        let cols = columns.len();
        Self::new(rows, cols, (0..rows * cols).map(|t| columns[t % cols][t / cols]).collect())
    }

    /// Columns `range` as a new matrix.
    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    pub fn hcat(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(mismatch("hcat", self.rows, rhs.rows));
        }
        Ok(Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                rhs[(i, j - self.cols)]
            }
        }))
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn real_part(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(mismatch("real_part", self.rows, self.cols));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        }))
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// `max |M*M - I|`, the orthonormality defect of the columns.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.adjoint_matmul(self).expect("gram dims always agree");
        gram.max_abs_diff(&Self::identity(self.cols))
            .expect("identity matches gram shape")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Self-adjoint matrix. Construction stores `(M + M*)/2`, so the stored
/// entries satisfy `a[i][j] == conj(a[j][i])` bit-exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(mismatch("HermitianMatrix::new", m.rows, m.cols));
        }
        if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = m.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
            for j in i + 1..n {
                let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Ok(Self(out))
    }

    pub fn from_real_diagonal(values: &[f64]) -> Self {
        Self(ComplexMatrix::diag_real(values))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// `A - shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.rows {
            m[(i, i)].re -= shift;
        }
        Self(m)
    }

    /// `B* A B`, re-symmetrized.
    pub fn congruence(&self, b: &ComplexMatrix) -> Result<Self> {
        let ab = self.0.matmul(b)?;
        Self::new(b.adjoint_matmul(&ab)?)
    }
}

/// Sort direction of an [`OrderedSpectrum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    NonIncreasing,
    NonDecreasing,
}

/// Real vector kept in a fixed sort order (ties keep original index order).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderedSpectrum {
    values: Vec<f64>,
    order: Order,
}

impl OrderedSpectrum {
    pub fn descending(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            values,
            order: Order::NonIncreasing,
        })
    }

    pub fn ascending(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        values.sort_by(|a, b| a.total_cmp(b));
        Ok(Self {
            values,
            order: Order::NonDecreasing,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same multiset in the opposite order.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        let order = match self.order {
            Order::NonIncreasing => Order::NonDecreasing,
            Order::NonDecreasing => Order::NonIncreasing,
        };
        Self { values, order }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_construction_symmetrizes() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.3), c(2.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)])
            .unwrap();
        let h = HermitianMatrix::new(m).unwrap();
        let a = h.as_matrix();
        assert_eq!(a[(0, 1)], a[(1, 0)].conj());
        assert_eq!(a[(0, 0)], c(1.0, 0.0));
        assert_eq!(a[(0, 1)], c(1.0, 0.5));
    }

    #[test]
    fn rejects_non_finite_and_bad_shapes() {
        assert_eq!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![c(0.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            a.sub(&ComplexMatrix::zeros(3, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_is_an_involution_and_reverses_products() {
        let a = ComplexMatrix::from_fn(3, 4, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.5));
        let b = ComplexMatrix::from_fn(4, 2, |i, j| c((i + j) as f64, 1.0 - i as f64));
        assert_eq!(a.adjoint().adjoint(), a);
        let lhs = a.matmul(&b).unwrap().adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint()).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-14);
        let fast = a.adjoint_matmul(&a).unwrap();
        let slow = a.adjoint().matmul(&a).unwrap();
        assert!(fast.max_abs_diff(&slow).unwrap() < 1e-14);
    }

    #[test]
    fn hermitian_adjoint_is_itself() {
        let m = ComplexMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64, i as f64 - j as f64));
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.as_matrix().adjoint(), *h.as_matrix());
    }

    #[test]
    fn ordered_spectrum_sorts_stably() {
        let s = OrderedSpectrum::descending(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[3.0, 2.0, 1.0]);
        let e = OrderedSpectrum::descending(vec![]).unwrap();
        assert!(e.is_empty());
        assert_eq!(s.reversed().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.reversed().order(), Order::NonDecreasing);
    }
}
