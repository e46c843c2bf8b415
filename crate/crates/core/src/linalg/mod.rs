//! Dense complex matrices and the three factorizations the code theory
//! rests on: Hermitian eigendecomposition, singular values and the left
//! pseudo-inverse.
//!
//! Everything here is double precision. Tolerances are relative to the
//! Frobenius norm of the operand with an absolute floor of
//! [`ABS_TOL_FLOOR`].

mod eigen;
mod solve;
mod svd;
mod text;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen};
pub use solve::{left_pseudo_inverse, solve, RANK_REL_TOL};
pub use svd::singular_values;
pub use text::{format_complex, parse_complex, read_matrix, write_matrix};

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Lower bound applied to every scaled tolerance.
pub const ABS_TOL_FLOOR: f64 = 1e-12;

/// `rel * scale`, but never below [`ABS_TOL_FLOOR`].
pub fn scaled_tol(rel: f64, scale: f64) -> f64 {
    (rel * scale).max(ABS_TOL_FLOOR)
}

/// Row-major dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> C64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        CMatrix {
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

    /// A column vector.
    pub fn column(v: &[C64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Columns `indices` of `self`, in the given order.
    pub fn select_cols(&self, indices: &[usize]) -> Result<CMatrix> {
        if let Some(&bad) = indices.iter().find(|&&j| j >= self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        CMatrix::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Result<C64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    pub fn scale(&self, a: f64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * a).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch(format!(
                "{:?} - {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self - self^H`; `None` when not square.
    pub fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Some(worst)
    }

    /// `self * x` for a vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(self.mul_vec_unchecked(x))
    }

    pub(crate) fn mul_vec_unchecked(&self, x: &[C64]) -> Vec<C64> {
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self^H * x` for a vector `x` of length `rows`, without forming `self^H`.
    pub fn adjoint_mul_vec(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "({}x{})^H times length-{} vector",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok(self.adjoint_mul_vec_unchecked(x))
    }

    pub(crate) fn adjoint_mul_vec_unchecked(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        for (row, xi) in self.data.chunks_exact(self.cols).zip(x) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * xi;
            }
        }
        out
    }

    /// `self * self^H`, Hermitian by construction.
    pub fn gram(&self) -> CMatrix {
        let k = self.rows;
        let mut out = CMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v: C64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
            out[(i, i)].im = 0.0;
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|z| format_complex(*z)).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Standard complex matrix product.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = CMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for l in 0..a.cols {
            let ail = a[(i, l)];
            if ail == C64::new(0.0, 0.0) {
                continue;
            }
            let brow = b.row(l);
            let orow = &mut out.data[i * b.cols..(i + 1) * b.cols];
            for (o, bv) in orow.iter_mut().zip(brow) {
                *o += ail * bv;
            }
        }
    }
    Ok(out)
}

/// `(m^H)_{ji} = conj(m_{ij})`.
pub fn hermitian_transpose(m: &CMatrix) -> CMatrix {
    let mut data = Vec::with_capacity(m.data.len());
    for j in 0..m.cols {
        for i in 0..m.rows {
            data.push(m[(i, j)].conj());
        }
    }
    CMatrix {
        rows: m.cols,
        cols: m.rows,
        data,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumKind {
    EigenvaluesOfHermitian,
    SingularValues,
}

/// Real spectrum sorted ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    kind: SpectrumKind,
}

impl Spectrum {
    pub(crate) fn new(mut values: Vec<f64>, kind: SpectrumKind) -> Self {
        values.sort_by(f64::total_cmp);
        if kind == SpectrumKind::SingularValues {
            for v in &mut values {
                *v = v.max(0.0);
            }
        }
        Spectrum { values, kind }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SpectrumKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub(crate) fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_times_matrix() {
        let m = CMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(3.0, -1.0)],
            vec![c(0.5, 0.0), c(0.0, 4.0)],
        ])
        .unwrap();
        assert_eq!(matmul(&CMatrix::identity(2), &m).unwrap(), m);
    }

    #[test]
    fn permutation_swaps_entries() {
        let p = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let v = CMatrix::column(&[c(2.0, 1.0), c(-3.0, 0.5)]).unwrap();
        let out = matmul(&p, &v).unwrap();
        assert_eq!(out.as_slice(), &[c(-3.0, 0.5), c(2.0, 1.0)]);
    }

    #[test]
    fn row_times_column_cancels() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)]]).unwrap();
        let b = CMatrix::column(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let out = matmul(&a, &b).unwrap();
        assert_eq!(out.shape(), (1, 1));
        assert_eq!(out[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = CMatrix::zeros(2, 3);
        let b = CMatrix::zeros(2, 3);
        assert!(matches!(matmul(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn conjugate_transpose_basics() {
        let s = CMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(hermitian_transpose(&s), s);
        let i = CMatrix::new(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(hermitian_transpose(&i)[(0, 0)], c(0.0, -1.0));
    }

    #[test]
    fn conjugate_transpose_is_involution() {
        let m = CMatrix::from_fn(3, 5, |i, j| {
            c(i as f64 - 0.3 * j as f64, (i * j) as f64 + 0.25)
        })
        .unwrap();
        let t = hermitian_transpose(&m);
        assert_eq!(t.shape(), (5, 3));
        assert_eq!(hermitian_transpose(&t), m);
    }

    #[test]
    fn rejects_bad_shapes_and_nan() {
        assert!(CMatrix::new(0, 2, vec![]).is_err());
        assert!(CMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
        let e = CMatrix::from_real(1, 2, &[1.0, f64::NAN]).unwrap_err();
        assert!(matches!(e, Error::NonFinite { row: 0, col: 1 }));
    }

    #[test]
    fn gram_matches_explicit_product() {
        let g = CMatrix::from_fn(3, 4, |i, j| {
            c((i + 2 * j) as f64 * 0.1, (i as f64) - (j as f64) * 0.7)
        })
        .unwrap();
        let explicit = matmul(&g, &hermitian_transpose(&g)).unwrap();
        assert!(g.gram().sub(&explicit).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn adjoint_mul_matches_explicit() {
        let g = CMatrix::from_fn(2, 3, |i, j| c(i as f64 + 1.0, j as f64 - 1.0)).unwrap();
        let x = [c(0.5, -1.0), c(2.0, 0.25)];
        let direct = g.adjoint_mul_vec(&x).unwrap();
        let explicit = hermitian_transpose(&g).mul_vec(&x).unwrap();
        for (a, b) in direct.iter().zip(&explicit) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
