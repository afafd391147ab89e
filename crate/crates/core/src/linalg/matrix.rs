//! Dense row-major matrix over the real or complex field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use super::LinalgError;

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Scalar field of a matrix. `Real` means every imaginary part is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn join(self, other: Field) -> Field {
        if self == Field::Complex || other == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<C64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} ({})", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| {
                    let z = self[(i, j)];
                    if self.field == Field::Real {
                        format!("{:>10.4}", z.re)
                    } else {
                        format!("{:>9.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, field: Field::Real, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = re(1.0);
        }
        m
    }

    /// Builds a real matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let cl = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Matrix::zeros(r, cl);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cl, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = re(v);
            }
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, field: Field::Real, data: data.iter().map(|&x| re(x)).collect() }
    }

    pub fn from_complex(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        let mut m = Matrix { rows, cols, field: Field::Complex, data };
        m.field = Field::Complex;
        m
    }

    /// Checked constructor: validates length and finiteness, and that a real field has no imaginary parts.
    pub fn try_new(rows: usize, cols: usize, field: Field, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::InvalidInput(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::InvalidInput("non-finite entry".into()));
        }
        if field == Field::Real && data.iter().any(|z| z.im != 0.0) {
            return Err(LinalgError::InvalidInput("complex entry in a real matrix".into()));
        }
        Ok(Matrix { rows, cols, field, data })
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = re(v);
        }
        m
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m.field = if d.iter().all(|z| z.im == 0.0) { Field::Real } else { Field::Complex };
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

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Declares the field; a matrix with nonzero imaginary parts stays complex.
    pub fn with_field(mut self, field: Field) -> Self {
        // a real tag never discards imaginary parts
        self.field = if field == Field::Real && self.data.iter().any(|z| z.im != 0.0) { Field::Complex } else { field };
        self
    }

    /// Drops imaginary parts and tags the result real.
    pub fn into_real(mut self) -> Self {
        for z in &mut self.data {
            z.im = 0.0;
        }
        self.field = Field::Real;
        self
    }

    pub fn settle_field(self, hint: Field, tol: f64) -> Self {
        if hint == Field::Real && self.data.iter().all(|z| z.im.abs() <= tol) {
            self.into_real()
        } else {
            let mut m = self;
            m.field = Field::Complex;
            m
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self) -> Result<(), LinalgError> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(LinalgError::InvalidInput("non-finite entry".into()))
        }
    }

    pub fn adjoint(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m.field = self.field;
        m
    }

    pub fn transpose(&self) -> Matrix {
        let mut m = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m.field = self.field;
        m
    }

    pub fn conj(&self) -> Matrix {
        let mut m = self.clone();
        for z in &mut m.data {
            *z = z.conj();
        }
        m
    }

    pub fn scale(&self, s: C64) -> Matrix {
        let mut m = self.clone();
        for z in &mut m.data {
            *z *= s;
        }
        if s.im != 0.0 {
            m.field = Field::Complex;
        }
        m
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        self.scale(re(s))
    }

    pub fn norm_fro(&self) -> f64 {
        // scaled accumulation to avoid overflow
        let amax = self.max_abs();
        if amax == 0.0 {
            return 0.0;
        }
        let s: f64 = self.data.iter().map(|z| (z.norm() / amax).powi(2)).sum();
        amax * s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    pub fn norm2(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        super::svd::singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Copy of rows r0..r1 and columns c0..c1.
    pub fn sub(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols, "block out of range");
        let mut m = Matrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        m.field = self.field;
        m
    }

    /// Extracts the rows and columns listed.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m.field = self.field;
        m
    }

    pub fn columns(&self, c0: usize, c1: usize) -> Matrix {
        self.sub(0, self.rows, c0, c1)
    }

    pub fn rows_range(&self, r0: usize, r1: usize) -> Matrix {
        self.sub(r0, r1, 0, self.cols)
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
        if v.iter().any(|z| z.im != 0.0) {
            self.field = Field::Complex;
        }
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
        self.field = self.field.join(b.field);
    }

    pub fn zero_block(&mut self, r0: usize, r1: usize, c0: usize, c1: usize) {
        for i in r0..r1 {
            for j in c0..c1 {
                self[(i, j)] = re(0.0);
            }
        }
    }

    pub fn hstack(parts: &[&Matrix]) -> Matrix {
        let rows = parts.first().map(|m| m.rows).unwrap_or(0);
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        out
    }

    pub fn vstack(parts: &[&Matrix]) -> Matrix {
        let cols = parts.first().map(|m| m.cols).unwrap_or(0);
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        out
    }

    /// Block diagonal concatenation.
    pub fn block_diag(parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            out.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    /// Assembles a block matrix; row heights and column widths are taken from the blocks.
    pub fn blocks(grid: &[Vec<&Matrix>]) -> Matrix {
        let heights: Vec<usize> = grid.iter().map(|row| row[0].rows).collect();
        let widths: Vec<usize> = grid[0].iter().map(|b| b.cols).collect();
        let mut out = Matrix::zeros(heights.iter().sum(), widths.iter().sum());
        let mut r0 = 0;
        for (bi, row) in grid.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in row.iter().enumerate() {
                assert_eq!(b.rows, heights[bi], "block height mismatch");
                assert_eq!(b.cols, widths[bj], "block width mismatch");
                out.set_block(r0, c0, b);
                c0 += b.cols;
            }
            r0 += heights[bi];
        }
        out
    }

    pub fn hermitian_part(&self) -> Matrix {
        (&(self + &self.adjoint())).scale_real(0.5)
    }

    pub fn skew_part(&self) -> Matrix {
        (&(self - &self.adjoint())).scale_real(0.5)
    }

    /// Swaps columns i and j.
    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    /// Permutes columns: column k of the result is column `perm[k]` of self.
    pub fn permute_cols(&self, perm: &[usize]) -> Matrix {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, perm)
    }

    pub fn permute_rows(&self, perm: &[usize]) -> Matrix {
        let cols: Vec<usize> = (0..self.cols).collect();
        self.select(perm, &cols)
    }

    /// Sets entries with modulus at most `tol` to exact zero.
    pub fn chop(&mut self, tol: f64) {
        for z in &mut self.data {
            if z.norm() <= tol {
                *z = re(0.0);
            }
        }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Largest entrywise distance between two matrices of equal shape.
    pub fn max_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch {:?} x {:?}", self.shape(), other.shape());
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![re(0.0); n * m];
        for i in 0..n {
            let orow = &mut out[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[p * m..(p + 1) * m];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Matrix { rows: n, cols: m, field: self.field.join(other.field), data: out }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.join(rhs.field), data }
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, field: self.field.join(rhs.field), data }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

/// Relative and absolute thresholds for rank and comparison decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { relative: 1e-10, absolute: 1e-13 }
    }
}

impl Tolerance {
    pub fn new(relative: f64, absolute: f64) -> Result<Self, LinalgError> {
        if !(relative.is_finite() && absolute.is_finite()) || relative < 0.0 || absolute < 0.0 {
            return Err(LinalgError::InvalidInput("tolerances must be finite and nonnegative".into()));
        }
        Ok(Tolerance { relative, absolute })
    }

    /// `dim · relative · scale + absolute`.
    pub fn threshold(&self, dim: usize, scale: f64) -> f64 {
        dim.max(1) as f64 * self.relative * scale + self.absolute
    }

    pub fn scaled(&self, factor: f64) -> Tolerance {
        Tolerance { relative: self.relative * factor, absolute: self.absolute * factor }
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    field: Field,
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            re: self.data.iter().map(|z| z.re).collect(),
            im: (self.field == Field::Complex).then(|| self.data.iter().map(|z| z.im).collect()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        let im = r.im.unwrap_or_else(|| vec![0.0; r.re.len()]);
        if im.len() != r.re.len() {
            return Err(serde::de::Error::custom("re/im length mismatch"));
        }
        let data = r.re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
        Matrix::try_new(r.rows, r.cols, r.field, data).map_err(serde::de::Error::custom)
    }
}
