//! Dense complex matrices.
//!
//! [`CMatrix`] wraps a column-major `nalgebra` matrix but exposes row-major
//! construction, which is what the text interchange format and most call
//! sites use.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct CMatrix(DMatrix<C64>);

/// Serialized form: dimensions plus row-major `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

impl From<CMatrix> for MatrixRepr {
    fn from(m: CMatrix) -> Self {
        MatrixRepr {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixRepr> for CMatrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        let entries = r.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        CMatrix::from_row_major(r.rows, r.cols, entries)
    }
}

impl CMatrix {
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidData(format!("dimensions must be positive, got {rows}x{cols}")));
        }
        if entries.len() != rows * cols {
            return Err(Error::InvalidData(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(CMatrix(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Row-major construction from real entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        CMatrix(DMatrix::from_fn(rows, cols, |i, j| f(i, j)))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        CMatrix(DMatrix::identity(dim, dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    /// Column vector from complex entries.
    pub fn column(values: &[C64]) -> Self {
        CMatrix(DMatrix::from_column_slice(values.len(), 1, values))
    }

    /// The rank-one operator `g ⊗ f : h ↦ ⟨h, g⟩ f`, i.e. the matrix `f g*`.
    pub fn rank_one(g: &CMatrix, f: &CMatrix) -> Result<Self> {
        if g.cols() != 1 || f.cols() != 1 {
            return Err(Error::DimensionMismatch { context: "rank_one expects column vectors".into() });
        }
        Ok(CMatrix(&f.0 * g.0.adjoint()))
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        CMatrix(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let (r, c) = self.shape();
        (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| self.0[(i, j)]).collect()
    }

    /// Column `j` as a column vector.
    pub fn col(&self, j: usize) -> CMatrix {
        let n = self.rows();
        CMatrix(DMatrix::from_fn(n, 1, |i, _| self.0[(i, j)]))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix(self.0.adjoint())
    }

    pub fn scale(&self, factor: f64) -> CMatrix {
        CMatrix(&self.0 * C64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: C64) -> CMatrix {
        CMatrix(&self.0 * factor)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |M - M*|` over entries; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                dev = dev.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> CMatrix {
        CMatrix((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Sum of squared entry moduli.
    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Integer power by repeated multiplication.
    pub fn pow(&self, k: usize) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { context: "power of a non-square matrix".into() });
        }
        let mut out = CMatrix::identity(self.rows());
        for _ in 0..k {
            out = &out * self;
        }
        Ok(out)
    }

    pub fn try_mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                context: format!("cannot multiply {:?} by {:?}", self.shape(), rhs.shape()),
            });
        }
        Ok(CMatrix(&self.0 * &rhs.0))
    }

    pub fn try_add(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                context: format!("cannot add {:?} and {:?}", self.shape(), rhs.shape()),
            });
        }
        Ok(CMatrix(&self.0 + &rhs.0))
    }

    /// Largest entry-wise difference; infinite when the shapes differ.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Horizontal concatenation `[M₁, …, M_N]`.
    pub fn hstack(blocks: &[CMatrix]) -> Result<CMatrix> {
        let first = blocks.first().ok_or(Error::EmptyFamily)?;
        let rows = first.rows();
        if blocks.iter().any(|b| b.rows() != rows) {
            return Err(Error::DimensionMismatch { context: "hstack row counts differ".into() });
        }
        let cols: usize = blocks.iter().map(CMatrix::cols).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            out.view_mut((0, offset), b.shape()).copy_from(&b.0);
            offset += b.cols();
        }
        Ok(CMatrix(out))
    }

    /// Vertical concatenation `[M₁, …, M_N]ᵀ`.
    pub fn vstack(blocks: &[CMatrix]) -> Result<CMatrix> {
        let first = blocks.first().ok_or(Error::EmptyFamily)?;
        let cols = first.cols();
        if blocks.iter().any(|b| b.cols() != cols) {
            return Err(Error::DimensionMismatch { context: "vstack column counts differ".into() });
        }
        let rows: usize = blocks.iter().map(CMatrix::rows).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            out.view_mut((offset, 0), b.shape()).copy_from(&b.0);
            offset += b.rows();
        }
        Ok(CMatrix(out))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator impls panic on shape mismatch, like nalgebra; use `try_*` on
// unchecked input.
impl Mul<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 * &rhs.0)
    }
}

impl Add<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 + &rhs.0)
    }
}

impl Sub<&CMatrix> for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        CMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        CMatrix(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_of_nilpotent() {
        let m = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let expected = CMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.adjoint(), expected);
    }

    #[test]
    fn adjoint_conjugates_scalar() {
        let m = CMatrix::from_row_major(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(m.adjoint().get(0, 0), c(0.0, -1.0));
    }

    #[test]
    fn adjoint_is_involutive_and_reverses_products() {
        let m = CMatrix::from_fn(4, 3, |i, j| c(i as f64 - 0.3 * j as f64, 0.7 * (i * j) as f64 - 1.1));
        let n = CMatrix::from_fn(3, 2, |i, j| c(0.2 * i as f64 + j as f64, -(i as f64)));
        assert_eq!(m.adjoint().adjoint(), m);
        // entry-wise oracle for the double adjoint
        let mut twice = CMatrix::zeros(4, 3);
        for i in 0..4 {
            for j in 0..3 {
                twice.set(i, j, m.adjoint().get(j, i).conj());
            }
        }
        assert_eq!(twice, m);
        let lhs = (&m * &n).adjoint();
        let rhs = &n.adjoint() * &m.adjoint();
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn construction_checks_length() {
        assert!(CMatrix::from_real(2, 2, &[1.0, 2.0, 3.0]).is_err());
        assert!(CMatrix::from_real(0, 2, &[]).is_err());
    }

    #[test]
    fn rank_one_orientation() {
        // g ⊗ f maps g to ‖g‖² f
        let g = CMatrix::column(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let f = CMatrix::column(&[c(2.0, 0.0), c(0.0, 0.0)]);
        let op = CMatrix::rank_one(&g, &f).unwrap();
        let image = &op * &g;
        assert!(image.max_abs_diff(&f.scale(2.0)) < 1e-15);
    }

    #[test]
    fn stacking() {
        let a = CMatrix::identity(2);
        let b = CMatrix::diag(&[2.0, 3.0]);
        let row = CMatrix::hstack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(row.shape(), (2, 4));
        assert_eq!(row.get(1, 3), c(3.0, 0.0));
        let col = CMatrix::vstack(&[a, b]).unwrap();
        assert_eq!(col.shape(), (4, 2));
        assert_eq!(col.get(2, 0), c(2.0, 0.0));
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let m = CMatrix::from_fn(2, 3, |i, j| c(0.1 * i as f64 + 1.0 / 3.0, (j as f64).sqrt()));
        let text = serde_json::to_string(&m).unwrap();
        let back: CMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }
}
