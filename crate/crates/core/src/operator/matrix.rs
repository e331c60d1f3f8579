//! Dense complex matrices in row-major order.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, C};

/// Dense complex matrix. Entries are stored row-major; all constructors
/// reject non-finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    entries: Vec<C<S>>,
}

impl<S: Scalar> ComplexMatrix<S> {
    /// Build from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C<S>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for (k, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite {
                    row: k / cols,
                    col: k % cols,
                });
            }
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    /// Square matrix from a closure over (row, col).
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C<S>) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self::new(dim, dim, entries)
    }

    /// Square matrix from rows of `f64` (re, im) pairs; test and I/O helper.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            for &(re, im) in row {
                entries.push(Complex::new(S::from_real(re), S::from_real(im)));
            }
        }
        Self::new(n, m, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C::one();
        }
        m
    }

    /// Diagonal matrix from real values.
    pub fn diagonal(values: &[S]) -> Self {
        let d = values.len();
        let mut m = Self::zeros(d, d);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * d + i] = Complex::new(v, S::zero());
        }
        m
    }

    /// Matrix unit `e_i e_j^dag` (1 in entry (i, j)).
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.entries[i * dim + j] = C::one();
        m
    }

    /// Outer product `u v^dag` of two column vectors.
    pub fn outer(u: &[C<S>], v: &[C<S>]) -> Self {
        let rows = u.len();
        let cols = v.len();
        let mut entries = Vec::with_capacity(rows * cols);
        for ui in u {
            for vj in v {
                entries.push(ui * vj.conj());
            }
        }
        ComplexMatrix { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::DimensionMismatch(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C<S> {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: C<S>) {
        self.entries[i * self.cols + j] = z;
    }

    pub fn entries(&self) -> &[C<S>] {
        &self.entries
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<C<S>> {
        (0..self.rows).map(|i| self.at(i, j)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.at(i, j).conj());
            }
        }
        ComplexMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, factor: C<S>) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: S) -> Self {
        self.scale(Complex::new(factor, S::zero()))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = vec![C::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.at(i, k);
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    entries[i * other.cols + j] += aik * other.at(k, j);
                }
            }
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Result<C<S>> {
        let d = self.dim()?;
        Ok((0..d).map(|i| self.at(i, i)).sum())
    }

    /// Frobenius norm (entrywise 2-norm); an upper bound on the operator norm.
    pub fn frobenius_norm(&self) -> S {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs_entry(&self) -> S {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(S::zero(), S::max)
    }

    /// Hermitian part `(A + A^dag)/2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        self.dim()?;
        let half = S::from_real(0.5);
        let adj = self.adjoint();
        Ok(self.add(&adj)?.scale_real(half))
    }

    /// Frobenius distance to the adjoint; zero iff exactly Hermitian.
    pub fn hermitian_deviation(&self) -> Result<S> {
        self.dim()?;
        Ok(self.sub(&self.adjoint())?.frobenius_norm())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}
