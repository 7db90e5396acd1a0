//! Dense complex matrices: products, singular values, Moore–Penrose
//! pseudo-inverse and minimum-norm least squares.
//!
//! Storage is row-major. Products parallelize over output rows with a fixed
//! summation order per entry, so results do not depend on the worker count.
//! Factorizations delegate to `nalgebra`.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const SVD_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Entrywise construction, evaluated in parallel.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> Complex64 + Sync,
    ) -> Self {
        let mut data = vec![ZERO; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![ZERO; self.rows * rhs.cols];
        if rhs.cols > 0 {
            out.par_chunks_mut(rhs.cols).enumerate().for_each(|(i, acc)| {
                for (k, &a) in self.row(i).iter().enumerate() {
                    if a == ZERO {
                        continue;
                    }
                    for (c, &b) in acc.iter_mut().zip(rhs.row(k)) {
                        *c += a * b;
                    }
                }
            });
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data: out,
        })
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .into_par_iter()
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(ZERO, |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} minus {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Columns `start..end` as a new matrix.
    pub fn column_block(&self, start: usize, end: usize) -> ComplexMatrix {
        Self::from_fn(self.rows, end - start, |i, j| self[(i, start + j)])
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(Vec::new());
        }
        let svd = self
            .to_nalgebra()
            .try_svd(false, false, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdNotConverged {
                rows: self.rows,
                cols: self.cols,
            })?;
        let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// Spectral norm.
    pub fn norm2(&self) -> Result<f64> {
        Ok(self.singular_values()?.first().copied().unwrap_or(0.0))
    }

    /// `σ_max / σ_min`; infinite when rank deficient.
    pub fn condition_number(&self) -> Result<f64> {
        let s = self.singular_values()?;
        match (s.first(), s.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
            (Some(_), Some(_)) => Ok(f64::INFINITY),
            _ => Ok(0.0),
        }
    }

    /// Moore–Penrose pseudo-inverse.
    ///
    /// Singular values at or below `rank_tol · σ_max` are treated as zero.
    pub fn pinv(&self, rank_tol: f64) -> Result<ComplexMatrix> {
        if rank_tol < 0.0 {
            return Err(Error::InvalidParameter("rank_tol must be >= 0".into()));
        }
        if self.rows == 0 || self.cols == 0 {
            return Ok(Self::zeros(self.cols, self.rows));
        }
        let svd = self
            .to_nalgebra()
            .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
            .ok_or(Error::SvdNotConverged {
                rows: self.rows,
                cols: self.cols,
            })?;
        let (u, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let s = &svd.singular_values;
        let smax = s.iter().copied().fold(0.0, f64::max);
        let cut = rank_tol * smax;
        // pinv = V Σ⁺ Uᴴ
        let k = s.len();
        let inv: Vec<f64> = s
            .iter()
            .map(|&x| if x > cut && x > 0.0 { 1.0 / x } else { 0.0 })
            .collect();
        Ok(Self::from_fn(self.cols, self.rows, |i, j| {
            let mut acc = ZERO;
            for r in 0..k {
                if inv[r] != 0.0 {
                    acc += v_t[(r, i)].conj() * inv[r] * u[(j, r)].conj();
                }
            }
            acc
        }))
    }
}

/// Default truncation `1e-12 · max(rows, cols)` relative to the largest singular value.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    1e-12 * rows.max(cols) as f64
}

/// Minimum-norm least-squares solution of `A x ≈ b`.
pub fn lstsq(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    lstsq_with_tol(a, b, default_rank_tol(a.rows(), a.cols()))
}

/// [`lstsq`] with an explicit relative rank tolerance.
///
/// Tall systems are first reduced by a Householder QR, `A = QR`, and then
/// solved as `x = R⁺ Qᴴ b`, which is the minimum-norm solution because `Q`
/// has orthonormal columns.
pub fn lstsq_with_tol(a: &ComplexMatrix, b: &[Complex64], rank_tol: f64) -> Result<Vec<Complex64>> {
    if a.rows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    if a.cols() == 0 {
        return Ok(Vec::new());
    }
    if a.rows() > 2 * a.cols() {
        let qr = a.to_nalgebra().qr();
        let mut qb = nalgebra::DVector::from_column_slice(b);
        qr.q_tr_mul(&mut qb);
        let r = ComplexMatrix::from_nalgebra(&qr.r());
        let head: Vec<Complex64> = qb.iter().take(a.cols()).copied().collect();
        return r.pinv(rank_tol)?.mul_vec(&head);
    }
    a.pinv(rank_tol)?.mul_vec(b)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
