//! Density compensation operators `D` and the gridding coefficient map `c = Ω D f̂`.
//!
//! Besides the classical trapezoidal weights, `D` can be chosen to minimize
//! `‖T D − Ψ*‖_F` with `T = Ψ*ΨΩ` over diagonal or `(2r−1)`-banded matrices.
//! The Frobenius objective decouples by columns, so each column of `D` is an
//! independent least-squares problem with at most `2r−1` unknowns.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{CoefficientVector, SpectralSystem};
use crate::linalg::{self, ComplexMatrix};
use crate::sampling::SamplingPattern;

/// Whether optimal weights may be complex or are constrained to be real.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DcfField {
    #[default]
    Complex,
    Real,
}

/// A `(2r−1)`-banded `(2n+1)×(2n+1)` operator, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DcfOperator {
    n: usize,
    r: usize,
    /// For column `j`: first stored row and the band values.
    columns: Vec<(usize, Vec<Complex64>)>,
    degenerate: Vec<usize>,
}

impl DcfOperator {
    /// Diagonal operator from weights `α_{-n..=n}`.
    pub fn diagonal(weights: Vec<Complex64>) -> Result<Self> {
        if weights.len() % 2 == 0 {
            return Err(Error::DimensionMismatch(format!(
                "need 2n+1 weights, got {}",
                weights.len()
            )));
        }
        let n = weights.len() / 2;
        Ok(Self {
            n,
            r: 1,
            columns: weights
                .into_iter()
                .enumerate()
                .map(|(j, w)| (j, vec![w]))
                .collect(),
            degenerate: Vec::new(),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![Complex64::new(1.0, 0.0); 2 * n + 1]).expect("odd length")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Bandwidth parameter; `1` means diagonal.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn size(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_diagonal(&self) -> bool {
        self.r == 1
    }

    /// Column indices (0-based) whose band problem had a vanishing matrix.
    pub fn degenerate(&self) -> &[usize] {
        &self.degenerate
    }

    /// Entry at 0-based `(row, col)`; zero outside the band.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let (start, vals) = &self.columns[col];
        if row < *start {
            return Complex64::new(0.0, 0.0);
        }
        vals.get(row - start)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Diagonal weights `α_j`.
    pub fn diagonal_values(&self) -> Vec<Complex64> {
        (0..self.size()).map(|j| self.get(j, j)).collect()
    }

    /// Nonzero pattern as `(row, col, value)` with 0-based indices.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.columns.iter().enumerate().flat_map(|(j, (start, vals))| {
            vals.iter().enumerate().map(move |(k, &v)| (start + k, j, v))
        })
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut d = ComplexMatrix::zeros(self.size(), self.size());
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    /// `D x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.size() {
            return Err(Error::DimensionMismatch(format!(
                "DCF operator of size {} applied to {} samples",
                self.size(),
                x.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.size()];
        for (j, (start, vals)) in self.columns.iter().enumerate() {
            for (k, v) in vals.iter().enumerate() {
                out[start + k] += v * x[j];
            }
        }
        Ok(out)
    }

    /// Rows `start..end` of column `col`'s band.
    fn band(n: usize, r: usize, col: usize) -> (usize, usize) {
        let start = col.saturating_sub(r - 1);
        let end = (col + r).min(2 * n + 1);
        (start, end)
    }
}

/// `α_k = λ_{k+1} − λ_k`, closed at `k = n` with the last backward gap.
pub fn trapezoid(pattern: &SamplingPattern) -> DcfOperator {
    let l = pattern.lambdas();
    let last = l.len() - 1;
    let weights = (0..l.len())
        .map(|k| {
            let gap = if k < last { l[k + 1] - l[k] } else { l[last] - l[last - 1] };
            Complex64::new(gap, 0.0)
        })
        .collect();
    DcfOperator::diagonal(weights).expect("patterns have odd length")
}

/// `α'_j = T_jᴴ Ψ*_j / ‖T_j‖²`, the per-column minimizer of `‖α T_j − Ψ*_j‖`.
pub fn optimal_diagonal(sys: &SpectralSystem, field: DcfField) -> Result<DcfOperator> {
    let t = sys.t_matrix()?;
    let psi_adj = sys.psi_adjoint();
    let size = sys.pattern().len();
    let rows = t.rows();
    let mut weights = Vec::with_capacity(size);
    let mut degenerate = Vec::new();
    for j in 0..size {
        let mut inner = Complex64::new(0.0, 0.0);
        let mut tt = 0.0;
        for i in 0..rows {
            let tij = t[(i, j)];
            inner += tij.conj() * psi_adj[(i, j)];
            tt += tij.norm_sqr();
        }
        if tt == 0.0 {
            degenerate.push(j);
            weights.push(Complex64::new(0.0, 0.0));
            continue;
        }
        let alpha = match field {
            DcfField::Complex => inner / tt,
            DcfField::Real => Complex64::new(inner.re / tt, 0.0),
        };
        weights.push(alpha);
    }
    let mut d = DcfOperator::diagonal(weights)?;
    d.degenerate = degenerate;
    Ok(d)
}

/// Least-squares optimal `(2r−1)`-banded operator, one band solve per column.
///
/// Each column solves `min ‖T_band d − Ψ*_j‖₂` by Householder QR and a
/// minimum-norm pseudo-inverse of the triangular factor, so rank-deficient
/// bands (common for logarithmic sampling) stay well defined.
/// Smallest `r` whose band covers every row of a `(2n+1)`-square matrix.
pub fn full_bandwidth(n: usize) -> usize {
    2 * n + 1
}

pub fn optimal_banded(sys: &SpectralSystem, r: usize, field: DcfField) -> Result<DcfOperator> {
    let n = sys.n();
    if r == 0 || r > full_bandwidth(n) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth r = {r} must lie in [1, 2n+1] = [1, {}]",
            full_bandwidth(n)
        )));
    }
    if r == 1 {
        return optimal_diagonal(sys, field);
    }
    let t = sys.t_matrix()?;
    let psi_adj = sys.psi_adjoint();
    let size = 2 * n + 1;
    let solved: Vec<Result<(usize, Vec<Complex64>, bool)>> = (0..size)
        .into_par_iter()
        .map(|j| {
            let (start, end) = DcfOperator::band(n, r, j);
            let rhs = psi_adj.column(j);
            let block = t.column_block(start, end);
            if block.max_abs() == 0.0 {
                return Ok((start, vec![Complex64::new(0.0, 0.0); end - start], true));
            }
            let vals = match field {
                DcfField::Complex => linalg::lstsq(&block, &rhs)?,
                DcfField::Real => real_lstsq(&block, &rhs)?,
            };
            Ok((start, vals, false))
        })
        .collect();
    let mut columns = Vec::with_capacity(size);
    let mut degenerate = Vec::new();
    for (j, res) in solved.into_iter().enumerate() {
        let (start, vals, degen) = res?;
        if degen {
            degenerate.push(j);
        }
        columns.push((start, vals));
    }
    Ok(DcfOperator {
        n,
        r,
        columns,
        degenerate,
    })
}

/// Real minimizer of `‖A d − b‖` via the stacked system `[Re A; Im A] d = [Re b; Im b]`.
fn real_lstsq(a: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let rows = a.rows();
    let stacked = ComplexMatrix::from_fn(2 * rows, a.cols(), |i, j| {
        let z = a[(i % rows, j)];
        Complex64::new(if i < rows { z.re } else { z.im }, 0.0)
    });
    let rhs: Vec<Complex64> = (0..2 * rows)
        .map(|i| {
            let z = b[i % rows];
            Complex64::new(if i < rows { z.re } else { z.im }, 0.0)
        })
        .collect();
    Ok(linalg::lstsq(&stacked, &rhs)?
        .into_iter()
        .map(|z| Complex64::new(z.re, 0.0))
        .collect())
}

/// `c = Ω D f̂`.
pub fn fcg_coeffs(
    sys: &SpectralSystem,
    d: &DcfOperator,
    fhat: &[Complex64],
) -> Result<CoefficientVector> {
    sys.check_samples(fhat)?;
    if d.size() != fhat.len() {
        return Err(Error::DimensionMismatch(format!(
            "DCF operator of size {} for {} samples",
            d.size(),
            fhat.len()
        )));
    }
    let weighted = d.apply(fhat)?;
    CoefficientVector::new(sys.omega().mul_vec(&weighted)?)
}

/// `‖T D − Ψ*‖_F`.
pub fn objective(sys: &SpectralSystem, d: &DcfOperator) -> Result<f64> {
    let t = sys.t_matrix()?;
    let psi_adj = sys.psi_adjoint();
    if d.size() != t.cols() {
        return Err(Error::DimensionMismatch("DCF operator size".into()));
    }
    let mut total = 0.0;
    for (j, (start, vals)) in d.columns.iter().enumerate() {
        for i in 0..t.rows() {
            let mut acc = -psi_adj[(i, j)];
            for (k, v) in vals.iter().enumerate() {
                acc += t[(i, start + k)] * v;
            }
            total += acc.norm_sqr();
        }
    }
    Ok(total.sqrt())
}

/// Upper bound on `‖Σ (c_l − d_l) ψ_l‖_{L²}` between gridding and frame reconstructions:
/// `(1/α_L) ‖(Ψ*Ψ)⁻¹‖ ‖T D − Ψ*‖_F ‖f̂‖`.
pub fn link_bound(sys: &SpectralSystem, d: &DcfOperator, fhat: &[Complex64]) -> Result<f64> {
    let s = sys.psi().singular_values()?;
    let smin = s.last().copied().unwrap_or(0.0);
    let gram_inv = if smin > 0.0 { 1.0 / (smin * smin) } else { f64::INFINITY };
    Ok(gram_inv * objective(sys, d)? * linalg::norm(fhat) / sys.window().alpha_lower())
}

/// `r(n) = max(1, ⌈log₂ n⌉)`.
pub fn log_bandwidth(n: usize) -> usize {
    if n <= 1 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}
