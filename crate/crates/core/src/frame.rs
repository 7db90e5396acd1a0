//! The spectral system for a (pattern, window, m) triple and the finite frame
//! approximation `A_frm(f) = Σ_{|l|≤m} d_l ψ_l`, `ψ_l(x) = e^{2πilx} / w(x)`.
//!
//! Two matrices carry everything:
//!
//! * `Ψ` ((2n+1)×(2m+1)), `Ψ[j, l] = ⟨ψ_l, φ_j⟩ = ∫₀¹ e^{2πi(l-λ_j)x} / w(x) dx`,
//!   so that the samples of `f = Σ d_l ψ_l` are exactly `f̂ = Ψ d`;
//! * `Ω` ((2m+1)×(2n+1)), `Ω[l, j] = ŵ(l - λ_j)`, the gridding kernel.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{default_rank_tol, ComplexMatrix};
use crate::sampling::SamplingPattern;
use crate::window::WindowSpec;

/// Coefficients `c_l`, `|l| ≤ m`, in the basis `ψ_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    m: usize,
    values: Vec<Complex64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.len() % 2 == 0 {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector needs odd length 2m+1, got {}",
                values.len()
            )));
        }
        Ok(Self {
            m: values.len() / 2,
            values,
        })
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            values: vec![Complex64::new(0.0, 0.0); 2 * m + 1],
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// `c_l` for `l ∈ [-m, m]`.
    pub fn get(&self, l: i64) -> Complex64 {
        self.values[(l + self.m as i64) as usize]
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }
}

/// `Ψ`, `Ω` and the products derived from them, for one (pattern, window, m).
#[derive(Debug)]
pub struct SpectralSystem {
    pattern: SamplingPattern,
    window: WindowSpec,
    m: usize,
    psi: ComplexMatrix,
    omega: ComplexMatrix,
    psi_adjoint: OnceLock<ComplexMatrix>,
    t: OnceLock<ComplexMatrix>,
    psi_pinv: OnceLock<ComplexMatrix>,
}

impl SpectralSystem {
    pub fn build(pattern: &SamplingPattern, window: WindowSpec, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        let lambdas = pattern.lambdas();
        let rows = lambdas.len();
        let cols = 2 * m + 1;
        let mode = |l: usize| crate::centered(l, m) as f64;
        let psi = ComplexMatrix::from_fn(rows, cols, |j, l| {
            window.recip_moment(2.0 * PI * (mode(l) - lambdas[j]))
        });
        let omega =
            ComplexMatrix::from_fn(cols, rows, |l, j| window.transform(mode(l) - lambdas[j]));
        Ok(Self {
            pattern: pattern.clone(),
            window,
            m,
            psi,
            omega,
            psi_adjoint: OnceLock::new(),
            t: OnceLock::new(),
            psi_pinv: OnceLock::new(),
        })
    }

    pub fn pattern(&self) -> &SamplingPattern {
        &self.pattern
    }

    pub fn window(&self) -> WindowSpec {
        self.window
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn psi(&self) -> &ComplexMatrix {
        &self.psi
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    /// `Ψ*`, computed once.
    pub fn psi_adjoint(&self) -> &ComplexMatrix {
        self.psi_adjoint.get_or_init(|| self.psi.adjoint())
    }

    /// `T = Ψ*ΨΩ`, computed once.
    pub fn t_matrix(&self) -> Result<&ComplexMatrix> {
        if let Some(t) = self.t.get() {
            return Ok(t);
        }
        let psi_omega = self.psi.matmul(&self.omega)?;
        let t = self.psi_adjoint().matmul(&psi_omega)?;
        Ok(self.t.get_or_init(|| t))
    }

    /// `Ψ†` with the default rank tolerance, computed once.
    pub fn psi_pinv(&self) -> Result<&ComplexMatrix> {
        if let Some(p) = self.psi_pinv.get() {
            return Ok(p);
        }
        let p = self
            .psi
            .pinv(default_rank_tol(self.psi.rows(), self.psi.cols()))?;
        Ok(self.psi_pinv.get_or_init(|| p))
    }

    pub(crate) fn check_samples(&self, fhat: &[Complex64]) -> Result<()> {
        if fhat.len() != self.pattern.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} samples for a pattern of {} frequencies",
                fhat.len(),
                self.pattern.len()
            )));
        }
        Ok(())
    }
}

/// `m = ⌈γ n⌉`.
pub fn truncation_for(n: usize, m_factor: f64) -> Result<usize> {
    if !(m_factor > 0.0 && m_factor.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "m-factor must be positive, got {m_factor}"
        )));
    }
    Ok(((m_factor * n as f64).ceil() as usize).max(1))
}

/// Frame coefficients `d = Ψ† f̂`.
pub fn frame_coeffs(sys: &SpectralSystem, fhat: &[Complex64]) -> Result<CoefficientVector> {
    sys.check_samples(fhat)?;
    let d = sys.psi_pinv()?.mul_vec(fhat)?;
    CoefficientVector::new(d)
}

/// Default evaluation grid, `max(1024, 4(2m+1))`.
pub fn default_grid_size(m: usize) -> usize {
    1024.max(4 * (2 * m + 1))
}

/// `Σ_l c_l e^{2πilx_p} / w(x_p)` at `x_p = p/N`, via one inverse FFT of the
/// zero-extended coefficients.
pub fn evaluate(
    coeffs: &CoefficientVector,
    window: WindowSpec,
    grid_size: usize,
) -> Result<Vec<Complex64>> {
    let m = coeffs.m();
    if grid_size < 2 * m + 1 {
        return Err(Error::GridTooSmall {
            grid: grid_size,
            modes: 2 * m + 1,
        });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); grid_size];
    for (i, &c) in coeffs.values().iter().enumerate() {
        let l = crate::centered(i, m);
        buf[l.rem_euclid(grid_size as i64) as usize] = c;
    }
    // rustfft's inverse is the unnormalized e^{+2πi pk/N} sum
    FftPlanner::new().plan_fft_inverse(grid_size).process(&mut buf);
    for (p, v) in buf.iter_mut().enumerate() {
        *v /= window.eval(p as f64 / grid_size as f64)?;
    }
    Ok(buf)
}

/// Grid `x_p = p/N`.
pub fn grid_points(grid_size: usize) -> Vec<f64> {
    (0..grid_size).map(|p| p as f64 / grid_size as f64).collect()
}
