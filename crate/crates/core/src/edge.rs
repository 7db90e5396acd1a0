//! Jump detection from non-uniform Fourier samples.
//!
//! Multiplying `f̂(λ)` by `2πiλ ε ĥ(λε)` turns the samples into (approximate)
//! samples of the regularized jump field `Σ [f](ξ) h((x − ξ)/ε)`. That vector
//! goes through the same coefficient maps as ordinary reconstruction, and
//! peaks of the result locate the jumps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dcf::{self, DcfField, DcfOperator};
use crate::error::{Error, Result};
use crate::frame::{self, CoefficientVector, SpectralSystem};
use crate::sampling::SamplingPattern;

/// Bump profile `h` with `h(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bump {
    /// `h(u) = e^{−b u²}`
    Gaussian { b: f64 },
}

impl Bump {
    pub fn gaussian(b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!("gaussian bump needs b > 0, got {b}")));
        }
        Ok(Bump::Gaussian { b })
    }

    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            Bump::Gaussian { b } => (-b * u * u).exp(),
        }
    }

    /// Full-line transform `ĥ(ξ) = ∫ h(u) e^{−2πiuξ} du`.
    pub fn transform(&self, xi: f64) -> f64 {
        match *self {
            Bump::Gaussian { b } => (PI / b).sqrt() * (-PI * PI * xi * xi / b).exp(),
        }
    }
}

impl fmt::Display for Bump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bump::Gaussian { b } => write!(f, "gaussian:b={b}"),
        }
    }
}

/// How the concentration vector is turned into Fourier-series coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMethod {
    /// Gridding with optimal `(2r−1)`-banded density compensation.
    Fcg { r: usize },
    /// Exact frame approximation `Ψ†`.
    Fa,
    /// Gridding with trapezoidal weights.
    CgTrapezoid,
}

impl FromStr for EdgeMethod {
    type Err = Error;

    /// `fa`, `cg-trapezoid`, or `fcg:<r>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fa" => Ok(EdgeMethod::Fa),
            "cg-trapezoid" | "cg" => Ok(EdgeMethod::CgTrapezoid),
            other => other
                .strip_prefix("fcg:")
                .and_then(|r| r.parse::<usize>().ok())
                .filter(|&r| r >= 1)
                .map(|r| EdgeMethod::Fcg { r })
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "edge method `{s}` (expected fa | cg-trapezoid | fcg:<r>)"
                    ))
                }),
        }
    }
}

impl fmt::Display for EdgeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeMethod::Fcg { r } => write!(f, "fcg:{r}"),
            EdgeMethod::Fa => write!(f, "fa"),
            EdgeMethod::CgTrapezoid => write!(f, "cg-trapezoid"),
        }
    }
}

/// Schedule for the regularization width `ε_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    Constant(f64),
    /// `ε_n = c · n^{−γ}`
    Power { c: f64, gamma: f64 },
}

impl EpsilonPolicy {
    pub fn epsilon(&self, n: usize) -> f64 {
        match *self {
            EpsilonPolicy::Constant(e) => e,
            EpsilonPolicy::Power { c, gamma } => c * (n as f64).powf(-gamma),
        }
    }
}

impl Default for EpsilonPolicy {
    fn default() -> Self {
        EpsilonPolicy::Constant(0.02)
    }
}

impl FromStr for EpsilonPolicy {
    type Err = Error;

    /// `const:<v>` or `power:<c>,<γ>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::InvalidParameter(format!("epsilon policy `{s}` (const:<v> | power:<c>,<gamma>)"))
        };
        let s = s.trim();
        if let Some(v) = s.strip_prefix("const:") {
            let v: f64 = v.parse().map_err(|_| bad())?;
            return if v > 0.0 { Ok(EpsilonPolicy::Constant(v)) } else { Err(bad()) };
        }
        let rest = s.strip_prefix("power:").ok_or_else(bad)?;
        let (c, g) = rest.split_once(',').ok_or_else(bad)?;
        let c: f64 = c.parse().map_err(|_| bad())?;
        let gamma: f64 = g.parse().map_err(|_| bad())?;
        if c > 0.0 && gamma >= 0.0 {
            Ok(EpsilonPolicy::Power { c, gamma })
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for EpsilonPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonPolicy::Constant(v) => write!(f, "const:{v}"),
            EpsilonPolicy::Power { c, gamma } => write!(f, "power:{c},{gamma}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeConfig {
    pub epsilon: f64,
    pub bump: Bump,
    /// Peaks must exceed `threshold · max(global max, reference_scale)`.
    pub threshold: f64,
    /// Floor on the peak-acceptance scale, so that a smooth input whose edge
    /// map is pure approximation error does not promote its own ripples.
    pub reference_scale: f64,
    /// Skip peaks closer than `ε` to the support endpoints 0 and 1, where a
    /// nonzero `f(0)` or `f(1⁻)` shows up as a jump of the extended function.
    pub interior_only: bool,
    pub method: EdgeMethod,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.02,
            bump: Bump::Gaussian { b: 5.0 },
            threshold: 0.3,
            reference_scale: 1.0,
            interior_only: true,
            method: EdgeMethod::Fcg { r: 25 },
        }
    }
}

impl EdgeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Domain {
                what: "peak threshold",
                value: self.threshold,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(self.reference_scale >= 0.0) {
            return Err(Error::InvalidParameter("reference scale must be non-negative".into()));
        }
        if let EdgeMethod::Fcg { r: 0 } = self.method {
            return Err(Error::InvalidParameter("fcg bandwidth must be at least 1".into()));
        }
        Ok(())
    }
}

/// `2πiλ_j ε f̂_j ĥ(λ_j ε)`; the `λ = 0` entry is exactly zero.
pub fn concentration_coeffs(
    pattern: &SamplingPattern,
    fhat: &[Complex64],
    config: &EdgeConfig,
) -> Result<Vec<Complex64>> {
    config.validate()?;
    if fhat.len() != pattern.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples for {} frequencies",
            fhat.len(),
            pattern.len()
        )));
    }
    let eps = config.epsilon;
    Ok(pattern
        .lambdas()
        .iter()
        .zip(fhat)
        .map(|(&lam, &f)| {
            if lam == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, 2.0 * PI * lam * eps * config.bump.transform(lam * eps)) * f
            }
        })
        .collect())
}

/// A prepared coefficient map: density compensation followed by `Ω`, or `Ψ†`.
#[derive(Debug, Clone)]
pub enum CoefficientMap {
    Gridding(DcfOperator),
    Frame,
}

impl CoefficientMap {
    pub fn for_method(sys: &SpectralSystem, method: EdgeMethod) -> Result<Self> {
        Ok(match method {
            EdgeMethod::Fa => CoefficientMap::Frame,
            EdgeMethod::CgTrapezoid => CoefficientMap::Gridding(dcf::trapezoid(sys.pattern())),
            EdgeMethod::Fcg { r } => {
                let r = r.min(dcf::full_bandwidth(sys.n()));
                CoefficientMap::Gridding(dcf::optimal_banded(sys, r, DcfField::Complex)?)
            }
        })
    }

    pub fn apply(&self, sys: &SpectralSystem, samples: &[Complex64]) -> Result<CoefficientVector> {
        match self {
            CoefficientMap::Gridding(d) => dcf::fcg_coeffs(sys, d, samples),
            CoefficientMap::Frame => frame::frame_coeffs(sys, samples),
        }
    }
}

/// Real edge map on `x_p = p/N` plus the RMS of the discarded imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeMap {
    pub values: Vec<f64>,
    pub imaginary_residue: f64,
}

pub fn edge_map(
    sys: &SpectralSystem,
    map: &CoefficientMap,
    config: &EdgeConfig,
    fhat: &[Complex64],
    grid_size: usize,
) -> Result<EdgeMap> {
    let conc = concentration_coeffs(sys.pattern(), fhat, config)?;
    let coeffs = map.apply(sys, &conc)?;
    let grid = frame::evaluate(&coeffs, sys.window(), grid_size)?;
    let imaginary_residue =
        (grid.iter().map(|z| z.im * z.im).sum::<f64>() / grid.len() as f64).sqrt();
    Ok(EdgeMap {
        values: grid.into_iter().map(|z| z.re).collect(),
        imaginary_residue,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub location: f64,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JumpEstimate {
    pub peaks: Vec<Peak>,
}

/// Strict local maxima of `|s|` on the grid `x_p = p/N` above the acceptance
/// level, taken greedily by size and kept at least `ε` apart.
pub fn locate_jumps(samples: &[f64], config: &EdgeConfig) -> Result<JumpEstimate> {
    config.validate()?;
    let n = samples.len();
    if n < 3 {
        return Ok(JumpEstimate::default());
    }
    let global = samples.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    let level = config.threshold * global.max(config.reference_scale);
    let x = |p: usize| p as f64 / n as f64;
    let margin = if config.interior_only { config.epsilon } else { 0.0 };
    let mut candidates: Vec<usize> = (1..n - 1)
        .filter(|&p| x(p) >= margin && x(p) <= 1.0 - margin)
        .filter(|&p| {
            let a = samples[p].abs();
            a > level && a > samples[p - 1].abs() && a > samples[p + 1].abs()
        })
        .collect();
    candidates.sort_by(|&a, &b| samples[b].abs().total_cmp(&samples[a].abs()).then(a.cmp(&b)));
    let mut accepted: Vec<usize> = Vec::new();
    for p in candidates {
        if accepted.iter().all(|&q| (x(p) - x(q)).abs() >= config.epsilon) {
            accepted.push(p);
        }
    }
    accepted.sort_unstable();
    Ok(JumpEstimate {
        peaks: accepted
            .into_iter()
            .map(|p| Peak {
                location: x(p),
                amplitude: samples[p],
            })
            .collect(),
    })
}
