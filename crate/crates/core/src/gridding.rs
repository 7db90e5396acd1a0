//! Traditional convolutional gridding: weight the samples, spread them onto
//! the integer modes with the window transform, inverse FFT, divide by `w`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dcf::DcfOperator;
use crate::error::{Error, Result};
use crate::frame::{self, CoefficientVector, SpectralSystem};

/// Kernel truncation: only pairs with `|l − λ_k| ≤ q` contribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Full,
    Radius(f64),
}

impl Truncation {
    fn keeps(&self, distance: f64) -> bool {
        match *self {
            Truncation::Full => true,
            Truncation::Radius(q) => distance <= q,
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "full" {
            return Ok(Truncation::Full);
        }
        match s.trim().parse::<f64>() {
            Ok(q) if q > 0.0 => Ok(Truncation::Radius(q)),
            _ => Err(Error::InvalidParameter(format!(
                "truncation `{s}` must be `full` or a positive real"
            ))),
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::Full => write!(f, "full"),
            Truncation::Radius(q) => write!(f, "{q}"),
        }
    }
}

/// Spectral filter `σ(|l|/m)` applied to the gridded coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Filter {
    None,
    /// `σ(η) = exp(−strength · η^order)`
    Exponential { order: u32, strength: f64 },
}

impl Filter {
    pub fn sigma(&self, eta: f64) -> f64 {
        match *self {
            Filter::None => 1.0,
            Filter::Exponential { order, strength } => (-strength * eta.powi(order as i32)).exp(),
        }
    }

    pub fn apply(&self, coeffs: &mut CoefficientVector) {
        if *self == Filter::None {
            return;
        }
        let m = coeffs.m();
        for (i, c) in coeffs.values_mut().iter_mut().enumerate() {
            let eta = crate::centered(i, m).unsigned_abs() as f64 / m as f64;
            *c *= self.sigma(eta);
        }
    }
}

impl FromStr for Filter {
    type Err = Error;

    /// `none` or `exp:p=<int>,c=<real>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "none" {
            return Ok(Filter::None);
        }
        let bad = || Error::InvalidParameter(format!("bad filter `{s}` (none | exp:p=<int>,c=<real>)"));
        let rest = s.strip_prefix("exp:").ok_or_else(bad)?;
        let (mut order, mut strength) = (None, None);
        for kv in rest.split(',') {
            match kv.split_once('=') {
                Some(("p", v)) => order = v.parse::<u32>().ok(),
                Some(("c", v)) => strength = v.parse::<f64>().ok(),
                _ => return Err(bad()),
            }
        }
        match (order, strength) {
            (Some(order), Some(strength)) if order > 0 && strength >= 0.0 => {
                Ok(Filter::Exponential { order, strength })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Filter::None => write!(f, "none"),
            Filter::Exponential { order, strength } => write!(f, "exp:p={order},c={strength}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GriddingConfig {
    pub truncation: Truncation,
    pub filter: Filter,
    pub grid_size: usize,
}

impl GriddingConfig {
    pub fn new(grid_size: usize) -> Self {
        Self {
            truncation: Truncation::Full,
            filter: Filter::None,
            grid_size,
        }
    }
}

/// `ĝ(l) = Σ_{|l−λ_k| ≤ q} α_k f̂(λ_k) ŵ(l − λ_k)` for `|l| ≤ m`.
pub fn regrid(
    sys: &SpectralSystem,
    d: &DcfOperator,
    fhat: &[Complex64],
    truncation: Truncation,
) -> Result<CoefficientVector> {
    if !d.is_diagonal() {
        return Err(Error::InvalidParameter(
            "gridding takes diagonal density compensation".into(),
        ));
    }
    if d.size() != fhat.len() || fhat.len() != sys.pattern().len() {
        return Err(Error::DimensionMismatch(format!(
            "{} samples, {} weights, {} frequencies",
            fhat.len(),
            d.size(),
            sys.pattern().len()
        )));
    }
    let weighted = d.apply(fhat)?;
    let lambdas = sys.pattern().lambdas();
    let omega = sys.omega();
    let m = sys.m();
    let values = (0..2 * m + 1)
        .map(|li| {
            let l = crate::centered(li, m) as f64;
            omega
                .row(li)
                .iter()
                .zip(&weighted)
                .zip(lambdas)
                .fold(Complex64::new(0.0, 0.0), |acc, ((&w, &x), &lam)| {
                    if truncation.keeps((l - lam).abs()) {
                        acc + w * x
                    } else {
                        acc
                    }
                })
        })
        .collect();
    CoefficientVector::new(values)
}

/// Regrid, filter, inverse FFT onto `x_p = p/N`, divide by the window.
pub fn reconstruct_cg(
    sys: &SpectralSystem,
    config: &GriddingConfig,
    d: &DcfOperator,
    fhat: &[Complex64],
) -> Result<Vec<Complex64>> {
    let mut coeffs = regrid(sys, d, fhat, config.truncation)?;
    config.filter.apply(&mut coeffs);
    frame::evaluate(&coeffs, sys.window(), config.grid_size)
}
