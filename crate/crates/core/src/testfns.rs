//! Ground-truth functions supported in `[0, 1]`: exact evaluation, exact jump
//! lists, and Fourier data `f̂(λ) = ∫₀¹ f(x) e^{-2πiλx} dx` at arbitrary real `λ`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{exp_integral, x_exp_integral};

/// Symbolic form of one piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Constant(f64),
    /// `p + q x`
    Affine { p: f64, q: f64 },
    /// `p + q x + amp · sin(u x + phase)`
    AffineSinusoid {
        p: f64,
        q: f64,
        amp: f64,
        u: f64,
        phase: f64,
    },
    /// `scale · cos²(π(x-1/2)²) sin(10(x-1/2)²)`
    SmoothProduct { scale: f64 },
}

impl Term {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Term::Constant(c) => c,
            Term::Affine { p, q } => p + q * x,
            Term::AffineSinusoid {
                p,
                q,
                amp,
                u,
                phase,
            } => p + q * x + amp * (u * x + phase).sin(),
            Term::SmoothProduct { scale } => {
                let s = (x - 0.5) * (x - 0.5);
                let c = (PI * s).cos();
                scale * c * c * (10.0 * s).sin()
            }
        }
    }

    fn scaled(&self, by: f64) -> Term {
        match *self {
            Term::Constant(c) => Term::Constant(by * c),
            Term::Affine { p, q } => Term::Affine {
                p: by * p,
                q: by * q,
            },
            Term::AffineSinusoid {
                p,
                q,
                amp,
                u,
                phase,
            } => Term::AffineSinusoid {
                p: by * p,
                q: by * q,
                amp: by * amp,
                u,
                phase,
            },
            Term::SmoothProduct { scale } => Term::SmoothProduct { scale: by * scale },
        }
    }

    /// `∫_lo^hi term(x) e^{-2πiλx} dx`.
    fn fourier(&self, lo: f64, hi: f64, lambda: f64) -> Result<Complex64> {
        let kappa = Complex64::new(0.0, -2.0 * PI * lambda);
        Ok(match *self {
            Term::Constant(c) => c * exp_integral(kappa, lo, hi),
            Term::Affine { p, q } => {
                p * exp_integral(kappa, lo, hi) + q * x_exp_integral(kappa, lo, hi)
            }
            Term::AffineSinusoid {
                p,
                q,
                amp,
                u,
                phase,
            } => {
                let lin = p * exp_integral(kappa, lo, hi) + q * x_exp_integral(kappa, lo, hi);
                // sin θ = (e^{iθ} - e^{-iθ}) / 2i
                let up = Complex64::from_polar(1.0, phase)
                    * exp_integral(kappa + Complex64::new(0.0, u), lo, hi);
                let down = Complex64::from_polar(1.0, -phase)
                    * exp_integral(kappa - Complex64::new(0.0, u), lo, hi);
                lin + amp * (up - down) / Complex64::new(0.0, 2.0)
            }
            Term::SmoothProduct { .. } => {
                let f = |x: f64| Complex64::from_polar(self.value(x), -2.0 * PI * lambda * x);
                let panels = 8 + (lambda.abs() * (hi - lo)).ceil() as usize;
                quadrature::adaptive(&f, lo, hi, 1e-12, panels)?
            }
        })
    }
}

/// A piece `term` on the closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub term: Term,
}

/// One jump: `amplitude = f(ξ⁺) - f(ξ⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub location: f64,
    pub amplitude: f64,
}

/// Piecewise function, zero outside its pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    pieces: Vec<Piece>,
}

impl PiecewiseFunction {
    /// Pieces must lie in `[0, 1]` and not overlap; they are sorted by `lo`.
    pub fn new(mut pieces: Vec<Piece>) -> Result<Self> {
        pieces.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for p in &pieces {
            if !(0.0 <= p.lo && p.lo < p.hi && p.hi <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "piece [{}, {}] is not a proper sub-interval of [0, 1]",
                    p.lo, p.hi
                )));
            }
        }
        if pieces.windows(2).any(|w| w[1].lo < w[0].hi) {
            return Err(Error::InvalidParameter("pieces overlap".into()));
        }
        Ok(Self { pieces })
    }

    /// `cos²(π(x-1/2)²) sin(10(x-1/2)²)` on `[0, 1]`.
    pub fn smooth_example() -> Self {
        Self {
            pieces: vec![Piece {
                lo: 0.0,
                hi: 1.0,
                term: Term::SmoothProduct { scale: 1.0 },
            }],
        }
    }

    /// Four-branch function with six jumps and `f(0) = f(1) = 0`.
    pub fn jump_example() -> Self {
        Self {
            pieces: vec![
                Piece {
                    lo: 0.125,
                    hi: 0.25,
                    term: Term::Constant(1.5),
                },
                Piece {
                    lo: 0.375,
                    hi: 0.5625,
                    term: Term::AffineSinusoid {
                        p: 1.75,
                        q: -0.5,
                        amp: 1.0,
                        u: 2.0 * PI,
                        phase: -0.25,
                    },
                },
                Piece {
                    lo: 0.6875,
                    hi: 0.875,
                    term: Term::Affine { p: -5.0, q: 2.75 },
                },
            ],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// `-f`, `2f`, ...
    pub fn scaled(&self, by: f64) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    term: p.term.scaled(by),
                    ..*p
                })
                .collect(),
        }
    }

    /// Point value; at a breakpoint the right limit, except at `x = 1`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                what: "test function argument",
                value: x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok(self
            .pieces
            .iter()
            .find(|p| p.lo <= x && (x < p.hi || (x == 1.0 && p.hi == 1.0)))
            .map_or(0.0, |p| p.term.value(x)))
    }

    /// `f̂(λ)`, exact for the elementary pieces.
    pub fn fourier(&self, lambda: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.pieces {
            acc += p.term.fourier(p.lo, p.hi, lambda)?;
        }
        Ok(acc)
    }

    /// `f̂` at every frequency of a pattern.
    pub fn fourier_samples(&self, lambdas: &[f64]) -> Result<Vec<Complex64>> {
        lambdas.iter().map(|&l| self.fourier(l)).collect()
    }

    /// Interior jumps from analytic one-sided limits.
    pub fn jumps(&self) -> Vec<Jump> {
        let mut points: Vec<f64> = self.pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
        points.retain(|&x| x > 0.0 && x < 1.0);
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
            .into_iter()
            .filter_map(|x| {
                let left = self
                    .pieces
                    .iter()
                    .find(|p| p.lo < x && x <= p.hi)
                    .map_or(0.0, |p| p.term.value(x));
                let right = self
                    .pieces
                    .iter()
                    .find(|p| p.lo <= x && x < p.hi)
                    .map_or(0.0, |p| p.term.value(x));
                let amplitude = right - left;
                (amplitude.abs() > 1e-14).then_some(Jump {
                    location: x,
                    amplitude,
                })
            })
            .collect()
    }

    /// `Σ [f](ξ) h((x - ξ)/ε)`: the regularized jump field an edge map approximates.
    pub fn jump_field(&self, x: f64, bump: impl Fn(f64) -> f64, eps: f64) -> f64 {
        self.jumps()
            .iter()
            .map(|j| j.amplitude * bump((x - j.location) / eps))
            .sum()
    }
}
