//! Gauss–Legendre rules: fixed composite and adaptive panel bisection.
//!
//! Used for the smooth test function's Fourier data and, in tests, as the
//! independent oracle for every closed-form integral in the crate.

use std::ops::{Add, Mul};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values a quadrature rule can accumulate.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule.
    pub fn gl16() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate<T: Integrand>(&self, f: &impl Fn(f64) -> T, a: f64, b: f64) -> T {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * x) * *w;
        }
        acc * half
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite<T: Integrand>(
        &self,
        f: &impl Fn(f64) -> T,
        a: f64,
        b: f64,
        panels: usize,
    ) -> T {
        let h = (b - a) / panels as f64;
        let mut acc = T::zero();
        for p in 0..panels {
            let lo = a + h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            acc = acc + self.integrate(f, lo, hi);
        }
        acc
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

const MAX_DEPTH: u32 = 40;

/// Adaptive bisection with the 16-point rule per panel.
///
/// The interval is first cut into `initial_panels` pieces (pass roughly the
/// number of oscillations for oscillatory integrands). A panel is accepted once
/// the one-panel and two-half-panel estimates differ by less than its share of
/// `tol`.
pub fn adaptive<T: Integrand>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
) -> Result<T> {
    let rule = GaussLegendre::gl16();
    let total = (b - a).abs();
    if total == 0.0 {
        return Ok(T::zero());
    }
    let panels = initial_panels.max(1);
    let h = (b - a) / panels as f64;
    let mut acc = T::zero();
    let mut worst = 0.0f64;
    // explicit stack keeps the summation order fixed
    let mut stack: Vec<(f64, f64, T, u32)> = Vec::new();
    for p in (0..panels).rev() {
        let lo = a + h * p as f64;
        let hi = if p + 1 == panels { b } else { lo + h };
        stack.push((lo, hi, rule.integrate(f, lo, hi), 0));
    }
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(f, lo, mid);
        let right = rule.integrate(f, mid, hi);
        let refined = left + right;
        let err = (refined + whole * -1.0).magnitude();
        let share = tol * ((hi - lo).abs() / total).max(1e-3);
        if err <= share {
            acc = acc + refined;
        } else if depth >= MAX_DEPTH {
            worst = worst.max(err);
            acc = acc + refined;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    if worst > 0.0 {
        return Err(Error::QuadratureNotConverged { tol, err: worst });
    }
    Ok(acc)
}
