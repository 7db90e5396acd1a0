//! Gridding windows `w` on `[0, 1]` and the three integral families built on them:
//!
//! * `ŵ(ξ) = ∫₀¹ w(x) e^{-2πiξx} dx` (the gridding kernel),
//! * `∫₀¹ e^{iβx} / w(x) dx` (entries of the frame matrix),
//! * `∫₀¹ e^{iβx} / w(x)² dx` (Gram matrix of the expansion basis `e^{2πilx}/w`).
//!
//! The built-in windows are all of the form `e^{p|x-1/2|}`, so every integral
//! splits at `x = 1/2` into two elementary exponential integrals.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::phi1;

/// A window bounded away from zero on `[0, 1]`.
///
/// Only [`Window::eval`] and [`Window::bounds`] are required; the integrals
/// default to adaptive Gauss–Legendre quadrature so windows without closed
/// forms (Gaussian, Kaiser–Bessel) can be plugged in.
pub trait Window {
    fn eval(&self, x: f64) -> Result<f64>;

    /// Essential bounds `(α_L, α_U)` with `0 < α_L ≤ w ≤ α_U`.
    fn bounds(&self) -> (f64, f64);

    fn transform(&self, xi: f64) -> Result<Complex64> {
        let f = |x: f64| {
            let w = self.eval(x).unwrap_or(f64::NAN);
            Complex64::from_polar(w, -2.0 * PI * xi * x)
        };
        quadrature::adaptive(&f, 0.0, 1.0, 1e-12, panels_for(2.0 * PI * xi))
    }

    fn recip_moment(&self, beta: f64) -> Result<Complex64> {
        let f = |x: f64| {
            let w = self.eval(x).unwrap_or(f64::NAN);
            Complex64::from_polar(1.0 / w, beta * x)
        };
        quadrature::adaptive(&f, 0.0, 1.0, 1e-12, panels_for(beta))
    }

    fn recip_second_moment(&self, beta: f64) -> Result<Complex64> {
        let f = |x: f64| {
            let w = self.eval(x).unwrap_or(f64::NAN);
            Complex64::from_polar(1.0 / (w * w), beta * x)
        };
        quadrature::adaptive(&f, 0.0, 1.0, 1e-12, panels_for(beta))
    }
}

fn panels_for(omega: f64) -> usize {
    4 + (omega.abs() / (2.0 * PI)).ceil() as usize
}

/// Built-in windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowSpec {
    /// `w(x) = e^{-a|x - 1/2|}`.
    Exponential { a: f64 },
    /// `w ≡ 1`; reduces every method to the classical Fourier partial sum.
    Constant,
}

impl WindowSpec {
    pub fn exponential(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "exponential window needs a > 0, got {a}"
            )));
        }
        Ok(WindowSpec::Exponential { a })
    }

    /// Exponent `p` in `w = e^{p|x-1/2|}`.
    fn exponent(&self) -> f64 {
        match *self {
            WindowSpec::Exponential { a } => -a,
            WindowSpec::Constant => 0.0,
        }
    }

    pub fn alpha_lower(&self) -> f64 {
        match *self {
            WindowSpec::Exponential { a } => (-0.5 * a).exp(),
            WindowSpec::Constant => 1.0,
        }
    }

    pub fn alpha_upper(&self) -> f64 {
        1.0
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                what: "window argument",
                value: x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        Ok((self.exponent() * (x - 0.5).abs()).exp())
    }

    /// `ŵ(ξ) = ∫₀¹ w(x) e^{-2πiξx} dx`.
    pub fn transform(&self, xi: f64) -> Complex64 {
        split_exponential(self.exponent(), -2.0 * PI * xi)
    }

    /// `∫₀¹ e^{iβx} / w(x) dx`.
    pub fn recip_moment(&self, beta: f64) -> Complex64 {
        split_exponential(-self.exponent(), beta)
    }

    /// `∫₀¹ e^{iβx} / w(x)² dx`.
    pub fn recip_second_moment(&self, beta: f64) -> Complex64 {
        split_exponential(-2.0 * self.exponent(), beta)
    }
}

impl Window for WindowSpec {
    fn eval(&self, x: f64) -> Result<f64> {
        WindowSpec::eval(self, x)
    }
    fn bounds(&self) -> (f64, f64) {
        (self.alpha_lower(), self.alpha_upper())
    }
    fn transform(&self, xi: f64) -> Result<Complex64> {
        Ok(WindowSpec::transform(self, xi))
    }
    fn recip_moment(&self, beta: f64) -> Result<Complex64> {
        Ok(WindowSpec::recip_moment(self, beta))
    }
    fn recip_second_moment(&self, beta: f64) -> Result<Complex64> {
        Ok(WindowSpec::recip_second_moment(self, beta))
    }
}

/// `∫₀¹ e^{p|x-1/2|} e^{iβx} dx = e^{iβ/2} [F(p+iβ) + F(p-iβ)]`,
/// `F(z) = ∫₀^{1/2} e^{zu} du`.
fn split_exponential(p: f64, beta: f64) -> Complex64 {
    let half = |z: Complex64| 0.5 * phi1(0.5 * z);
    let plus = half(Complex64::new(p, beta));
    let minus = half(Complex64::new(p, -beta));
    Complex64::from_polar(1.0, 0.5 * beta) * (plus + minus)
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Exponential { a } => write!(f, "exp:a={a:e}"),
            WindowSpec::Constant => write!(f, "const"),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    /// `exp:a=<real>` or `const`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "const" || s == "constant" {
            return Ok(WindowSpec::Constant);
        }
        if let Some(rest) = s.strip_prefix("exp:") {
            let a = rest
                .strip_prefix("a=")
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidParameter(format!("bad window `{s}`")))?;
            return WindowSpec::exponential(a);
        }
        Err(Error::InvalidParameter(format!(
            "unknown window `{s}` (expected exp:a=<real> or const)"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use approx::assert_abs_diff_eq;

    const A: f64 = 5e-5;

    fn quad(f: impl Fn(f64) -> Complex64) -> Complex64 {
        // 64 panels of 16 points, split so x = 1/2 is a panel edge
        let rule = GaussLegendre::gl16();
        rule.composite(&f, 0.0, 0.5, 32) + rule.composite(&f, 0.5, 1.0, 32)
    }

    #[test]
    fn eval_values() {
        let w = WindowSpec::exponential(3.0).unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 1.0);
        let w = WindowSpec::exponential(A).unwrap();
        assert_abs_diff_eq!(w.eval(0.0).unwrap(), (-2.5e-5f64).exp(), epsilon = 1e-16);
        assert_abs_diff_eq!(w.eval(0.0).unwrap(), 0.999975, epsilon = 1e-9);
        assert_eq!(WindowSpec::Constant.eval(0.3).unwrap(), 1.0);
        assert!(w.eval(1.5).is_err());
        assert!(w.eval(-0.01).is_err());
    }

    #[test]
    fn bounds() {
        let w = WindowSpec::exponential(2.0).unwrap();
        assert_abs_diff_eq!(w.alpha_lower(), (-1.0f64).exp());
        assert_eq!(w.alpha_upper(), 1.0);
        assert!(WindowSpec::exponential(0.0).is_err());
        for i in 0..=100 {
            let v = w.eval(i as f64 / 100.0).unwrap();
            assert!(v >= w.alpha_lower() - 1e-15 && v <= w.alpha_upper());
        }
    }

    #[test]
    fn transform_at_zero() {
        let w = WindowSpec::exponential(A).unwrap();
        let expected = -2.0 * (-A / 2.0).exp_m1() / A;
        assert_abs_diff_eq!(w.transform(0.0).re, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(w.transform(0.0).re, 0.9999875, epsilon = 1e-9);
        assert_abs_diff_eq!(w.transform(0.0).im, 0.0, epsilon = 1e-18);
        let q = quad(|x| Complex64::new(w.eval(x).unwrap(), 0.0));
        assert_abs_diff_eq!(w.transform(0.0).re, q.re, epsilon = 1e-13);
    }

    #[test]
    fn constant_window_is_orthonormal() {
        let c = WindowSpec::Constant;
        assert_abs_diff_eq!(c.transform(0.0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.recip_moment(0.0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.recip_second_moment(0.0).re, 1.0, epsilon = 1e-15);
        for k in [-7i32, -1, 1, 2, 13] {
            assert!(c.transform(k as f64).norm() < 1e-14);
            assert!(c.recip_moment(2.0 * PI * k as f64).norm() < 1e-14);
        }
    }

    #[test]
    fn recip_moments_at_zero() {
        let w = WindowSpec::exponential(A).unwrap();
        assert_abs_diff_eq!(
            w.recip_moment(0.0).re,
            2.0 * (A / 2.0).exp_m1() / A,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(w.recip_moment(0.0).re, 1.0000125, epsilon = 1e-9);
        for a in [A, 0.7, 3.0] {
            let w = WindowSpec::exponential(a).unwrap();
            let expected = a.exp_m1() / a;
            assert_abs_diff_eq!(w.recip_second_moment(0.0).re, expected, epsilon = 1e-13);
            let q = quad(|x| Complex64::new(1.0 / w.eval(x).unwrap().powi(2), 0.0));
            assert_abs_diff_eq!(q.re, expected, epsilon = 1e-13);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let w = WindowSpec::exponential(1.3).unwrap();
        for i in 0..50 {
            let t = -25.0 + i as f64 * 1.037;
            assert_abs_diff_eq!((w.transform(-t) - w.transform(t).conj()).norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(
                (w.recip_moment(-t) - w.recip_moment(t).conj()).norm(),
                0.0,
                epsilon = 1e-15
            );
            assert_abs_diff_eq!(
                (w.recip_second_moment(-t) - w.recip_second_moment(t).conj()).norm(),
                0.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn closed_forms_match_quadrature_on_grid() {
        for w in [
            WindowSpec::exponential(A).unwrap(),
            WindowSpec::exponential(2.0).unwrap(),
            WindowSpec::Constant,
        ] {
            for i in 0..100 {
                let beta = -100.0 + 200.0 * i as f64 / 99.0;
                let t = w.transform(beta);
                let qt = quad(|x| Complex64::from_polar(w.eval(x).unwrap(), -2.0 * PI * beta * x));
                assert!((t - qt).norm() < 1e-12, "{w} transform at {beta}");
                let r = w.recip_moment(beta);
                let qr = quad(|x| Complex64::from_polar(1.0 / w.eval(x).unwrap(), beta * x));
                assert!((r - qr).norm() < 1e-12, "{w} recip at {beta}");
            }
        }
    }

    #[test]
    fn guard_branches_agree_near_crossover() {
        // |p ± iβ|/2 crosses 1e-6 near β = 2e-6 for the constant window
        let c = WindowSpec::Constant;
        for beta in [1.9e-6, 1.99e-6, 2.01e-6, 2.1e-6] {
            let exact = Complex64::new(0.0, beta).exp_m1_ref() / Complex64::new(0.0, beta);
            assert!((c.recip_moment(beta) - exact).norm() < 1e-12);
        }
    }

    trait ExpM1 {
        fn exp_m1_ref(self) -> Complex64;
    }
    impl ExpM1 for Complex64 {
        fn exp_m1_ref(self) -> Complex64 {
            // series to many terms; independent of the crate's expm1
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for k in 1..30 {
                term = term * self / k as f64;
                sum += term;
            }
            sum
        }
    }

    #[test]
    fn transform_peaks_at_zero() {
        let w = WindowSpec::exponential(A).unwrap();
        let peak = w.transform(0.0).norm();
        for i in 1..400 {
            assert!(w.transform(i as f64 * 0.173).norm() <= peak);
        }
    }

    #[test]
    fn trait_fallback_agrees_with_closed_form() {
        struct Plain(WindowSpec);
        impl Window for Plain {
            fn eval(&self, x: f64) -> Result<f64> {
                self.0.eval(x)
            }
            fn bounds(&self) -> (f64, f64) {
                (self.0.alpha_lower(), self.0.alpha_upper())
            }
        }
        let w = WindowSpec::exponential(0.8).unwrap();
        let p = Plain(w);
        for xi in [-12.3, -0.4, 0.0, 3.3, 40.0] {
            assert!((Window::transform(&p, xi).unwrap() - w.transform(xi)).norm() < 1e-11);
            assert!((p.recip_moment(xi).unwrap() - w.recip_moment(xi)).norm() < 1e-11);
            assert!(
                (p.recip_second_moment(xi).unwrap() - w.recip_second_moment(xi)).norm() < 1e-11
            );
        }
    }

    #[test]
    fn parse_and_display() {
        let w: WindowSpec = "exp:a=5e-5".parse().unwrap();
        assert_eq!(w, WindowSpec::Exponential { a: 5e-5 });
        assert_eq!(w.to_string().parse::<WindowSpec>().unwrap(), w);
        assert_eq!("const".parse::<WindowSpec>().unwrap(), WindowSpec::Constant);
        assert!("gauss".parse::<WindowSpec>().is_err());
        assert!("exp:a=-1".parse::<WindowSpec>().is_err());
    }
}
