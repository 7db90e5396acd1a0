//! Cancellation-free building blocks for exponential integrals.

use num_complex::Complex64;

/// `e^z - 1` without cancellation for small `|z|`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    let half_sin = (0.5 * y).sin();
    let re = x.exp_m1() * y.cos() - 2.0 * half_sin * half_sin;
    let im = x.exp() * y.sin();
    Complex64::new(re, im)
}

/// `∫_0^1 e^{zs} ds = (e^z - 1)/z`.
pub(crate) fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        // Taylor: sum z^k/(k+1)!, six terms
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..6 {
            term = term * z / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        expm1(z) / z
    }
}

/// `∫_0^1 s e^{zs} ds = (z e^z - (e^z - 1))/z^2`.
pub(crate) fn phi2(z: Complex64) -> Complex64 {
    if z.norm() < 1.0 {
        // sum z^k / (k! (k+2))
        let mut fact = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.5, 0.0);
        for k in 1..40 {
            fact = fact * z / k as f64;
            let term = fact / (k as f64 + 2.0);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        let em1 = expm1(z);
        (z * (em1 + 1.0) - em1) / (z * z)
    }
}

/// `∫_lo^hi e^{κx} dx`.
pub(crate) fn exp_integral(kappa: Complex64, lo: f64, hi: f64) -> Complex64 {
    let len = hi - lo;
    (kappa * lo).exp() * len * phi1(kappa * len)
}

/// `∫_lo^hi x e^{κx} dx`.
pub(crate) fn x_exp_integral(kappa: Complex64, lo: f64, hi: f64) -> Complex64 {
    let len = hi - lo;
    let z = kappa * len;
    (kappa * lo).exp() * (lo * len * phi1(z) + len * len * phi2(z))
}
