//! Reconstruction of compactly supported functions, and detection of their
//! jump discontinuities, from finitely many non-uniform Fourier samples.
//!
//! Three reconstruction routes share one set of matrices ([`frame::SpectralSystem`]):
//!
//! * traditional convolutional gridding with quadrature density compensation
//!   ([`gridding`], [`dcf::trapezoid`]),
//! * the finite frame approximation through a pseudo-inverse ([`frame::frame_coeffs`]),
//! * frame-theoretic gridding, where the density compensation operator is the
//!   least-squares optimal diagonal or banded matrix ([`dcf::optimal_banded`]).
//!
//! [`edge`] pushes concentration coefficients through the same pipelines to
//! recover jump locations and amplitudes.

pub mod dcf;
pub mod edge;
pub mod error;
pub mod frame;
pub mod gridding;
pub mod linalg;
pub mod quadrature;
pub mod sampling;
mod special;
pub mod testfns;
pub mod window;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Index range `-half..=half` mapped to vector positions `0..2*half+1`.
#[inline]
pub(crate) fn centered(idx: usize, half: usize) -> i64 {
    idx as i64 - half as i64
}
