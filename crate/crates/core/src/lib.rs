//! Numerical laboratory for the fourth power moment of the Riemann zeta-function
//! on the critical line, its error term E2(T), modified Mellin transforms of
//! |zeta(1/2+ix)|^(2k), and exponential sums over Maass-form spectral data.
//!
//! The crate is organized in five layers:
//!
//! * [`numerics`] — complex log-gamma, the functional-equation factor chi(s),
//!   the Riemann–Siegel theta function, smooth bump functions, and the
//!   gamma-factor products shared by the spectral sums.
//! * [`zeta`] — Hardy's Z(t) and its derivatives, an Euler–Maclaurin zeta
//!   evaluator used as the accuracy reference, and a file-backed sample cache.
//! * [`moments`] — the fourth moment integral, the degree-4 log-polynomial main
//!   term, the error term E2(T) and its running statistics.
//! * [`mellin`] — the modified Mellin transform calculus (inversion,
//!   convolution, Parseval) on truncated transforms, and the transforms
//!   Z_k(s) of |zeta|^(2k) together with the analytic continuation of Z_2.
//! * [`spectral`] — Maass-form data ingestion, windowed and exponentially
//!   weighted Hecke-series sums, and the saddle-point diagnostics.
//!
//! Everything works in fixed f64 precision; every truncated quantity carries an
//! explicit error estimate, heuristic tail models are labeled as such.

// Guards are written as `!(x > 0.0)` on purpose: the negation rejects NaN,
// which the suggested direct comparison would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mellin;
pub mod moments;
pub mod numerics;
pub mod quad;
pub mod spectral;
pub mod zeta;

pub use error::{Error, Result};

/// Complex point s = sigma + i t used throughout.
pub type Complex = num_complex::Complex64;
