//! Numerical toolkit for two-scale difference (refinement) equations, symmetric
//! Bernoulli convolutions and the linear independence of finite wavelet systems
//! `{phi(lambda_k x - beta_k)}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: adaptive quadrature, a cyclic Jacobi Hermitian eigensolver and
//!   log-log slope fitting.
//! * [`refinement`]: the [`TwoScaleEquation`](refinement::TwoScaleEquation) type,
//!   necessary-condition checks, regularity bounds, infinite-product and cascade solvers.
//! * [`bernoulli`]: Bernoulli convolution approximants and smoothness thresholds.
//! * [`wavelet`]: finite wavelet systems, Gram matrices, numeric verdicts and the
//!   hypothesis-matching certificate engine.
//! * [`format`]: `%.17g` number formatting and CSV writers shared by the CLI.

// `!(x > 0.0)` is used on purpose so that NaN takes the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernoulli;
pub mod error;
pub mod format;
pub mod numerics;
pub mod refinement;
pub mod wavelet;

pub use error::{Error, Result};
pub use num_complex::Complex64;
