//! Self-contained numerical kernels. Every kernel runs sequentially with a
//! fixed evaluation and summation order, so identical inputs give
//! bit-identical outputs.

mod eigen;
mod quadrature;
mod slope;

pub use eigen::{hermitian_eigen, CMatrix, HermitianSpectrum, HERMITIAN_REJECT};
pub use quadrature::{
    integrate_adaptive, integrate_adaptive_with, integrate_real_line, integrate_real_line_with,
    DecayHint, QuadConfig, QuadratureResult, RealLineConfig, DEFAULT_MAX_EVALUATIONS,
};
pub use slope::{loglog_slope, SlopeFit, MIN_WINDOW};
