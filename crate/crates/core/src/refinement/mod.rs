//! Two-scale difference equations `phi(x) = sum_k c_k phi(lambda x - beta_k)`:
//! representation, necessary-condition checks, regularity bounds and
//! solvers in the Fourier and time domains.

mod cascade;
mod equation;
mod fourier;
mod validate;

pub use cascade::{
    cascade_solve, CascadeInit, CascadeResult, SampledFunction, DIVERGENCE_FACTOR,
    DIVERGENCE_WINDOW,
};
pub use equation::{preset, Interval, Preset, Term, TwoScaleEquation};
pub use fourier::{
    estimate_regularity, fourier_point, mask_lipschitz, solve_fourier, uniform_grid,
    FourierProfile, ProductPoint, RegularityEstimate, NORMALIZATION_TOL, SUPERPOLYNOMIAL_SLOPE,
};
pub use validate::{
    regularity_upper_bound, two_term_hoelder_cap, validate_equation, RegularityBound,
    TwoTermClass, ValidationReport,
};
