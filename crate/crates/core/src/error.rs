use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical kernels and the analysis modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quadrature did not reach tolerance {tol:e} within {evaluations} evaluations (estimate {error_estimate:e})")]
    NonConvergence {
        tol: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("decay hint {hint} contradicted by sampled tail: {detail}")]
    BadHint { hint: String, detail: String },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("degenerate slope-fit window: {0}")]
    DegenerateWindow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("coefficients sum to {sum} but the dilation is {lambda}; rescale coefficients by {lambda}/sum to normalize")]
    NotNormalized { sum: Complex64, lambda: f64 },

    #[error("endpoint coefficients violate |c| < lambda (|c_0| = {c0_abs}, |c_N| = {cn_abs}, lambda = {lambda}); no nonzero compactly supported integrable solution exists")]
    EndpointCondition { c0_abs: f64, cn_abs: f64, lambda: f64 },

    #[error("regularity bound is vacuous: an endpoint coefficient has modulus >= 1, so the solution is discontinuous at that endpoint")]
    VacuousBound,

    #[error("cascade iteration diverges at iteration {iteration} (residual {residual:e})")]
    Diverging { iteration: usize, residual: f64 },

    #[error("profile spans {found} dyadic decades, at least {required} required")]
    InsufficientDecades { found: usize, required: usize },

    #[error("enumeration depth {depth} exceeds the budget of {max}")]
    BudgetExceeded { depth: u32, max: u32 },

    #[error("duplicate wavelet point at positions {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },

    #[error("inconsistent generator tags: {0}")]
    InconsistentTags(String),
}

impl Error {
    /// Stable machine-readable name of the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::BadHint { .. } => "BadHint",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::DegenerateWindow(_) => "DegenerateWindow",
            Error::InvalidInput(_) => "InvalidInput",
            Error::BadParameter(_) => "BadParameter",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::EndpointCondition { .. } => "EndpointCondition",
            Error::VacuousBound => "VacuousBound",
            Error::Diverging { .. } => "Diverging",
            Error::InsufficientDecades { .. } => "InsufficientDecades",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::DuplicatePoint { .. } => "DuplicatePoint",
            Error::InconsistentTags(_) => "InconsistentTags",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
