use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::certify::{certify, Certificate};
use super::gram::{gram, GramReport};
use super::system::WaveletSystem;
use crate::error::Result;

/// Relative gap at or below which a Gram matrix is reported singular.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-8;
/// Gaps at or above `INDEPENDENCE_FACTOR * threshold` are reported independent.
pub const INDEPENDENCE_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    /// A matched independence result.
    IndependentCertified { certificate: Certificate },
    /// Numerical evidence: the Gram matrix is well conditioned.
    IndependentNumeric,
    /// Numerical evidence: the Gram matrix is singular within the quadrature budget.
    Dependent { null_vector: Vec<Complex64> },
    Inconclusive,
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::IndependentCertified { .. } => "IndependentCertified",
            Outcome::IndependentNumeric => "IndependentNumeric",
            Outcome::Dependent { .. } => "Dependent",
            Outcome::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub evidence: Option<GramReport>,
}

/// Dependent when `relative_gap <= threshold` and `quad_error <= 0.1 sigma_max threshold`;
/// independent when `relative_gap >= 100 threshold`; inconclusive otherwise.
pub fn numeric_verdict(report: &GramReport, threshold: f64) -> Result<Verdict> {
    let outcome = if report.relative_gap <= threshold
        && report.quad_error <= 0.1 * report.sigma_max * threshold
    {
        Outcome::Dependent {
            null_vector: report.smallest_eigenvector()?,
        }
    } else if report.relative_gap >= INDEPENDENCE_FACTOR * threshold {
        Outcome::IndependentNumeric
    } else {
        Outcome::Inconclusive
    };
    Ok(Verdict {
        outcome,
        evidence: Some(report.clone()),
    })
}

/// Certificate engine first; the Gram matrix only when no rule matches.
pub fn analyze(system: &WaveletSystem, tol: f64) -> Result<Verdict> {
    if let Some(certificate) = certify(system) {
        return Ok(Verdict {
            outcome: Outcome::IndependentCertified { certificate },
            evidence: None,
        });
    }
    let report = gram(system, tol)?;
    numeric_verdict(&report, DEPENDENCE_THRESHOLD)
}
