use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::equation::TwoScaleEquation;
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;
const EXACT_TOL: f64 = 1e-12;

/// Classification of two-term equations `c_0 phi(lambda x - beta_0) + c_1 phi(lambda x - beta_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum TwoTermClass {
    /// `lambda > 2`: a compactly supported solution cannot be bounded.
    UnboundedOnly,
    /// `lambda = 2`: a bounded solution forces `c_0 = c_1 = 1`.
    BoundedForcesUnitCoeffs { unit_coefficients: bool },
    /// `1 < lambda < 2`: Hoelder exponent at most `1/log2(lambda) - 1`.
    HoelderCapped { cap: f64 },
}

/// Necessary-condition report for a two-scale equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub lemma_endpoint_pass: bool,
    pub coefficient_sum: Complex64,
    pub normalized: bool,
    pub two_term_class: Option<TwoTermClass>,
    pub messages: Vec<String>,
}

/// Checks the endpoint condition `|c_0|, |c_N| < lambda`, normalization and,
/// for two-term equations, the boundedness/Hoelder classification.
pub fn validate_equation(eq: &TwoScaleEquation) -> ValidationReport {
    let lambda = eq.lambda();
    let c0 = eq.first().c.norm();
    let cn = eq.last().c.norm();
    let sum = eq.coefficient_sum();
    let mut messages = Vec::new();

    let c0_ok = c0 < lambda;
    let cn_ok = cn < lambda;
    if !c0_ok {
        messages.push(format!(
            "endpoint lemma: |c_0| = {c0} is not below lambda = {lambda}, so no nonzero compactly supported L1 solution exists"
        ));
    }
    if !cn_ok {
        messages.push(format!(
            "endpoint lemma: |c_N| = {cn} is not below lambda = {lambda}, so no nonzero compactly supported L1 solution exists"
        ));
    }

    let normalized = (sum - lambda).norm() <= NORMALIZATION_TOL;
    if !normalized {
        messages.push(format!(
            "coefficient sum {sum} differs from lambda = {lambda}; the Fourier product needs sum c_k = lambda (rescale by {lambda}/sum)"
        ));
    }

    if eq.terms().len() == 1 {
        messages.push(
            "single-term equation phi(x) = c_0 phi(lambda x - beta_0): only the zero function is a compactly supported L1 solution".into(),
        );
    }
    if c0 >= 1.0 || cn >= 1.0 {
        messages.push(
            "an endpoint coefficient has modulus >= 1: any compactly supported solution is discontinuous at that endpoint".into(),
        );
    }

    let two_term_class = (eq.terms().len() == 2).then(|| {
        messages.push(
            "two-term equation: classified under the reading that the N = 2 case means two terms c_0, c_1 (the source statement indexes k = 0..N)".into(),
        );
        if (lambda - 2.0).abs() <= EXACT_TOL {
            let one = Complex64::new(1.0, 0.0);
            let unit = eq.terms().iter().all(|t| (t.c - one).norm() <= EXACT_TOL);
            TwoTermClass::BoundedForcesUnitCoeffs {
                unit_coefficients: unit,
            }
        } else if lambda > 2.0 {
            TwoTermClass::UnboundedOnly
        } else {
            TwoTermClass::HoelderCapped {
                cap: two_term_hoelder_cap(lambda),
            }
        }
    });

    ValidationReport {
        lemma_endpoint_pass: c0_ok && cn_ok,
        coefficient_sum: sum,
        normalized,
        two_term_class,
        messages,
    }
}

/// `1/log2(lambda) - 1`.
pub fn two_term_hoelder_cap(lambda: f64) -> f64 {
    1.0 / lambda.log2() - 1.0
}

/// Upper bound `min(-ln|c_0|, -ln|c_N|) / ln(lambda)` on the Hoelder exponent
/// of a compactly supported solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityBound {
    pub mu_upper: f64,
    pub log_lambda: f64,
    pub endpoint_logs: (f64, f64),
    /// Set when `|c_0| >= 1` or `|c_N| >= 1`; `mu_upper` is then clamped to 0.
    pub discontinuous: bool,
}

impl RegularityBound {
    /// The bound as a continuity-implying statement; fails when the
    /// solution is forced to be discontinuous.
    pub fn require_continuous(&self) -> Result<f64> {
        if self.discontinuous {
            Err(Error::VacuousBound)
        } else {
            Ok(self.mu_upper)
        }
    }
}

pub fn regularity_upper_bound(eq: &TwoScaleEquation) -> Result<RegularityBound> {
    let lambda = eq.lambda();
    let c0 = eq.first().c.norm();
    let cn = eq.last().c.norm();
    if !(c0 < lambda && cn < lambda) {
        return Err(Error::EndpointCondition {
            c0_abs: c0,
            cn_abs: cn,
            lambda,
        });
    }
    let endpoint_logs = (-c0.ln(), -cn.ln());
    let log_lambda = lambda.ln();
    let m = endpoint_logs.0.min(endpoint_logs.1);
    let discontinuous = m <= 0.0;
    Ok(RegularityBound {
        mu_upper: if discontinuous { 0.0 } else { m / log_lambda },
        log_lambda,
        endpoint_logs,
        discontinuous,
    })
}
