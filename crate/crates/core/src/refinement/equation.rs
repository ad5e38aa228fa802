use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `c * phi(lambda x - beta)` of a two-scale equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: Complex64,
    pub beta: f64,
}

impl Term {
    pub fn real(c: f64, beta: f64) -> Self {
        Self {
            c: Complex64::new(c, 0.0),
            beta,
        }
    }
}

/// `phi(x) = sum_k c_k phi(lambda x - beta_k)` with `lambda > 1`.
///
/// Terms are kept sorted by strictly increasing offset; duplicate offsets are
/// merged by summing their coefficients and zero coefficients at either end
/// are dropped, so the first and last coefficients are always nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEquation", into = "RawEquation")]
pub struct TwoScaleEquation {
    lambda: f64,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct RawEquation {
    lambda: f64,
    terms: Vec<Term>,
}

impl TryFrom<RawEquation> for TwoScaleEquation {
    type Error = Error;
    fn try_from(raw: RawEquation) -> Result<Self> {
        TwoScaleEquation::new(raw.lambda, raw.terms)
    }
}

impl From<TwoScaleEquation> for RawEquation {
    fn from(eq: TwoScaleEquation) -> Self {
        RawEquation {
            lambda: eq.lambda,
            terms: eq.terms,
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

impl TwoScaleEquation {
    pub fn new(lambda: f64, terms: impl IntoIterator<Item = Term>) -> Result<Self> {
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "dilation must be a finite real > 1, got {lambda}"
            )));
        }
        let mut terms: Vec<Term> = terms.into_iter().collect();
        for t in &terms {
            if !(t.beta.is_finite() && t.c.re.is_finite() && t.c.im.is_finite()) {
                return Err(Error::InvalidInput("non-finite term".into()));
            }
        }
        terms.sort_by(|a, b| a.beta.total_cmp(&b.beta));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.beta == t.beta => last.c += t.c,
                _ => merged.push(t),
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        while merged.last().is_some_and(|t| t.c == zero) {
            merged.pop();
        }
        let first = merged.iter().position(|t| t.c != zero);
        let Some(first) = first else {
            return Err(Error::InvalidInput(
                "equation needs at least one nonzero coefficient".into(),
            ));
        };
        merged.drain(..first);
        Ok(Self {
            lambda,
            terms: merged,
        })
    }

    /// Convenience constructor for real coefficients given as `(c, beta)` pairs.
    pub fn from_real(lambda: f64, terms: &[(f64, f64)]) -> Result<Self> {
        Self::new(lambda, terms.iter().map(|&(c, b)| Term::real(c, b)))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn first(&self) -> Term {
        self.terms[0]
    }

    pub fn last(&self) -> Term {
        *self.terms.last().expect("nonempty by construction")
    }

    pub fn coefficient_sum(&self) -> Complex64 {
        self.terms.iter().map(|t| t.c).sum()
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.c.im == 0.0)
    }

    /// `|sum c_k - lambda| <= tol`.
    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.coefficient_sum() - self.lambda).norm() <= tol
    }

    /// `[beta_0 / (lambda - 1), beta_N / (lambda - 1)]`, the support of any
    /// compactly supported solution.
    pub fn normalized_support(&self) -> Interval {
        let d = self.lambda - 1.0;
        Interval {
            lo: self.first().beta / d,
            hi: self.last().beta / d,
        }
    }

    /// Mask `m(gamma) = (1/lambda) sum_k c_k exp(-2 pi i beta_k gamma)`.
    pub fn mask(&self, gamma: f64) -> Complex64 {
        let s: Complex64 = self
            .terms
            .iter()
            .map(|t| t.c * Complex64::from_polar(1.0, -2.0 * PI * t.beta * gamma))
            .sum();
        s / self.lambda
    }

    /// Same equation with every offset moved to `beta_k + (lambda - 1) shift`,
    /// whose solution is the original one translated by `shift`.
    pub fn translated(&self, shift: f64) -> Self {
        let d = (self.lambda - 1.0) * shift;
        Self {
            lambda: self.lambda,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    c: t.c,
                    beta: t.beta + d,
                })
                .collect(),
        }
    }

    /// Refinement relation written as a wavelet point set: `(1, 0)` followed
    /// by `(lambda, beta_k)` for every term.
    pub fn refinement_points(&self) -> Vec<(f64, f64)> {
        std::iter::once((1.0, 0.0))
            .chain(self.terms.iter().map(|t| (self.lambda, t.beta)))
            .collect()
    }
}

/// Named equations with exactly known coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `phi(3x) + (phi(3x-1) + phi(3x+1))/3 + 2(phi(3x-2) + phi(3x+2))/3`.
    Rham,
    /// Piecewise-linear hat on `[0, 2]`.
    Hat,
    /// `(lambda/2)(phi(lambda x - 1) + phi(lambda x + 1))`.
    Bernoulli(f64),
}

impl std::str::FromStr for Preset {
    type Err = Error;

    /// Accepts `rham`, `hat`, `bernoulli:<lambda>` and `bernoulli(<lambda>)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "rham" => return Ok(Preset::Rham),
            "hat" => return Ok(Preset::Hat),
            _ => {}
        }
        let arg = s
            .strip_prefix("bernoulli:")
            .or_else(|| s.strip_prefix("bernoulli(").and_then(|r| r.strip_suffix(')')));
        match arg.map(|a| a.trim().parse::<f64>()) {
            Some(Ok(lambda)) => Ok(Preset::Bernoulli(lambda)),
            _ => Err(Error::BadParameter(format!(
                "unknown preset {s:?}; expected rham, hat or bernoulli:<lambda>"
            ))),
        }
    }
}

pub fn preset(name: Preset) -> Result<TwoScaleEquation> {
    match name {
        Preset::Rham => TwoScaleEquation::from_real(
            3.0,
            &[
                (2.0 / 3.0, -2.0),
                (1.0 / 3.0, -1.0),
                (1.0, 0.0),
                (1.0 / 3.0, 1.0),
                (2.0 / 3.0, 2.0),
            ],
        ),
        Preset::Hat => TwoScaleEquation::from_real(2.0, &[(0.5, 0.0), (1.0, 1.0), (0.5, 2.0)]),
        Preset::Bernoulli(lambda) => {
            if !(lambda > 1.0 && lambda.is_finite()) {
                return Err(Error::BadParameter(format!(
                    "bernoulli preset needs lambda > 1, got {lambda}"
                )));
            }
            TwoScaleEquation::from_real(lambda, &[(lambda / 2.0, -1.0), (lambda / 2.0, 1.0)])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_sorts() {
        let eq = TwoScaleEquation::from_real(2.0, &[(0.5, 2.0), (0.25, 0.0), (1.0, 1.0), (0.25, 0.0)])
            .unwrap();
        let betas: Vec<f64> = eq.terms().iter().map(|t| t.beta).collect();
        assert_eq!(betas, vec![0.0, 1.0, 2.0]);
        assert_eq!(eq.first().c.re, 0.5);
    }

    #[test]
    fn trims_zero_endpoints() {
        let eq = TwoScaleEquation::from_real(2.0, &[(0.0, -1.0), (1.0, 0.0), (1.0, 1.0), (0.0, 5.0)])
            .unwrap();
        assert_eq!(eq.terms().len(), 2);
        assert_eq!(eq.normalized_support(), Interval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn rejects_bad_input() {
        assert!(TwoScaleEquation::from_real(1.0, &[(1.0, 0.0)]).is_err());
        assert!(TwoScaleEquation::from_real(2.0, &[]).is_err());
        assert!(TwoScaleEquation::from_real(2.0, &[(0.0, 0.0)]).is_err());
        assert!(TwoScaleEquation::from_real(f64::NAN, &[(1.0, 0.0)]).is_err());
    }

    #[test]
    fn presets() {
        let rham = preset(Preset::Rham).unwrap();
        assert_eq!(rham.lambda(), 3.0);
        let cs: Vec<f64> = rham.terms().iter().map(|t| t.c.re).collect();
        assert_eq!(cs, vec![2.0 / 3.0, 1.0 / 3.0, 1.0, 1.0 / 3.0, 2.0 / 3.0]);
        let b = preset(Preset::Bernoulli(2.0)).unwrap();
        assert_eq!(b.terms(), &[Term::real(1.0, -1.0), Term::real(1.0, 1.0)]);
        assert!(matches!(preset(Preset::Bernoulli(0.9)), Err(Error::BadParameter(_))));
    }

    #[test]
    fn preset_names_parse() {
        assert_eq!("rham".parse::<Preset>().unwrap(), Preset::Rham);
        assert_eq!("bernoulli:2.5".parse::<Preset>().unwrap(), Preset::Bernoulli(2.5));
        assert_eq!("bernoulli(2)".parse::<Preset>().unwrap(), Preset::Bernoulli(2.0));
        assert!("cantor".parse::<Preset>().is_err());
    }

    #[test]
    fn supports() {
        assert_eq!(preset(Preset::Hat).unwrap().normalized_support(), Interval { lo: 0.0, hi: 2.0 });
        assert_eq!(
            preset(Preset::Bernoulli(2.0)).unwrap().normalized_support(),
            Interval { lo: -1.0, hi: 1.0 }
        );
        assert_eq!(preset(Preset::Rham).unwrap().normalized_support(), Interval { lo: -1.0, hi: 1.0 });
    }

    #[test]
    fn masks() {
        let b = preset(Preset::Bernoulli(2.0)).unwrap();
        assert!(b.mask(0.25).norm() < 1e-15);
        for g in [0.1, 0.37, 1.3] {
            assert!((b.mask(g) - (2.0 * PI * g).cos()).norm() < 1e-15);
        }
        let hat = preset(Preset::Hat).unwrap();
        assert!(hat.mask(0.5).norm() < 1e-15);
        for g in [0.1, 0.37, 1.3] {
            let expect = Complex64::from_polar(1.0, -2.0 * PI * g) * (PI * g).cos().powi(2);
            assert!((hat.mask(g) - expect).norm() < 1e-15);
        }
        assert!((preset(Preset::Rham).unwrap().mask(0.0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn json_shape() {
        let hat = preset(Preset::Hat).unwrap();
        let s = serde_json::to_string(&hat).unwrap();
        assert_eq!(
            s,
            r#"{"lambda":2.0,"terms":[{"c":[0.5,0.0],"beta":0.0},{"c":[1.0,0.0],"beta":1.0},{"c":[0.5,0.0],"beta":2.0}]}"#
        );
        let back: TwoScaleEquation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, hat);
        assert!(serde_json::from_str::<TwoScaleEquation>(r#"{"lambda":0.5,"terms":[{"c":[1,0],"beta":0}]}"#).is_err());
    }
}
