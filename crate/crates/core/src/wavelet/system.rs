use serde::{Deserialize, Serialize};

use super::generator::GeneratorSpec;
use crate::error::{Error, Result};

/// Dilation and translation `(lambda, beta)` of one system element
/// `phi(lambda x - beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveletPoint {
    pub lambda: f64,
    pub beta: f64,
}

impl WaveletPoint {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("dilation must be positive, got {lambda}")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidInput(format!("translation must be finite, got {beta}")));
        }
        Ok(Self { lambda, beta })
    }
}

/// `{phi(lambda_k x - beta_k)}` over pairwise distinct points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct WaveletSystem {
    generator: GeneratorSpec,
    points: Vec<WaveletPoint>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    generator: GeneratorSpec,
    points: Vec<WaveletPoint>,
}

impl TryFrom<RawSystem> for WaveletSystem {
    type Error = Error;
    fn try_from(raw: RawSystem) -> Result<Self> {
        WaveletSystem::new(raw.generator, raw.points)
    }
}

impl From<WaveletSystem> for RawSystem {
    fn from(s: WaveletSystem) -> Self {
        RawSystem {
            generator: s.generator,
            points: s.points,
        }
    }
}

impl WaveletSystem {
    pub fn new(generator: GeneratorSpec, points: Vec<WaveletPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("a wavelet system needs at least one point".into()));
        }
        for p in &points {
            WaveletPoint::new(p.lambda, p.beta)?;
        }
        for (i, p) in points.iter().enumerate() {
            if let Some(j) = points[..i].iter().position(|q| q == p) {
                return Err(Error::DuplicatePoint { first: j, second: i });
            }
        }
        Ok(Self { generator, points })
    }

    /// Convenience constructor from `(lambda, beta)` pairs.
    pub fn from_pairs(generator: GeneratorSpec, pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            generator,
            pairs
                .iter()
                .map(|&(lambda, beta)| WaveletPoint { lambda, beta })
                .collect(),
        )
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.generator
    }

    pub fn points(&self) -> &[WaveletPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same points with another generator.
    pub fn with_generator(&self, generator: GeneratorSpec) -> Self {
        Self {
            generator,
            points: self.points.clone(),
        }
    }

    /// Index of the unique strictly largest dilation, if there is one.
    pub fn unique_max_dilation(&self) -> Option<usize> {
        unique_extremum(&self.points, |a, b| a > b)
    }

    /// Index of the unique strictly smallest dilation, if there is one.
    pub fn unique_min_dilation(&self) -> Option<usize> {
        unique_extremum(&self.points, |a, b| a < b)
    }
}

fn unique_extremum(points: &[WaveletPoint], better: impl Fn(f64, f64) -> bool) -> Option<usize> {
    let mut best = 0;
    for (i, p) in points.iter().enumerate().skip(1) {
        if better(p.lambda, points[best].lambda) {
            best = i;
        }
    }
    let ties = points
        .iter()
        .filter(|p| p.lambda == points[best].lambda)
        .count();
    (ties == 1).then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_rejected() {
        let e = WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &[(1.0, 0.0), (2.0, 0.0), (1.0, 0.0)])
            .unwrap_err();
        assert_eq!(e, Error::DuplicatePoint { first: 0, second: 2 });
    }

    #[test]
    fn bad_points_rejected() {
        assert!(WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &[(0.0, 0.0)]).is_err());
        assert!(WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &[(1.0, f64::NAN)]).is_err());
        assert!(WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &[]).is_err());
    }

    #[test]
    fn extremal_dilations() {
        let s = WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &[(1.0, 0.0), (3.0, 0.0), (1.0, 1.0)])
            .unwrap();
        assert_eq!(s.unique_max_dilation(), Some(1));
        assert_eq!(s.unique_min_dilation(), None);
    }

    #[test]
    fn json_shape() {
        let s: WaveletSystem = serde_json::from_str(
            r#"{"generator":{"kind":"gaussian"},"points":[{"lambda":1.0,"beta":0.0},{"lambda":2.0,"beta":-1.5}]}"#,
        )
        .unwrap();
        assert_eq!(s.points()[1], WaveletPoint { lambda: 2.0, beta: -1.5 });
        let back: WaveletSystem = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
