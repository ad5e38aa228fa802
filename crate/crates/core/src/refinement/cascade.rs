use serde::{Deserialize, Serialize};

use super::equation::{Interval, TwoScaleEquation};
use super::fourier::NORMALIZATION_TOL;
use crate::error::{Error, Result};

/// Real samples on the uniform grid `start + i * step`, `i = 0..values.len()`.
///
/// Evaluation between nodes is piecewise linear and the function is zero
/// outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
    pub support: Interval,
}

impl SampledFunction {
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "sampled function needs finite start and positive step, got start={start}, step={step}"
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidInput("sampled function needs at least two samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("sampled function has a non-finite value".into()));
        }
        let support = Interval {
            lo: start,
            hi: start + step * (values.len() - 1) as f64,
        };
        Ok(Self {
            start,
            step,
            values,
            support,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            self.support.hi
        } else {
            self.start + self.step * i as f64
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.node(i)).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.start) / self.step;
        let last = (self.values.len() - 1) as f64;
        if !(t >= 0.0 && t <= last) {
            return 0.0;
        }
        let i = t.floor();
        let k = i as usize;
        if i == last {
            return self.values[k];
        }
        let w = t - i;
        if w == 0.0 {
            self.values[k]
        } else {
            self.values[k] * (1.0 - w) + self.values[k + 1] * w
        }
    }

    /// Composite trapezoid rule over the grid.
    pub fn trapezoid(&self) -> f64 {
        let n = self.values.len();
        let inner: f64 = self.values[1..n - 1].iter().sum();
        self.step * (inner + 0.5 * (self.values[0] + self.values[n - 1]))
    }

    /// Largest `|self - f|` over the grid nodes.
    pub fn sup_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        (0..self.values.len())
            .map(|i| (self.values[i] - f(self.node(i))).abs())
            .fold(0.0, f64::max)
    }
}

/// Starting function for the cascade iteration, both with unit integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CascadeInit {
    /// `1/(b-a)` on the half-open support `[a, b)`.
    Indicator,
    /// Tent on `[a, b]` with peak `2/(b-a)` at the midpoint.
    Hat,
}

impl std::str::FromStr for CascadeInit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indicator" => Ok(Self::Indicator),
            "hat" => Ok(Self::Hat),
            _ => Err(Error::BadParameter(format!(
                "unknown cascade init {s:?}; expected indicator or hat"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeResult {
    pub function: SampledFunction,
    /// `sup |phi_{n+1} - phi_n|` over the grid, one entry per iteration.
    pub residual_history: Vec<f64>,
    /// Set when the output was rescaled to unit trapezoid integral.
    pub renormalized: bool,
}

/// Residual growth factor over [`DIVERGENCE_WINDOW`] iterations that is reported as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
pub const DIVERGENCE_WINDOW: usize = 5;

/// Iterates `phi_{n+1}(x) = sum_k c_k phi_n(lambda x - beta_k)` on a uniform
/// grid over the normalized support, with node spacing at most `resolution`.
pub fn cascade_solve(
    eq: &TwoScaleEquation,
    resolution: f64,
    iterations: usize,
    init: CascadeInit,
) -> Result<CascadeResult> {
    if !eq.is_normalized(NORMALIZATION_TOL) {
        return Err(Error::NotNormalized {
            sum: eq.coefficient_sum(),
            lambda: eq.lambda(),
        });
    }
    if !eq.has_real_coefficients() {
        return Err(Error::InvalidInput(
            "cascade iteration supports real coefficients only".into(),
        ));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let support = eq.normalized_support();
    let width = support.width();
    if !(width > 0.0) {
        return Err(Error::InvalidInput(
            "single-offset equation has a degenerate support; no cascade grid exists".into(),
        ));
    }
    let cells = (width / resolution).ceil().max(1.0);
    if cells > 1e8 {
        return Err(Error::InvalidInput(format!(
            "resolution {resolution} gives {cells} cells on a support of width {width}"
        )));
    }
    let cells = cells as usize;
    let step = width / cells as f64;
    let n = cells + 1;
    let node = |i: usize| {
        if i + 1 == n {
            support.hi
        } else {
            support.lo + step * i as f64
        }
    };

    let values: Vec<f64> = match init {
        CascadeInit::Indicator => (0..n)
            .map(|i| if i + 1 == n { 0.0 } else { 1.0 / width })
            .collect(),
        CascadeInit::Hat => {
            let mid = 0.5 * (support.lo + support.hi);
            let half = 0.5 * width;
            (0..n)
                .map(|i| (1.0 - (node(i) - mid).abs() / half).max(0.0) / half)
                .collect()
        }
    };
    let mut phi = SampledFunction {
        start: support.lo,
        step,
        values,
        support,
    };

    let lambda = eq.lambda();
    let coeffs: Vec<(f64, f64)> = eq.terms().iter().map(|t| (t.c.re, t.beta)).collect();
    let mut history = Vec::with_capacity(iterations);
    for iteration in 1..=iterations {
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let x = node(i);
                coeffs
                    .iter()
                    .map(|&(c, b)| c * phi.eval(lambda * x - b))
                    .sum()
            })
            .collect();
        let residual = next
            .iter()
            .zip(&phi.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if !residual.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverging {
                iteration,
                residual,
            });
        }
        history.push(residual);
        phi.values = next;
        if diverging(&history) {
            return Err(Error::Diverging {
                iteration,
                residual,
            });
        }
    }

    let mut renormalized = false;
    if iterations > 0 && coeffs.iter().all(|&(c, _)| c >= 0.0) {
        let integral = phi.trapezoid();
        if integral > 0.0 {
            phi.values.iter_mut().for_each(|v| *v /= integral);
            renormalized = true;
        }
    }
    Ok(CascadeResult {
        function: phi,
        residual_history: history,
        renormalized,
    })
}

fn diverging(history: &[f64]) -> bool {
    let k = history.len();
    if k <= DIVERGENCE_WINDOW {
        return false;
    }
    let window = &history[k - 1 - DIVERGENCE_WINDOW..];
    window[0] > 0.0
        && window[DIVERGENCE_WINDOW] >= DIVERGENCE_FACTOR * window[0]
        && window.windows(2).all(|w| w[1] >= w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refinement::{preset, Preset};

    fn hat(x: f64) -> f64 {
        (1.0 - (x - 1.0).abs()).max(0.0)
    }

    #[test]
    fn hat_converges() {
        let eq = preset(Preset::Hat).unwrap();
        let r = cascade_solve(&eq, 2f64.powi(-10), 15, CascadeInit::Indicator).unwrap();
        assert_eq!(r.residual_history.len(), 15);
        assert!(r.function.sup_distance(hat) <= 1e-3);
        for w in r.residual_history[2..].windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!((r.function.trapezoid() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hat_init_also_converges() {
        let eq = preset(Preset::Hat).unwrap();
        let r = cascade_solve(&eq, 2f64.powi(-8), 1, CascadeInit::Hat).unwrap();
        // the tent on [0, 2] is already the fixed point
        assert!(r.residual_history[0] < 1e-14);
        assert!(r.function.sup_distance(hat) < 1e-14);
    }

    #[test]
    fn bernoulli_uniform() {
        let eq = preset(Preset::Bernoulli(2.0)).unwrap();
        let r = cascade_solve(&eq, 2f64.powi(-10), 20, CascadeInit::Indicator).unwrap();
        let f = &r.function;
        let interior = (0..f.len())
            .filter(|&i| f.node(i).abs() < 0.99)
            .map(|i| (f.values[i] - 0.5).abs())
            .fold(0.0, f64::max);
        assert!(interior <= 5e-3, "{interior}");
    }

    #[test]
    fn zero_iterations_return_init() {
        let eq = preset(Preset::Rham).unwrap();
        let r = cascade_solve(&eq, 0.01, 0, CascadeInit::Hat).unwrap();
        assert!(r.residual_history.is_empty());
        assert!(!r.renormalized);
        assert!((r.function.eval(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_endpoint_diverges() {
        let eq = TwoScaleEquation::from_real(2.0, &[(3.0, 0.0), (-1.5, 1.0), (0.5, 2.0)]).unwrap();
        let r = cascade_solve(&eq, 2f64.powi(-8), 60, CascadeInit::Indicator);
        assert!(matches!(r, Err(Error::Diverging { .. })), "{r:?}");
    }

    #[test]
    fn rejects_unnormalized_and_complex() {
        let eq = TwoScaleEquation::from_real(2.0, &[(1.0, 0.0), (0.5, 2.0)]).unwrap();
        assert!(matches!(
            cascade_solve(&eq, 0.01, 3, CascadeInit::Hat),
            Err(Error::NotNormalized { .. })
        ));
        let eq = TwoScaleEquation::new(
            2.0,
            [
                super::super::Term {
                    c: num_complex::Complex64::new(1.0, 0.5),
                    beta: 0.0,
                },
                super::super::Term {
                    c: num_complex::Complex64::new(1.0, -0.5),
                    beta: 1.0,
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            cascade_solve(&eq, 0.01, 3, CascadeInit::Hat),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn sampled_eval_interpolates() {
        let f = SampledFunction::new(0.0, 0.5, vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.eval(0.25), 0.5);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(-0.1), 0.0);
        assert_eq!(f.eval(1.1), 0.0);
        assert_eq!(f.trapezoid(), 0.5);
    }
}
