//! Symmetric Bernoulli convolutions: the law of `sum_{j>=1} e_j alpha^j` with
//! independent equiprobable signs `e_j = +-1`, which solves
//! `phi(x) = (lambda/2)(phi(lambda x - 1) + phi(lambda x + 1))` for `lambda = 1/alpha`.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::format_g17;
use crate::refinement::{preset, Preset, TwoScaleEquation};

/// Largest supported enumeration depth (`2^26` sign patterns).
pub const MAX_DEPTH: u32 = 26;
const SPLIT_BITS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BernoulliModel {
    alpha: f64,
}

impl BernoulliModel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self { alpha })
        } else if alpha >= 1.0 && alpha.is_finite() {
            Err(Error::BadParameter(format!(
                "alpha = {alpha} >= 1 corresponds to lambda <= 1; the convolution model needs 0 < alpha < 1"
            )))
        } else {
            Err(Error::BadParameter(format!("alpha must lie in (0, 1), got {alpha}")))
        }
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        Self::new(1.0 / lambda)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Half-width `alpha / (1 - alpha)` of the support.
    pub fn support_radius(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// The two-term equation with `lambda = 1/alpha` and coefficients `lambda/2` at `-1, 1`.
    pub fn as_equation(&self) -> TwoScaleEquation {
        preset(Preset::Bernoulli(self.lambda())).expect("lambda > 1 for alpha in (0, 1)")
    }

    /// `prod_{j=1}^J cos(2 pi alpha^j gamma)`, with `J` the smallest depth such that
    /// `sum_{j>J} (2 pi alpha^j gamma)^2 / 2 <= tol`.
    pub fn fourier(&self, gamma: f64, tol: f64) -> f64 {
        if gamma == 0.0 {
            return 1.0;
        }
        let depth = self.fourier_depth(gamma, tol);
        let mut a = 1.0;
        let mut value = 1.0;
        for _ in 0..depth {
            a *= self.alpha;
            value *= (2.0 * PI * a * gamma).cos();
        }
        value
    }

    /// Product depth used by [`fourier`](Self::fourier).
    pub fn fourier_depth(&self, gamma: f64, tol: f64) -> u32 {
        let a2 = self.alpha * self.alpha;
        let c = 2.0 * PI * PI * gamma * gamma / (1.0 - a2);
        let mut depth = 0u32;
        // the tail sum after depth J is c * alpha^{2(J+1)}
        let mut tail = c * a2;
        while tail > tol && depth < 100_000 {
            depth += 1;
            tail *= a2;
        }
        depth
    }

    /// Histogram of the `2^depth` equally likely partial sums `sum_{j=1}^depth e_j alpha^j`.
    pub fn density(&self, depth: u32, bins: usize) -> Result<DensityHistogram> {
        if depth == 0 {
            return Err(Error::InvalidInput("depth must be positive".into()));
        }
        if depth > MAX_DEPTH {
            return Err(Error::BudgetExceeded {
                depth,
                max: MAX_DEPTH,
            });
        }
        if bins == 0 {
            return Err(Error::InvalidInput("bins must be positive".into()));
        }
        let radius = self.support_radius();
        let bin_edges: Vec<f64> = (0..=bins)
            .map(|i| {
                if i == 0 {
                    -radius
                } else if i == bins {
                    radius
                } else {
                    radius * ((2 * i) as f64 - bins as f64) / bins as f64
                }
            })
            .collect();
        let powers: Vec<f64> = (1..=depth).map(|j| self.alpha.powi(j as i32)).collect();

        let split = depth.min(SPLIT_BITS);
        let partials: Vec<Vec<u64>> = (0..1u64 << split)
            .into_par_iter()
            .map(|prefix| {
                let mut x = 0.0;
                for (j, p) in powers[..split as usize].iter().enumerate() {
                    let bit = (prefix >> (split as usize - 1 - j)) & 1;
                    x += if bit == 0 { -p } else { *p };
                }
                let mut counts = vec![0u64; bins];
                enumerate(x, &powers[split as usize..], &bin_edges, &mut counts);
                counts
            })
            .collect();
        let mut counts = vec![0u64; bins];
        for part in &partials {
            for (c, p) in counts.iter_mut().zip(part) {
                *c += p;
            }
        }
        let total = (1u64 << depth) as f64;
        Ok(DensityHistogram {
            alpha: self.alpha,
            masses: counts.iter().map(|&c| c as f64 / total).collect(),
            bin_edges,
            depth,
            positional_error: self.alpha.powi(depth as i32 + 1) / (1.0 - self.alpha),
        })
    }
}

fn enumerate(x: f64, powers: &[f64], edges: &[f64], counts: &mut [u64]) {
    match powers.split_first() {
        None => counts[bin_index(x, edges)] += 1,
        Some((p, rest)) => {
            enumerate(x - p, rest, edges, counts);
            enumerate(x + p, rest, edges, counts);
        }
    }
}

/// Half-open bins `[left, right)`; the last bin is closed and values outside
/// the edges are clamped into the end bins.
fn bin_index(x: f64, edges: &[f64]) -> usize {
    let bins = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[bins];
    let guess = ((x - lo) / (hi - lo) * bins as f64).floor();
    let mut i = if guess.is_nan() || guess < 0.0 {
        0
    } else {
        (guess as usize).min(bins - 1)
    };
    while i > 0 && x < edges[i] {
        i -= 1;
    }
    while i + 1 < bins && x >= edges[i + 1] {
        i += 1;
    }
    i
}

/// Exact histogram of a depth-truncated Bernoulli convolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityHistogram {
    pub alpha: f64,
    /// Uniform partition of `[-alpha/(1-alpha), alpha/(1-alpha)]`.
    pub bin_edges: Vec<f64>,
    /// Multiples of `2^-depth`, summing to exactly 1.
    pub masses: Vec<f64>,
    pub depth: u32,
    /// `alpha^{depth+1} / (1 - alpha)`, the largest displacement of an atom
    /// relative to the untruncated series.
    pub positional_error: f64,
}

impl DensityHistogram {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    pub fn bin_width(&self) -> f64 {
        (self.bin_edges[self.bins()] - self.bin_edges[0]) / self.bins() as f64
    }

    /// Mass per unit length in each bin.
    pub fn densities(&self) -> Vec<f64> {
        let w = self.bin_width();
        self.masses.iter().map(|m| m / w).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// `sum_b mass_b * center_b^2`.
    pub fn second_moment(&self) -> f64 {
        self.centers()
            .iter()
            .zip(&self.masses)
            .map(|(c, m)| m * c * c)
            .sum()
    }

    /// `sum_b mass_b * cos(2 pi gamma center_b)`.
    pub fn characteristic(&self, gamma: f64) -> f64 {
        self.centers()
            .iter()
            .zip(&self.masses)
            .map(|(c, m)| m * (2.0 * PI * gamma * c).cos())
            .sum()
    }

    /// Writes `bin_left,bin_right,mass` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "bin_left,bin_right,mass")?;
        for (w, m) in self.bin_edges.windows(2).zip(&self.masses) {
            writeln!(out, "{},{},{}", format_g17(w[0]), format_g17(w[1]), format_g17(*m))?;
        }
        Ok(())
    }
}

/// `2^{-1/(n+1)}`: for `alpha` below this value no nonzero compactly
/// supported `C^n` solution exists.
pub fn threshold(n: u32) -> f64 {
    2f64.powf(-1.0 / (n as f64 + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothnessVerdict {
    /// `alpha < threshold(n)`: no nonzero compactly supported `C^n` solution.
    RuledOut,
    /// No claim either way.
    Unknown,
}

pub fn smoothness_verdict(alpha: f64, n: u32) -> SmoothnessVerdict {
    if alpha < threshold(n) {
        SmoothnessVerdict::RuledOut
    } else {
        SmoothnessVerdict::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub alpha: f64,
    pub n: u32,
    pub threshold: f64,
    pub verdict: SmoothnessVerdict,
}

pub fn verdict_report(model: &BernoulliModel, n: u32) -> VerdictReport {
    VerdictReport {
        alpha: model.alpha(),
        n,
        threshold: threshold(n),
        verdict: smoothness_verdict(model.alpha(), n),
    }
}
