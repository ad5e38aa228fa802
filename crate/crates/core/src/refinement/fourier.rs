use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equation::TwoScaleEquation;
use crate::error::{Error, Result};
use crate::numerics::{loglog_slope, SlopeFit, MIN_WINDOW};

/// Required `|sum c_k - lambda|` for the infinite product to be normalized.
pub const NORMALIZATION_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 4096;

/// Samples of `phi_hat` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierProfile {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Largest product depth used over the grid.
    pub truncation_depth: u32,
    /// Largest bound on `|value - phi_hat(gamma)|` over the grid.
    pub tail_bound: f64,
}

/// Truncated product `prod_{j=1}^J m(gamma / lambda^j)`.
///
/// Writing `m(d) = 1 + e(d)` with `|e(d)| <= C|d|`, `C = (2 pi / lambda) sum |c_k| |beta_k|`,
/// the omitted factors satisfy `|prod_{j>J} - 1| <= exp(C|gamma| lambda^{-J} / (lambda - 1)) - 1`,
/// and `J` is the smallest depth for which this is at most `tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductPoint {
    pub value: Complex64,
    pub depth: u32,
    pub error_bound: f64,
}

pub fn mask_lipschitz(eq: &TwoScaleEquation) -> f64 {
    2.0 * PI / eq.lambda() * eq.terms().iter().map(|t| t.c.norm() * t.beta.abs()).sum::<f64>()
}

fn tail_excess(lip: f64, gamma: f64, lambda: f64, depth: u32) -> f64 {
    let s = lip * gamma.abs() * lambda.powi(-(depth as i32)) / (lambda - 1.0);
    s.exp_m1()
}

pub fn fourier_point(eq: &TwoScaleEquation, lip: f64, gamma: f64, tol: f64) -> ProductPoint {
    if gamma == 0.0 {
        return ProductPoint {
            value: Complex64::new(1.0, 0.0),
            depth: 1,
            error_bound: 0.0,
        };
    }
    let lambda = eq.lambda();
    let mut depth = 1;
    while depth < MAX_DEPTH && tail_excess(lip, gamma, lambda, depth) > tol {
        depth += 1;
    }
    let mut value = Complex64::new(1.0, 0.0);
    let mut scale = 1.0;
    for _ in 0..depth {
        scale *= lambda;
        value *= eq.mask(gamma / scale);
    }
    ProductPoint {
        value,
        depth,
        error_bound: value.norm() * tail_excess(lip, gamma, lambda, depth),
    }
}

fn check_normalized(eq: &TwoScaleEquation) -> Result<()> {
    if eq.is_normalized(NORMALIZATION_TOL) {
        Ok(())
    } else {
        Err(Error::NotNormalized {
            sum: eq.coefficient_sum(),
            lambda: eq.lambda(),
        })
    }
}

/// Evaluates `phi_hat(gamma) = prod_{j>=1} m(gamma / lambda^j)` on `grid`.
pub fn solve_fourier(eq: &TwoScaleEquation, grid: &[f64], tol: f64) -> Result<FourierProfile> {
    check_normalized(eq)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty grid".into()));
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidInput("grid contains a non-finite value".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    let lip = mask_lipschitz(eq);
    let points: Vec<ProductPoint> = grid
        .par_iter()
        .map(|&g| fourier_point(eq, lip, g, tol))
        .collect();
    Ok(FourierProfile {
        grid: grid.to_vec(),
        values: points.iter().map(|p| p.value).collect(),
        truncation_depth: points.iter().map(|p| p.depth).max().unwrap_or(1),
        tail_bound: points.iter().map(|p| p.error_bound).fold(0.0, f64::max),
    })
}

/// `count` equispaced points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}

/// Slopes steeper than this are reported as superpolynomial decay.
pub const SUPERPOLYNOMIAL_SLOPE: f64 = -10.0;

/// Decay-based regularity estimate; heuristic, not a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityEstimate {
    /// `-slope - 1`, or `+inf` when the decay is superpolynomial.
    #[serde(with = "crate::format::extended_f64")]
    pub mu_estimate: f64,
    pub fit: SlopeFit,
    pub superpolynomial: bool,
    /// Always true: the estimate comes from a slope fit, not a theorem.
    pub heuristic: bool,
}

/// Fits `ln M_d` against `d ln 2` where `M_d = max |phi_hat|` over the dyadic
/// annulus `2^d <= |gamma| < 2^{d+1}`, `d >= 0`, and returns `-slope - 1`.
pub fn estimate_regularity(profile: &FourierProfile) -> Result<RegularityEstimate> {
    let mut maxima: Vec<(i32, f64)> = Vec::new();
    for (g, v) in profile.grid.iter().zip(&profile.values) {
        let a = g.abs();
        if a < 1.0 || !a.is_finite() {
            continue;
        }
        let d = a.log2().floor() as i32;
        // guard against log2 rounding at exact powers of two
        let d = if 2f64.powi(d) > a { d - 1 } else if 2f64.powi(d + 1) <= a { d + 1 } else { d };
        match maxima.binary_search_by_key(&d, |&(k, _)| k) {
            Ok(i) => maxima[i].1 = maxima[i].1.max(v.norm()),
            Err(i) => maxima.insert(i, (d, v.norm())),
        }
    }
    let window: Vec<(f64, f64)> = maxima
        .iter()
        .filter(|&&(_, m)| m > 0.0)
        .map(|&(d, m)| (2f64.powi(d), m))
        .collect();
    if window.len() < MIN_WINDOW {
        return Err(Error::InsufficientDecades {
            found: window.len(),
            required: MIN_WINDOW,
        });
    }
    let fit = loglog_slope(&window)?;
    let superpolynomial = fit.slope < SUPERPOLYNOMIAL_SLOPE;
    Ok(RegularityEstimate {
        mu_estimate: if superpolynomial {
            f64::INFINITY
        } else {
            -fit.slope - 1.0
        },
        fit,
        superpolynomial,
        heuristic: true,
    })
}
