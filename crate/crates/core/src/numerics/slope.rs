use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(ln x, ln y)` pairs the fit was computed from.
    pub window: Vec<(f64, f64)>,
}

pub const MIN_WINDOW: usize = 4;

/// Fits `ln y = slope * ln x + intercept`.
///
/// Needs at least four samples with strictly increasing positive abscissae;
/// a zero ordinate is a [`Error::DegenerateWindow`].
pub fn loglog_slope(samples: &[(f64, f64)]) -> Result<SlopeFit> {
    if samples.len() < MIN_WINDOW {
        return Err(Error::DegenerateWindow(format!(
            "{} samples, at least {MIN_WINDOW} required",
            samples.len()
        )));
    }
    for (i, &(x, y)) in samples.iter().enumerate() {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidInput(format!("abscissa {x} is not positive")));
        }
        if y == 0.0 {
            return Err(Error::DegenerateWindow(format!("zero ordinate at x = {x}")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::InvalidInput(format!("ordinate {y} is not positive")));
        }
        if i > 0 && samples[i - 1].0 >= x {
            return Err(Error::InvalidInput(
                "abscissae must be strictly increasing".into(),
            ));
        }
    }

    let window: Vec<(f64, f64)> = samples.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = window.len() as f64;
    let mean_u = window.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_v = window.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut suu, mut suv, mut svv) = (0.0, 0.0, 0.0);
    for &(u, v) in &window {
        suu += (u - mean_u) * (u - mean_u);
        suv += (u - mean_u) * (v - mean_v);
        svv += (v - mean_v) * (v - mean_v);
    }
    let slope = suv / suu;
    let intercept = mean_v - slope * mean_u;
    let ss_res: f64 = window
        .iter()
        .map(|&(u, v)| {
            let r = v - (slope * u + intercept);
            r * r
        })
        .sum();
    let r_squared = if svv == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / svv).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        window,
    })
}
