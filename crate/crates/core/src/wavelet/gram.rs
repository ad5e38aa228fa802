use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::{Domain, GeneratorSpec};
use super::system::{WaveletPoint, WaveletSystem};
use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eigen, integrate_adaptive_with, integrate_real_line_with, CMatrix, QuadConfig,
    QuadratureResult, RealLineConfig,
};
use crate::refinement::Interval;

/// Relative gap at or below which the report carries a null vector.
pub const NULL_VECTOR_GAP: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerProduct {
    pub value: Complex64,
    pub error: f64,
}

impl From<QuadratureResult> for InnerProduct {
    fn from(r: QuadratureResult) -> Self {
        Self {
            value: r.value,
            error: r.error_estimate,
        }
    }
}

const ZERO: InnerProduct = InnerProduct {
    value: Complex64::new(0.0, 0.0),
    error: 0.0,
};

fn scaled_interval(s: Interval, lambda: f64, beta: f64) -> Interval {
    Interval {
        lo: (s.lo + beta) / lambda,
        hi: (s.hi + beta) / lambda,
    }
}

fn mapped_kinks(kinks: &[f64], p: WaveletPoint, q: WaveletPoint, lo: f64, hi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = kinks
        .iter()
        .map(|k| (k + p.beta) / p.lambda)
        .chain(kinks.iter().map(|k| (k + q.beta) / q.lambda))
        .filter(|x| *x > lo && *x < hi)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// `<phi(lambda_p . - beta_p), phi(lambda_q . - beta_q)>` in `L^2(R)`, to
/// absolute tolerance `tol`.
///
/// Generators with a time-domain formula are integrated directly; the others
/// through Parseval, `(1/(lambda_p lambda_q)) int exp(-2 pi i (beta_p/lambda_p - beta_q/lambda_q) xi)
/// phi_hat(xi/lambda_p) conj(phi_hat(xi/lambda_q)) d xi`.
pub fn inner_product(
    gen: &GeneratorSpec,
    p: WaveletPoint,
    q: WaveletPoint,
    tol: f64,
) -> Result<InnerProduct> {
    let time = |x: f64| {
        let a = gen.time_value(p.lambda * x - p.beta).unwrap_or(0.0);
        let b = gen.time_value(q.lambda * x - q.beta).unwrap_or(0.0);
        Complex64::new(a * b, 0.0)
    };
    let shift = p.beta / p.lambda - q.beta / q.lambda;
    let norm = 1.0 / (p.lambda * q.lambda);
    let freq = |xi: f64| {
        let a = gen.fourier_value(xi / p.lambda).unwrap_or_default();
        let b = gen.fourier_value(xi / q.lambda).unwrap_or_default();
        Complex64::from_polar(norm, -2.0 * PI * shift * xi) * a * b.conj()
    };
    let quad = QuadConfig::default();
    match gen.domain() {
        Domain::TimeCompact { support, kinks } => {
            let sp = scaled_interval(support, p.lambda, p.beta);
            let sq = scaled_interval(support, q.lambda, q.beta);
            let (lo, hi) = (sp.lo.max(sq.lo), sp.hi.min(sq.hi));
            if !(lo < hi) {
                return Ok(ZERO);
            }
            let breaks = mapped_kinks(&kinks, p, q, lo, hi);
            Ok(integrate_adaptive_with(time, lo, hi, tol, &breaks, &quad)?.into())
        }
        Domain::TimeLine { hint, kinks } => {
            let w = p.lambda * p.lambda + q.lambda * q.lambda;
            let center = (p.lambda * p.beta + q.lambda * q.beta) / w;
            let config = RealLineConfig {
                center,
                scale: 1.0 / p.lambda.max(q.lambda),
                breakpoints: kinks
                    .iter()
                    .map(|k| (k + p.beta) / p.lambda)
                    .chain(kinks.iter().map(|k| (k + q.beta) / q.lambda))
                    .collect(),
                quad,
            };
            Ok(integrate_real_line_with(time, hint, tol, &config)?.into())
        }
        Domain::FourierCompact { support, kinks } => {
            let (lo, hi) = (
                (support.lo * p.lambda).max(support.lo * q.lambda),
                (support.hi * p.lambda).min(support.hi * q.lambda),
            );
            if !(lo < hi) {
                return Ok(ZERO);
            }
            let mut breaks: Vec<f64> = kinks
                .iter()
                .flat_map(|k| [k * p.lambda, k * q.lambda])
                .filter(|x| *x > lo && *x < hi)
                .collect();
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            Ok(integrate_adaptive_with(freq, lo, hi, tol, &breaks, &quad)?.into())
        }
        Domain::FourierLine { hint, kinks } => {
            let config = RealLineConfig {
                center: 0.0,
                scale: p.lambda.min(q.lambda),
                breakpoints: kinks
                    .iter()
                    .flat_map(|k| [k * p.lambda, k * q.lambda])
                    .collect(),
                quad,
            };
            Ok(integrate_real_line_with(freq, hint, tol, &config)?.into())
        }
    }
}

/// `sqrt(pi/(lp^2 + lq^2)) exp(-(lp bq - lq bp)^2 / (lp^2 + lq^2))` for `exp(-x^2)`.
pub fn gaussian_inner_closed_form(p: WaveletPoint, q: WaveletPoint) -> f64 {
    let w = p.lambda * p.lambda + q.lambda * q.lambda;
    let d = p.lambda * q.beta - q.lambda * p.beta;
    (PI / w).sqrt() * (-d * d / w).exp()
}

pub fn gaussian_gram_closed_form(points: &[WaveletPoint]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&p| points.iter().map(|&q| gaussian_inner_closed_form(p, q)).collect())
        .collect()
}

fn hat(x: f64) -> f64 {
    (1.0 - (x - 1.0).abs()).max(0.0)
}

/// Exact inner product of two dilated translates of the hat on `[0, 2]`:
/// the integrand is quadratic between merged breakpoints, where Simpson's
/// rule is exact.
pub fn hat_inner_closed_form(p: WaveletPoint, q: WaveletPoint) -> f64 {
    let support = Interval { lo: 0.0, hi: 2.0 };
    let sp = scaled_interval(support, p.lambda, p.beta);
    let sq = scaled_interval(support, q.lambda, q.beta);
    let (lo, hi) = (sp.lo.max(sq.lo), sp.hi.min(sq.hi));
    if !(lo < hi) {
        return 0.0;
    }
    let mut nodes = vec![lo, hi];
    nodes.extend(mapped_kinks(&[0.0, 1.0, 2.0], p, q, lo, hi));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let f = |x: f64| hat(p.lambda * x - p.beta) * hat(q.lambda * x - q.beta);
    nodes
        .windows(2)
        .map(|w| (w[1] - w[0]) / 6.0 * (f(w[0]) + 4.0 * f(0.5 * (w[0] + w[1])) + f(w[1])))
        .sum()
}

pub fn hat_gram_closed_form(points: &[WaveletPoint]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|&p| points.iter().map(|&q| hat_inner_closed_form(p, q)).collect())
        .collect()
}

/// Gram matrix with its spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub matrix: CMatrix,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub relative_gap: f64,
    /// Largest entrywise integration error.
    pub quad_error: f64,
    /// Unit eigenvector of the smallest eigenvalue, with its largest
    /// component real and positive; present when `relative_gap <= 1e-7`.
    pub null_vector: Option<Vec<Complex64>>,
}

/// Rescales `v` to unit norm with its largest-modulus component real positive.
pub fn normalize_phase(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut k = 0;
    for (i, z) in v.iter().enumerate() {
        // first index wins among near-equal moduli
        if z.norm() > v[k].norm() * (1.0 + 1e-9) {
            k = i;
        }
    }
    let phase = if v[k].norm() > 0.0 {
        v[k].conj() / v[k].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    v.iter().map(|z| z * phase / norm).collect()
}

impl GramReport {
    pub fn from_matrix(matrix: CMatrix, quad_error: f64) -> Result<Self> {
        let spectrum = hermitian_eigen(&matrix)?;
        let eigenvalues = spectrum.eigenvalues;
        let sigma_max = *eigenvalues.last().expect("nonempty matrix");
        if !(sigma_max > 0.0) {
            return Err(Error::InvalidInput(
                "Gram matrix has no positive eigenvalue; the generator is zero".into(),
            ));
        }
        let sigma_min = eigenvalues[0].max(0.0);
        let relative_gap = sigma_min / sigma_max;
        let null_vector =
            (relative_gap <= NULL_VECTOR_GAP).then(|| normalize_phase(&spectrum.eigenvectors[0]));
        Ok(Self {
            matrix,
            eigenvalues,
            sigma_min,
            sigma_max,
            relative_gap,
            quad_error,
            null_vector,
        })
    }

    pub fn from_real_matrix(rows: &[Vec<f64>], quad_error: f64) -> Result<Self> {
        Self::from_matrix(CMatrix::from_real_rows(rows)?, quad_error)
    }

    /// Unit eigenvector of the smallest eigenvalue, normalized as `null_vector`.
    pub fn smallest_eigenvector(&self) -> Result<Vec<Complex64>> {
        if let Some(v) = &self.null_vector {
            return Ok(v.clone());
        }
        let s = hermitian_eigen(&self.matrix)?;
        Ok(normalize_phase(&s.eigenvectors[0]))
    }
}

fn base_norm(gen: &GeneratorSpec) -> Result<f64> {
    let unit = WaveletPoint {
        lambda: 1.0,
        beta: 0.0,
    };
    let mut tol = 1e-3;
    for _ in 0..8 {
        let r = inner_product(gen, unit, unit, tol)?;
        let v = r.value.re;
        if v > 0.0 && r.error <= 0.1 * v {
            return Ok(v);
        }
        tol *= 1e-3;
    }
    Err(Error::InvalidInput("generator has zero norm".into()))
}

/// Gram matrix of `system`; `tol` is relative to the Cauchy-Schwarz scale
/// `||phi||^2 / sqrt(lambda_p lambda_q)` of each entry.
pub fn gram(system: &WaveletSystem, tol: f64) -> Result<GramReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let gen = system.generator();
    let points = system.points();
    let n = points.len();
    let base = base_norm(gen)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let entries: Vec<InnerProduct> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (p, q) = (points[i], points[j]);
            inner_product(gen, p, q, tol * base / (p.lambda * q.lambda).sqrt())
        })
        .collect::<Result<_>>()?;
    let mut matrix = CMatrix::zeros(n);
    let mut quad_error = 0.0f64;
    for (&(i, j), e) in pairs.iter().zip(&entries) {
        if i == j {
            matrix[(i, i)] = Complex64::new(e.value.re, 0.0);
        } else {
            matrix[(i, j)] = e.value;
            matrix[(j, i)] = e.value.conj();
        }
        quad_error = quad_error.max(e.error);
    }
    GramReport::from_matrix(matrix, quad_error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::generator::CatalogId;

    fn pt(lambda: f64, beta: f64) -> WaveletPoint {
        WaveletPoint { lambda, beta }
    }

    #[test]
    fn gaussian_closed_form_values() {
        assert!((gaussian_inner_closed_form(pt(1.0, 0.0), pt(1.0, 0.0)) - 1.253_314_137_3).abs() < 1e-10);
        assert!((gaussian_inner_closed_form(pt(1.0, 0.0), pt(2.0, 0.0)) - 0.792_665_459_5).abs() < 1e-10);
        let g = gaussian_gram_closed_form(&[pt(1.0, 0.0), pt(2.0, 0.0), pt(4.0, 0.0)]);
        assert!((g[0][2] - (PI / 17.0).sqrt()).abs() < 1e-15);
        let b = 1.3;
        let g = gaussian_gram_closed_form(&[pt(1.0, 0.0), pt(1.0, b)]);
        assert!((g[0][1] - (PI / 2.0).sqrt() * (-b * b / 2.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn gaussian_quadrature_matches() {
        let g = GeneratorSpec::gaussian();
        for (p, q) in [
            (pt(1.0, 0.0), pt(1.0, 0.0)),
            (pt(1.0, 0.0), pt(2.0, 0.0)),
            (pt(2.0, 1.0), pt(3.0, -1.0)),
        ] {
            let r = inner_product(&g, p, q, 1e-12).unwrap();
            assert!((r.value.re - gaussian_inner_closed_form(p, q)).abs() < 1e-11);
        }
    }

    #[test]
    fn hat_values() {
        assert!((hat_inner_closed_form(pt(1.0, 0.0), pt(1.0, 0.0)) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(hat_inner_closed_form(pt(1.0, 0.0), pt(1.0, 2.0)), 0.0);
        let r = inner_product(&GeneratorSpec::hat(), pt(1.0, 0.0), pt(1.0, 10.0), 1e-10).unwrap();
        assert_eq!(r.value.re, 0.0);
        let r = inner_product(&GeneratorSpec::hat(), pt(1.0, 0.0), pt(2.0, 1.0), 1e-12).unwrap();
        assert!((r.value.re - hat_inner_closed_form(pt(1.0, 0.0), pt(2.0, 1.0))).abs() < 1e-14);
    }

    #[test]
    fn hat_lattice_is_singular() {
        let pts = [pt(1.0, 0.0), pt(2.0, 0.0), pt(2.0, 1.0), pt(2.0, 2.0)];
        let r = GramReport::from_real_matrix(&hat_gram_closed_form(&pts), 0.0).unwrap();
        assert!(r.relative_gap <= 1e-10);
        let v = r.null_vector.unwrap();
        let expect = normalize_phase(&[1.0, -0.5, -1.0, -0.5].map(|x| Complex64::new(x, 0.0)));
        for (a, b) in v.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-6 || (a + b).norm() < 1e-6);
        }
    }

    #[test]
    fn fourier_domain_matches_time_domain() {
        // sech is its own transform, so both routes apply
        let g = GeneratorSpec::catalog(CatalogId::Sech);
        let (p, q) = (pt(1.0, 0.5), pt(2.0, -0.25));
        let t = inner_product(&g, p, q, 1e-11).unwrap().value;
        let shift = p.beta / p.lambda - q.beta / q.lambda;
        let f = crate::numerics::integrate_real_line(
            |xi| {
                let a = g.fourier_value(xi / p.lambda).unwrap();
                let b = g.fourier_value(xi / q.lambda).unwrap();
                Complex64::from_polar(1.0 / (p.lambda * q.lambda), -2.0 * PI * shift * xi) * a * b.conj()
            },
            crate::numerics::DecayHint::Exponential,
            1e-11,
        )
        .unwrap()
        .value;
        assert!((t - f).norm() < 1e-9, "{t} vs {f}");
    }

    #[test]
    fn sinc_squared_norm() {
        // ||sinc^2||^2 = int (1-|g|)^2 dg = 2/3
        let g = GeneratorSpec::catalog(CatalogId::SincSquared);
        let r = inner_product(&g, pt(1.0, 0.0), pt(1.0, 0.0), 1e-12).unwrap();
        assert!((r.value.re - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_gram() {
        let s = WaveletSystem::from_pairs(GeneratorSpec::gaussian(), &[(1.0, 0.0)]).unwrap();
        let r = gram(&s, 1e-10).unwrap();
        assert_eq!(r.sigma_min, r.sigma_max);
        assert!((r.sigma_max - (PI / 2.0).sqrt()).abs() < 1e-9);
    }
}
