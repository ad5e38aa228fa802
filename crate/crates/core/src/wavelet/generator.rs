use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DecayHint;
use crate::refinement::{cascade_solve, CascadeInit, Interval, SampledFunction, TwoScaleEquation};

/// Declared analytic properties of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    Schwartz,
    FasterThanExponentialDecay,
    FasterThanPolynomialDecay,
    NoncompactSupport,
    CompactSupport,
    FtCompactSupport,
    FtVanishesNearZero,
    FtAbsUltimatelyDecreasingBothSides,
    FtLeCombination,
    #[serde(rename = "smooth_all_derivs_L1")]
    SmoothAllDerivsL1,
}

impl Tag {
    pub const ALL: [Tag; 10] = [
        Tag::Schwartz,
        Tag::FasterThanExponentialDecay,
        Tag::FasterThanPolynomialDecay,
        Tag::NoncompactSupport,
        Tag::CompactSupport,
        Tag::FtCompactSupport,
        Tag::FtVanishesNearZero,
        Tag::FtAbsUltimatelyDecreasingBothSides,
        Tag::FtLeCombination,
        Tag::SmoothAllDerivsL1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Schwartz => "schwartz",
            Tag::FasterThanExponentialDecay => "faster_than_exponential_decay",
            Tag::FasterThanPolynomialDecay => "faster_than_polynomial_decay",
            Tag::NoncompactSupport => "noncompact_support",
            Tag::CompactSupport => "compact_support",
            Tag::FtCompactSupport => "ft_compact_support",
            Tag::FtVanishesNearZero => "ft_vanishes_near_zero",
            Tag::FtAbsUltimatelyDecreasingBothSides => "ft_abs_ultimately_decreasing_both_sides",
            Tag::FtLeCombination => "ft_le_combination",
            Tag::SmoothAllDerivsL1 => "smooth_all_derivs_L1",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type TagSet = BTreeSet<Tag>;

/// Adds implied tags and rejects contradictory combinations.
pub fn close_tags(tags: impl IntoIterator<Item = Tag>) -> Result<TagSet> {
    let mut set: TagSet = tags.into_iter().collect();
    if set.contains(&Tag::Schwartz) || set.contains(&Tag::FasterThanExponentialDecay) {
        set.insert(Tag::FasterThanPolynomialDecay);
    }
    let conflicts = [
        (Tag::CompactSupport, Tag::NoncompactSupport),
        (Tag::CompactSupport, Tag::FtCompactSupport),
    ];
    for (a, b) in conflicts {
        if set.contains(&a) && set.contains(&b) {
            return Err(Error::InconsistentTags(format!("{a} and {b} are mutually exclusive")));
        }
    }
    Ok(set)
}

/// Closed-form generators whose Fourier transform is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogId {
    /// `sech(pi x)`, its own Fourier transform.
    Sech,
    /// `(sin(pi x)/(pi x))^2`, Fourier transform `max(0, 1 - |gamma|)`.
    SincSquared,
    /// Fourier transform is the indicator of `1/2 <= |gamma| <= 1`.
    Shannon,
    /// Defined by its Fourier transform `gamma ln|gamma| / (e^gamma + e^-gamma)`.
    GammaLogOverCosh,
}

pub const DEFAULT_RESOLUTION: f64 = 1.0 / 1024.0;
pub const DEFAULT_ITERATIONS: usize = 40;

fn default_resolution() -> f64 {
    DEFAULT_RESOLUTION
}

fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

fn default_init() -> CascadeInit {
    CascadeInit::Indicator
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `exp(-x^2)`.
    Gaussian,
    /// `exp(-n |x|)`.
    TwoSidedExp { n: u32 },
    /// `p(x)/q(x)`; coefficients in ascending powers, `q` without real roots
    /// and `deg q > deg p`.
    Rational {
        numerator: Vec<f64>,
        denominator: Vec<f64>,
    },
    /// `max(0, 1 - |x - 1|)`.
    Hat,
    /// Cascade approximation of a two-scale equation's solution.
    Refinement {
        equation: TwoScaleEquation,
        #[serde(default = "default_resolution")]
        resolution: f64,
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default = "default_init")]
        init: CascadeInit,
    },
    /// Piecewise-linear samples `values[i]` at `start + i * step`.
    Sampled {
        start: f64,
        step: f64,
        values: Vec<f64>,
    },
    LeCatalog { id: CatalogId },
}

/// How inner products of a generator are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Time domain, compact support with kinks.
    TimeCompact { support: Interval, kinks: Vec<f64> },
    /// Time domain over the real line.
    TimeLine { hint: DecayHint, kinks: Vec<f64> },
    /// Fourier domain, compactly supported transform.
    FourierCompact { support: Interval, kinks: Vec<f64> },
    /// Fourier domain over the real line.
    FourierLine { hint: DecayHint, kinks: Vec<f64> },
}

/// A generator `phi` with its declared property tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGenerator", into = "RawGenerator")]
pub struct GeneratorSpec {
    kind: GeneratorKind,
    tags: TagSet,
    amplitude: f64,
    samples: Option<SampledFunction>,
    rational: Option<(Vec<f64>, Vec<f64>)>,
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Serialize, Deserialize)]
struct RawGenerator {
    #[serde(flatten)]
    kind: GeneratorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<Tag>>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    amplitude: f64,
}

impl TryFrom<RawGenerator> for GeneratorSpec {
    type Error = Error;
    fn try_from(raw: RawGenerator) -> Result<Self> {
        let spec = GeneratorSpec::new(raw.kind)?.scaled(raw.amplitude)?;
        match raw.tags {
            Some(tags) => spec.with_tags(tags),
            None => Ok(spec),
        }
    }
}

impl From<GeneratorSpec> for RawGenerator {
    fn from(g: GeneratorSpec) -> Self {
        RawGenerator {
            kind: g.kind,
            tags: Some(g.tags.into_iter().collect()),
            amplitude: g.amplitude,
        }
    }
}

fn default_tags(kind: &GeneratorKind, rational_gap: usize) -> Vec<Tag> {
    use Tag::*;
    match kind {
        GeneratorKind::Gaussian => vec![
            Schwartz,
            FasterThanExponentialDecay,
            NoncompactSupport,
            FtAbsUltimatelyDecreasingBothSides,
            FtLeCombination,
            SmoothAllDerivsL1,
        ],
        GeneratorKind::TwoSidedExp { .. } => vec![
            FasterThanPolynomialDecay,
            NoncompactSupport,
            FtAbsUltimatelyDecreasingBothSides,
            FtLeCombination,
        ],
        GeneratorKind::Rational { .. } => {
            let mut t = vec![NoncompactSupport];
            if rational_gap >= 2 {
                t.push(SmoothAllDerivsL1);
            }
            t
        }
        GeneratorKind::Hat | GeneratorKind::Refinement { .. } => vec![CompactSupport],
        GeneratorKind::Sampled { .. } => vec![],
        GeneratorKind::LeCatalog { id } => match id {
            CatalogId::Sech => vec![
                Schwartz,
                NoncompactSupport,
                FtAbsUltimatelyDecreasingBothSides,
                FtLeCombination,
                SmoothAllDerivsL1,
            ],
            CatalogId::SincSquared => vec![FtCompactSupport, NoncompactSupport],
            CatalogId::Shannon => vec![FtCompactSupport, FtVanishesNearZero, NoncompactSupport],
            CatalogId::GammaLogOverCosh => vec![FtLeCombination],
        },
    }
}

fn trim_poly(c: &[f64]) -> Vec<f64> {
    let mut v = c.to_vec();
    while v.last() == Some(&0.0) {
        v.pop();
    }
    v
}

/// Horner evaluation of ascending coefficients.
pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Number of distinct real roots of a polynomial given in ascending powers,
/// by Sturm's theorem.
pub fn real_root_count(c: &[f64]) -> usize {
    let c = trim_poly(c);
    if c.len() <= 1 {
        return 0;
    }
    // descending representation
    let p0: Vec<f64> = c.iter().rev().copied().collect();
    let deg = p0.len() - 1;
    let p1: Vec<f64> = p0[..deg]
        .iter()
        .enumerate()
        .map(|(i, a)| a * (deg - i) as f64)
        .collect();
    let scale = p0.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut seq = vec![p0, p1];
    loop {
        let n = seq.len();
        let r = neg_rem(&seq[n - 2], &seq[n - 1], scale);
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    let lead_signs = |at_neg_inf: bool| -> Vec<f64> {
        seq.iter()
            .map(|p| {
                let d = p.len() - 1;
                let s = p[0].signum();
                if at_neg_inf && d % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect()
    };
    let variations = |s: Vec<f64>| s.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    variations(lead_signs(true)).saturating_sub(variations(lead_signs(false)))
}

/// `-(a mod b)` for descending coefficients, with relative noise removed.
fn neg_rem(a: &[f64], b: &[f64], scale: f64) -> Vec<f64> {
    let mut r = a.to_vec();
    while r.len() >= b.len() {
        let q = r[0] / b[0];
        for (i, bi) in b.iter().enumerate() {
            r[i] -= q * bi;
        }
        r.remove(0);
    }
    let eps = 1e-12 * scale.max(1.0);
    while r.first().is_some_and(|x| x.abs() <= eps) {
        r.remove(0);
    }
    r.iter().map(|x| -x).collect()
}

impl GeneratorSpec {
    /// Builds a generator with its catalog tags.
    pub fn new(kind: GeneratorKind) -> Result<Self> {
        let mut samples = None;
        let mut rational = None;
        let mut gap = 0;
        match &kind {
            GeneratorKind::TwoSidedExp { n } => {
                if *n == 0 {
                    return Err(Error::BadParameter("two_sided_exp needs n >= 1".into()));
                }
            }
            GeneratorKind::Rational {
                numerator,
                denominator,
            } => {
                let p = trim_poly(numerator);
                let q = trim_poly(denominator);
                if p.iter().chain(&q).any(|c| !c.is_finite()) {
                    return Err(Error::BadParameter("rational coefficients must be finite".into()));
                }
                if p.is_empty() {
                    return Err(Error::BadParameter("rational numerator is zero".into()));
                }
                if q.len() <= p.len() {
                    return Err(Error::BadParameter(format!(
                        "rational generator needs deg q > deg p for square integrability (deg p = {}, deg q = {})",
                        p.len() - 1,
                        q.len().saturating_sub(1)
                    )));
                }
                let roots = real_root_count(&q);
                if roots > 0 {
                    return Err(Error::BadParameter(format!(
                        "denominator has {roots} real root(s); the generator would not be square integrable"
                    )));
                }
                gap = q.len() - p.len();
                rational = Some((p, q));
            }
            GeneratorKind::Refinement {
                equation,
                resolution,
                iterations,
                init,
            } => {
                let r = cascade_solve(equation, *resolution, *iterations, *init)?;
                samples = Some(r.function);
            }
            GeneratorKind::Sampled {
                start,
                step,
                values,
            } => {
                samples = Some(SampledFunction::new(*start, *step, values.clone())?);
            }
            GeneratorKind::Gaussian | GeneratorKind::Hat | GeneratorKind::LeCatalog { .. } => {}
        }
        let tags = close_tags(default_tags(&kind, gap))?;
        Ok(Self {
            kind,
            tags,
            amplitude: 1.0,
            samples,
            rational,
        })
    }

    pub fn gaussian() -> Self {
        Self::new(GeneratorKind::Gaussian).expect("catalog generator")
    }

    pub fn hat() -> Self {
        Self::new(GeneratorKind::Hat).expect("catalog generator")
    }

    pub fn catalog(id: CatalogId) -> Self {
        Self::new(GeneratorKind::LeCatalog { id }).expect("catalog generator")
    }

    /// Replaces the declared tags.
    pub fn with_tags(mut self, tags: impl IntoIterator<Item = Tag>) -> Result<Self> {
        self.tags = close_tags(tags)?;
        Ok(self)
    }

    /// The generator multiplied by a nonzero real constant.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::BadParameter(format!(
                "amplitude must be finite and nonzero, got {c}"
            )));
        }
        self.amplitude *= c;
        Ok(self)
    }

    pub fn kind(&self) -> &GeneratorKind {
        &self.kind
    }

    pub fn tags(&self) -> &TagSet {
        &self.tags
    }

    pub fn has(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Cascade or user samples for piecewise-linear kinds.
    pub fn samples(&self) -> Option<&SampledFunction> {
        self.samples.as_ref()
    }

    /// `phi(x)`, when a time-domain formula is available.
    pub fn time_value(&self, x: f64) -> Option<f64> {
        let v = match &self.kind {
            GeneratorKind::Gaussian => (-x * x).exp(),
            GeneratorKind::TwoSidedExp { n } => (-(*n as f64) * x.abs()).exp(),
            GeneratorKind::Rational { .. } => {
                let (p, q) = self.rational.as_ref()?;
                poly_eval(p, x) / poly_eval(q, x)
            }
            GeneratorKind::Hat => (1.0 - (x - 1.0).abs()).max(0.0),
            GeneratorKind::Refinement { .. } | GeneratorKind::Sampled { .. } => {
                self.samples.as_ref()?.eval(x)
            }
            GeneratorKind::LeCatalog { id } => match id {
                CatalogId::Sech => 1.0 / (PI * x).cosh(),
                CatalogId::SincSquared => {
                    let s = sinc(x);
                    s * s
                }
                CatalogId::Shannon => {
                    if x == 0.0 {
                        1.0
                    } else {
                        ((2.0 * PI * x).sin() - (PI * x).sin()) / (PI * x)
                    }
                }
                CatalogId::GammaLogOverCosh => return None,
            },
        };
        Some(self.amplitude * v)
    }

    /// `phi_hat(gamma) = int phi(x) exp(-2 pi i x gamma) dx`, when known in closed form.
    pub fn fourier_value(&self, gamma: f64) -> Option<Complex64> {
        let v = match &self.kind {
            GeneratorKind::Gaussian => Complex64::new(PI.sqrt() * (-PI * PI * gamma * gamma).exp(), 0.0),
            GeneratorKind::TwoSidedExp { n } => {
                let n = *n as f64;
                Complex64::new(2.0 * n / (n * n + 4.0 * PI * PI * gamma * gamma), 0.0)
            }
            GeneratorKind::Hat => {
                let s = sinc(gamma);
                Complex64::from_polar(s * s, -2.0 * PI * gamma)
            }
            GeneratorKind::LeCatalog { id } => Complex64::new(
                match id {
                    CatalogId::Sech => 1.0 / (PI * gamma).cosh(),
                    CatalogId::SincSquared => (1.0 - gamma.abs()).max(0.0),
                    CatalogId::Shannon => {
                        let a = gamma.abs();
                        if (0.5..=1.0).contains(&a) {
                            1.0
                        } else {
                            0.0
                        }
                    }
                    CatalogId::GammaLogOverCosh => {
                        if gamma == 0.0 {
                            0.0
                        } else {
                            gamma * gamma.abs().ln() / (2.0 * gamma.cosh())
                        }
                    }
                },
                0.0,
            ),
            _ => return None,
        };
        Some(v * self.amplitude)
    }

    /// Time-domain support, for compactly supported kinds.
    pub fn time_support(&self) -> Option<Interval> {
        match &self.kind {
            GeneratorKind::Hat => Some(Interval { lo: 0.0, hi: 2.0 }),
            GeneratorKind::Refinement { .. } | GeneratorKind::Sampled { .. } => {
                self.samples.as_ref().map(|s| s.support)
            }
            _ => None,
        }
    }

    /// Integration strategy for inner products.
    pub fn domain(&self) -> Domain {
        match &self.kind {
            GeneratorKind::Gaussian => Domain::TimeLine {
                hint: DecayHint::Gaussian,
                kinks: vec![],
            },
            GeneratorKind::TwoSidedExp { .. } => Domain::TimeLine {
                hint: DecayHint::Exponential,
                kinks: vec![0.0],
            },
            GeneratorKind::Rational { .. } => {
                let (p, q) = self.rational.as_ref().expect("validated at construction");
                Domain::TimeLine {
                    hint: DecayHint::Polynomial(2.0 * (q.len() - p.len()) as f64),
                    kinks: vec![],
                }
            }
            GeneratorKind::Hat => Domain::TimeCompact {
                support: Interval { lo: 0.0, hi: 2.0 },
                kinks: vec![0.0, 1.0, 2.0],
            },
            GeneratorKind::Refinement { .. } | GeneratorKind::Sampled { .. } => {
                let s = self.samples.as_ref().expect("sampled at construction");
                Domain::TimeCompact {
                    support: s.support,
                    kinks: s.nodes(),
                }
            }
            GeneratorKind::LeCatalog { id } => match id {
                CatalogId::Sech => Domain::TimeLine {
                    hint: DecayHint::Exponential,
                    kinks: vec![],
                },
                CatalogId::SincSquared => Domain::FourierCompact {
                    support: Interval { lo: -1.0, hi: 1.0 },
                    kinks: vec![-1.0, 0.0, 1.0],
                },
                CatalogId::Shannon => Domain::FourierCompact {
                    support: Interval { lo: -1.0, hi: 1.0 },
                    kinks: vec![-1.0, -0.5, 0.5, 1.0],
                },
                CatalogId::GammaLogOverCosh => Domain::FourierLine {
                    hint: DecayHint::Exponential,
                    kinks: vec![0.0],
                },
            },
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}
