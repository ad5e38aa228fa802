use std::fs;
use std::path::Path;

use fws_core::bernoulli::{verdict_report, BernoulliModel};
use fws_core::format::{format_g17, write_complex_csv, write_real_csv};
use fws_core::numerics::CMatrix;
use fws_core::refinement::{
    cascade_solve, estimate_regularity, preset, regularity_upper_bound, solve_fourier,
    uniform_grid, validate_equation, CascadeInit, FourierProfile, Preset, RegularityEstimate,
    TwoScaleEquation,
};
use fws_core::wavelet::{
    all_checklists, analyze, certify, gram, ChecklistItem, Outcome, RuleId, WaveletSystem,
};
use fws_core::{Complex64, Error};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{Cli, CommonArgs, Command, EquationArgs, ErrorReport, Failure, Format, Init};

/// Largest grid accepted by the grid-producing commands.
const MAX_GRID_POINTS: usize = 10_000_000;

const NUMERIC_NOTE: &str = "numerical evidence from the Gram spectrum, not a proof";
const CERTIFIED_NOTE: &str = "matched an independence rule from the declared generator tags";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineSolveOutput {
    #[serde(flatten)]
    pub profile: FourierProfile,
    /// Present when the grid covers enough dyadic annuli for a slope fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity_estimate: Option<RegularityEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernoulliFourierOutput {
    pub alpha: f64,
    pub tol: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOutput {
    pub n: u32,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleChecklist {
    pub rule_id: RuleId,
    pub citation: String,
    pub matched: bool,
    pub checklist: Vec<ChecklistItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyOutput {
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<RuleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    /// Every rule in priority order with its hypothesis checklist.
    pub rules: Vec<RuleChecklist>,
}

/// Flat verdict report for `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub outcome: String,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_id: Option<RuleId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checklist: Option<Vec<ChecklistItem>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null_vector: Option<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<CMatrix>,
}

pub(crate) fn execute(cli: &Cli) -> Result<String, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::RefineSolve { equation, gamma_max, resolution } => {
            let eq = load_equation(equation, c)?;
            let grid = symmetric_grid(*gamma_max, *resolution)?;
            let profile = solve_fourier(&eq, &grid, c.tol)?;
            match c.format {
                Format::Csv => csv(|out| write_complex_csv(out, &profile.grid, &profile.values)),
                Format::Json => {
                    let regularity_estimate = estimate_regularity(&profile).ok();
                    json(&RefineSolveOutput { profile, regularity_estimate })
                }
            }
        }
        Command::RefineBound { equation } => {
            json_only(c, "refine-bound")?;
            let eq = load_equation(equation, c)?;
            json(&regularity_upper_bound(&eq)?)
        }
        Command::RefineValidate { equation } => {
            json_only(c, "refine-validate")?;
            let eq = load_equation(equation, c)?;
            json(&validate_equation(&eq))
        }
        Command::RefineCascade { equation, resolution, iterations, init } => {
            let eq = load_equation(equation, c)?;
            let init = match init {
                Init::Indicator => CascadeInit::Indicator,
                Init::Hat => CascadeInit::Hat,
            };
            let r = cascade_solve(&eq, *resolution, *iterations, init)?;
            match c.format {
                Format::Csv => csv(|out| write_real_csv(out, &r.function.nodes(), &r.function.values)),
                Format::Json => json(&r),
            }
        }
        Command::BernoulliFourier { alpha, gamma_max, resolution } => {
            let model = BernoulliModel::new(*alpha)?;
            let grid = symmetric_grid(*gamma_max, *resolution)?;
            let values: Vec<f64> = grid.iter().map(|&g| model.fourier(g, c.tol)).collect();
            match c.format {
                Format::Csv => {
                    let cv: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                    csv(|out| write_complex_csv(out, &grid, &cv))
                }
                Format::Json => json(&BernoulliFourierOutput { alpha: *alpha, tol: c.tol, grid, values }),
            }
        }
        Command::BernoulliDensity { alpha, depth, bins } => {
            let h = BernoulliModel::new(*alpha)?.density(*depth, *bins)?;
            match c.format {
                Format::Csv => csv(|out| h.write_csv(out)),
                Format::Json => json(&h),
            }
        }
        Command::BernoulliThreshold { n } => {
            json_only(c, "bernoulli-threshold")?;
            json(&ThresholdOutput { n: *n, threshold: fws_core::bernoulli::threshold(*n) })
        }
        Command::BernoulliVerdict { alpha, n } => {
            json_only(c, "bernoulli-verdict")?;
            json(&verdict_report(&BernoulliModel::new(*alpha)?, *n))
        }
        Command::Gram => {
            let system = load_system(c)?;
            let report = gram(&system, c.tol)?;
            match c.format {
                Format::Csv => csv(|out| {
                    use std::io::Write;
                    writeln!(out, "row,col,re,im")?;
                    let m = &report.matrix;
                    for i in 0..m.dim() {
                        for j in 0..m.dim() {
                            let z = m[(i, j)];
                            writeln!(out, "{i},{j},{},{}", format_g17(z.re), format_g17(z.im))?;
                        }
                    }
                    Ok(())
                }),
                Format::Json => json(&report),
            }
        }
        Command::Certify => {
            json_only(c, "certify")?;
            let system = load_system(c)?;
            json(&certify_output(&system))
        }
        Command::Analyze => {
            json_only(c, "analyze")?;
            let system = load_system(c)?;
            json(&analyze_output(&system, c.tol)?)
        }
    }
}

pub(crate) fn certify_output(system: &WaveletSystem) -> CertifyOutput {
    let cert = certify(system);
    let matched = cert.as_ref().map(|c| c.rule_id);
    CertifyOutput {
        certified: cert.is_some(),
        rule_id: matched,
        citation: cert.map(|c| c.citation),
        rules: all_checklists(system)
            .into_iter()
            .map(|(rule, checklist)| RuleChecklist {
                rule_id: rule,
                citation: rule.citation().to_string(),
                matched: matched == Some(rule),
                checklist,
            })
            .collect(),
    }
}

pub(crate) fn analyze_output(system: &WaveletSystem, tol: f64) -> Result<AnalyzeOutput, Error> {
    let v = analyze(system, tol)?;
    let mut out = AnalyzeOutput {
        outcome: v.outcome.name().to_string(),
        note: NUMERIC_NOTE.to_string(),
        rule_id: None,
        citation: None,
        checklist: None,
        relative_gap: None,
        quad_error: None,
        sigma_min: None,
        sigma_max: None,
        null_vector: None,
        gram: None,
    };
    match v.outcome {
        Outcome::IndependentCertified { certificate } => {
            out.note = CERTIFIED_NOTE.to_string();
            out.rule_id = Some(certificate.rule_id);
            out.citation = Some(certificate.citation);
            out.checklist = Some(certificate.hypothesis_checklist);
        }
        Outcome::Dependent { null_vector } => out.null_vector = Some(null_vector),
        Outcome::IndependentNumeric | Outcome::Inconclusive => {}
    }
    if let Some(r) = v.evidence {
        out.relative_gap = Some(r.relative_gap);
        out.quad_error = Some(r.quad_error);
        out.sigma_min = Some(r.sigma_min);
        out.sigma_max = Some(r.sigma_max);
        out.gram = Some(r.matrix);
    }
    Ok(out)
}

fn json_only(c: &CommonArgs, command: &str) -> Result<(), Failure> {
    match c.format {
        Format::Json => Ok(()),
        Format::Csv => Err(Failure::Usage(format!("{command} has no CSV output; use --format json"))),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| {
        Failure::Domain(ErrorReport {
            error: "Serialization".into(),
            message: e.to_string(),
            line: None,
            column: None,
        })
    })?;
    s.push('\n');
    Ok(s)
}

fn csv(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<String, Failure> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| io_failure(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| io_failure(e.to_string()))
}

fn io_failure(message: String) -> Failure {
    Failure::Domain(ErrorReport { error: "Io".into(), message, line: None, column: None })
}

fn symmetric_grid(gamma_max: f64, resolution: f64) -> Result<Vec<f64>, Failure> {
    let cells = (2.0 * gamma_max / resolution).round();
    if !(cells >= 1.0 && cells < MAX_GRID_POINTS as f64) {
        return Err(Error::BadParameter(format!(
            "grid of {cells} cells from gamma_max={gamma_max}, resolution={resolution} is outside 1..{MAX_GRID_POINTS}"
        ))
        .into());
    }
    Ok(uniform_grid(-gamma_max, gamma_max, cells as usize + 1))
}

fn load_equation(args: &EquationArgs, c: &CommonArgs) -> Result<TwoScaleEquation, Failure> {
    match (&args.preset, &c.input) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either --preset or --input, not both".into())),
        (None, None) => Err(Failure::Usage("an equation is required: --preset NAME or --input FILE".into())),
        (Some(name), None) => {
            let p: Preset = name.parse()?;
            Ok(preset(p)?)
        }
        (None, Some(path)) => read_json(path),
    }
}

fn load_system(c: &CommonArgs) -> Result<WaveletSystem, Failure> {
    match &c.input {
        Some(path) => read_json(path),
        None => Err(Failure::Usage("a wavelet system is required: --input FILE".into())),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| io_failure(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let kind = if e.is_data() { "InvalidInput" } else { "ParseError" };
        // validation failures raised after parsing carry no position
        let located = e.line() > 0;
        Failure::Domain(ErrorReport {
            error: kind.into(),
            message: format!("{}: {e}", path.display()),
            line: located.then(|| e.line()),
            column: located.then(|| e.column()),
        })
    })
}
