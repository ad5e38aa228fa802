//! Command-line frontend for `fws-core`.
//!
//! [`run`] parses arguments, executes one command and returns the process
//! exit code: 0 on success, 1 on domain or input errors (reported as JSON on
//! standard error), 2 on usage errors.

mod commands;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use commands::{
    AnalyzeOutput, BernoulliFourierOutput, CertifyOutput, RefineSolveOutput, RuleChecklist,
    ThresholdOutput,
};

const COMMAND_FLAGS: &str = "\
Command flags:
  refine-solve         --preset | --input, --gamma-max, --resolution
  refine-bound         --preset | --input
  refine-validate      --preset | --input
  refine-cascade       --preset | --input, --resolution, --iterations, --init
  bernoulli-fourier    --alpha, --gamma-max, --resolution
  bernoulli-density    --alpha, --depth, --bins
  bernoulli-threshold  --n
  bernoulli-verdict    --alpha, --n
  gram                 --input
  certify              --input
  analyze              --input";

#[derive(Debug, Parser)]
#[command(
    name = "fws",
    version,
    about = "Refinement equations, Bernoulli convolutions and finite wavelet systems",
    propagate_version = true,
    after_help = COMMAND_FLAGS
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON input file (equation or wavelet system)
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output file (default: standard output)
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Tolerance
    #[arg(long, global = true, default_value_t = 1e-8, value_parser = positive_f64)]
    pub tol: f64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for parallel evaluation (output does not depend on it)
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct EquationArgs {
    /// Named equation: rham, hat, bernoulli:<lambda>
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier transform of the solution by the infinite mask product
    RefineSolve {
        #[command(flatten)]
        equation: EquationArgs,
        /// Grid covers [-gamma_max, gamma_max]
        #[arg(long, default_value_t = 8.0, value_parser = positive_f64)]
        gamma_max: f64,
        /// Grid spacing
        #[arg(long, default_value_t = 1.0 / 16.0, value_parser = positive_f64)]
        resolution: f64,
    },
    /// Upper bound on the Hoelder exponent from the endpoint coefficients
    RefineBound {
        #[command(flatten)]
        equation: EquationArgs,
    },
    /// Necessary conditions and two-term classification
    RefineValidate {
        #[command(flatten)]
        equation: EquationArgs,
    },
    /// Cascade (fixed-point) iteration on a uniform grid
    RefineCascade {
        #[command(flatten)]
        equation: EquationArgs,
        /// Grid spacing
        #[arg(long, default_value_t = 1.0 / 1024.0, value_parser = positive_f64)]
        resolution: f64,
        #[arg(long, default_value_t = 15)]
        iterations: usize,
        /// Starting function
        #[arg(long, value_enum, default_value_t = Init::Indicator)]
        init: Init,
    },
    /// Fourier transform of the Bernoulli convolution on a grid
    BernoulliFourier {
        #[arg(long, value_parser = positive_f64)]
        alpha: f64,
        /// Grid covers [-gamma_max, gamma_max]
        #[arg(long, default_value_t = 10.0, value_parser = positive_f64)]
        gamma_max: f64,
        /// Grid spacing
        #[arg(long, default_value_t = 0.05, value_parser = positive_f64)]
        resolution: f64,
    },
    /// Exact histogram of the depth-truncated Bernoulli convolution
    BernoulliDensity {
        #[arg(long, value_parser = positive_f64)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        depth: u32,
        #[arg(long, default_value_t = 64)]
        bins: usize,
    },
    /// Smoothness threshold 2^(-1/(n+1))
    BernoulliThreshold {
        #[arg(long)]
        n: u32,
    },
    /// Whether C^n smoothness is ruled out for a given alpha
    BernoulliVerdict {
        #[arg(long, value_parser = positive_f64)]
        alpha: f64,
        #[arg(long)]
        n: u32,
    },
    /// Gram matrix of a wavelet system with its spectrum
    Gram,
    /// Match the system against the independence rules
    Certify,
    /// Certificate engine, falling back to the numeric Gram verdict
    Analyze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Init {
    Indicator,
    Hat,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("expected a positive finite number, got {s}"))
    }
}

/// Failure of a command after argument parsing.
#[derive(Debug)]
pub enum Failure {
    /// Semantic usage problem (exit 2).
    Usage(String),
    /// Domain or input error (exit 1).
    Domain(ErrorReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ErrorReport {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl From<fws_core::Error> for Failure {
    fn from(e: fws_core::Error) -> Self {
        Failure::Domain(ErrorReport {
            error: e.kind().to_string(),
            message: e.to_string(),
            line: None,
            column: None,
        })
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI with explicit output streams; `argv[0]` is the program name.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                2
            } else {
                let _ = write!(stdout, "{}", e.render());
                0
            };
            return code;
        }
    };
    let result = match cli.common.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| commands::execute(&cli)),
            Err(e) => Err(Failure::Domain(ErrorReport {
                error: "ThreadPool".into(),
                message: e.to_string(),
                line: None,
                column: None,
            })),
        },
        None => commands::execute(&cli),
    };
    let text = match result {
        Ok(text) => text,
        Err(failure) => return report_failure(failure, stderr),
    };
    match &cli.common.output {
        Some(path) => match std::fs::write(path, text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => report_failure(
                Failure::Domain(ErrorReport {
                    error: "Io".into(),
                    message: format!("cannot write {}: {e}", path.display()),
                    line: None,
                    column: None,
                }),
                stderr,
            ),
        },
        None => match stdout.write_all(text.as_bytes()) {
            Ok(()) => 0,
            Err(_) => 1,
        },
    }
}

fn report_failure(failure: Failure, stderr: &mut dyn Write) -> i32 {
    match failure {
        Failure::Usage(msg) => {
            let _ = writeln!(stderr, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Failure::Domain(report) => {
            let json = serde_json::to_string(&report).unwrap_or_else(|_| report.message.clone());
            let _ = writeln!(stderr, "{json}");
            1
        }
    }
}
