//! Subcommand front end. `parse_and_dispatch` never touches the process
//! streams directly, so it can be driven from tests.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{
    check_growth, indicator_distance, Approximant, CompositionFunction, GrowthReport, IndicatorDistance, SampleSpec,
};
use crate::geometry::{dyadic_inner_runs, polytope_moment, random_polytope, MomentMatrix, Polytope};
use crate::harness::{cases::alpha_grid, oracle_crosscheck, run_suite, CrosscheckReport, SuiteConfig, SuiteReport};
use crate::io::{self, Geometry};
use crate::valuation::{extract_xi_and_s, moment_of_simple, psi_evaluate, Extraction, ValuationSpec};
use crate::seed;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "valuation-lab", version, about = "Matrix-valued valuations on L^p: moments, evaluation, checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K(h) for a polytope, box, simple function or grid function.
    Moment {
        /// Input document (required).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Evaluate Psi(h) = K(xi o h) + s rho; h = 0 without --input.
    Psi {
        /// Valuation spec document (required).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Run the seeded property suite; exit 1 if any property fails.
    Verify {
        /// Restrict to one dimension (default 2, 3, 4).
        #[arg(long)]
        dim: Option<usize>,
        /// Restrict to one exponent (default 1, 2, 3).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Recover (xi, s) from responses to alpha 1_P and compare with the spec.
    Extract {
        /// Valuation spec document (required).
        #[arg(long)]
        spec: PathBuf,
        /// Probe body P (default unit cube).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Overrides all three acceptance tolerances.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Dyadic inner cube approximation of a polytope and its L^p distance.
    Approx {
        /// Polytope or box document (required).
        #[arg(long)]
        input: PathBuf,
        /// Dyadic cell side 2^-k (required).
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Sample |xi(t)| / |t|^p; exit 1 if the growth bound is violated.
    ProbeGrowth {
        /// A xi document or a spec document carrying one (required).
        #[arg(long)]
        spec: PathBuf,
        /// Exponent to test against (default: the one in the document).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Exact M(P) against Monte Carlo on random polytopes, or on --input.
    Crosscheck {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Number of random targets.
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn input_error(message: impl std::fmt::Display) -> Self {
        let line = message.to_string().lines().next().unwrap_or("").trim().to_string();
        CliOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("valuation-lab: {line}\n"),
        }
    }
}

#[derive(Serialize)]
struct MomentDoc {
    schema_version: u32,
    command: &'static str,
    dim: usize,
    moment: MomentMatrix,
    trace: f64,
}

#[derive(Serialize)]
struct PsiDoc {
    schema_version: u32,
    command: &'static str,
    spec: ValuationSpec,
    psi: MomentMatrix,
}

#[derive(Serialize)]
struct ExtractDoc {
    schema_version: u32,
    command: &'static str,
    spec: ValuationSpec,
    extraction: Extraction,
    max_xi_error: f64,
    s_error: f64,
    tolerances: ExtractTolerances,
    passed: bool,
}

#[derive(Serialize)]
struct ExtractTolerances {
    xi: f64,
    s: f64,
    fit: f64,
}

#[derive(Serialize)]
struct ApproxDoc {
    schema_version: u32,
    command: &'static str,
    delta: f64,
    p: f64,
    cells: u64,
    runs: usize,
    gap: f64,
    moment_error: f64,
    distance: IndicatorDistance,
}

#[derive(Serialize)]
struct GrowthDoc {
    schema_version: u32,
    command: &'static str,
    report: GrowthReport,
}

#[derive(Serialize)]
struct CrosscheckDoc {
    schema_version: u32,
    command: &'static str,
    dim: usize,
    report: CrosscheckReport,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn parse_and_dispatch<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    CliOutput {
                        code: if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 },
                        stdout: e.render().to_string(),
                        stderr: String::new(),
                    }
                }
                _ => {
                    // clap's message up to the usage block, folded onto one line
                    let text = e.render().to_string();
                    let head: Vec<&str> = text.lines().take_while(|l| !l.trim().is_empty()).map(str::trim).collect();
                    CliOutput::input_error(head.join(" ").trim_start_matches("error: "))
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((passed, text, out)) => {
            let stdout = if out == "-" {
                text
            } else {
                if let Err(e) = std::fs::write(&out, &text) {
                    return CliOutput::input_error(Error::Io(format!("{out}: {e}")));
                }
                String::new()
            };
            CliOutput {
                code: if passed { 0 } else { 1 },
                stdout,
                stderr: if passed { String::new() } else { "valuation-lab: check failed (see report)\n".into() },
            }
        }
        Err(e) => CliOutput::input_error(e),
    }
}

fn read_spec(path: &PathBuf) -> Result<ValuationSpec> {
    io::read(path)
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("--{name} must be positive and finite (got {v})")))
    }
}

/// Returns (passed, document text, destination).
fn dispatch(cmd: Command) -> Result<(bool, String, String)> {
    match cmd {
        Command::Moment { input, out } => {
            let g = Geometry::read(&input)?;
            let m = match g.polytope() {
                Some(p) => polytope_moment(&p),
                None => moment_of_simple(&g.to_simple()),
            };
            let doc = MomentDoc {
                schema_version: SCHEMA_VERSION,
                command: "moment",
                dim: g.dim(),
                trace: m.trace(),
                moment: m,
            };
            Ok((true, io::to_string(&doc)?, out))
        }
        Command::Psi { spec, input, out } => {
            let spec = read_spec(&spec)?;
            let h = match input {
                Some(path) => Geometry::read(&path)?.to_simple(),
                None => crate::functions::SimpleFunction::zero(spec.n),
            };
            let psi = psi_evaluate(&spec, &h)?;
            let doc = PsiDoc {
                schema_version: SCHEMA_VERSION,
                command: "psi",
                spec,
                psi,
            };
            Ok((true, io::to_string(&doc)?, out))
        }
        Command::Verify {
            dim,
            p,
            cases,
            seed,
            out,
        } => {
            let mut config = SuiteConfig {
                master_seed: seed,
                cases_per_property: cases,
                ..SuiteConfig::default()
            };
            if let Some(n) = dim {
                config.dims = vec![n];
            }
            if let Some(p) = p {
                config.p_values = vec![p];
            }
            let report: SuiteReport = run_suite(&config)?;
            Ok((report.passed, io::to_string(&report)?, out))
        }
        Command::Extract { spec, input, tol, out } => {
            let spec = read_spec(&spec)?;
            let body = match input {
                Some(path) => Geometry::read(&path)?
                    .polytope()
                    .ok_or_else(|| Error::InvalidArgument("--input for extract must be a polytope or box".into()))?,
                None => Polytope::unit_cube(spec.n),
            };
            let tolerances = match tol {
                Some(t) => {
                    let t = positive("tol", t)?;
                    ExtractTolerances { xi: t, s: t, fit: t }
                }
                None => ExtractTolerances {
                    xi: 1e-9,
                    s: 1e-10,
                    fit: 1e-10,
                },
            };
            let extraction = extract_xi_and_s(&spec, &alpha_grid(), &body)?;
            let max_xi_error = extraction
                .samples
                .iter()
                .map(|s| (s.xi_hat - spec.xi.eval(s.alpha)).abs())
                .fold(0.0, f64::max);
            let s_error = extraction.s_hat.map_or(0.0, |s| (s - spec.s).abs());
            let passed = max_xi_error <= tolerances.xi
                && s_error <= tolerances.s
                && extraction.max_fit_residual <= tolerances.fit;
            let doc = ExtractDoc {
                schema_version: SCHEMA_VERSION,
                command: "extract",
                spec,
                extraction,
                max_xi_error,
                s_error,
                tolerances,
                passed,
            };
            Ok((passed, io::to_string(&doc)?, out))
        }
        Command::Approx { input, delta, p, out } => {
            let body = Geometry::read(&input)?
                .polytope()
                .ok_or_else(|| Error::InvalidArgument("--input for approx must be a polytope or box".into()))?;
            let inner = dyadic_inner_runs(&body, delta)?;
            let approx = crate::functions::SimpleFunction::from_boxes(1.0, body.dim(), &inner.runs);
            let moment_error = (&moment_of_simple(&approx) - &polytope_moment(&body)).frobenius_norm();
            let distance = indicator_distance(1.0, &Approximant::Boxes(inner.runs.clone()), &body, p, None)?;
            let doc = ApproxDoc {
                schema_version: SCHEMA_VERSION,
                command: "approx",
                delta,
                p,
                cells: inner.cell_count,
                runs: inner.runs.len(),
                gap: inner.gap,
                moment_error,
                distance,
            };
            Ok((true, io::to_string(&doc)?, out))
        }
        Command::ProbeGrowth { spec, p, out } => {
            let xi: CompositionFunction = io::read_xi(&spec)?;
            let p = p.unwrap_or(xi.exponent());
            let report = check_growth(&xi, p, xi.growth_constant(), &SampleSpec::default())?;
            let passed = report.passed();
            let doc = GrowthDoc {
                schema_version: SCHEMA_VERSION,
                command: "probe-growth",
                report,
            };
            Ok((passed, io::to_string(&doc)?, out))
        }
        Command::Crosscheck {
            dim,
            cases,
            seed: master,
            input,
            out,
        } => {
            let targets = match input {
                Some(path) => vec![Geometry::read(&path)?
                    .polytope()
                    .ok_or_else(|| Error::InvalidArgument("--input for crosscheck must be a polytope or box".into()))?],
                None => {
                    if cases == 0 {
                        return Err(Error::InvalidArgument("--cases must be at least 1".into()));
                    }
                    (0..cases as u64)
                        .map(|i| random_polytope(seed::derive(&[master, i]), dim, dim + 1 + (i as usize % 8), 1.0))
                        .collect::<Result<Vec<_>>>()?
                }
            };
            let dim = targets[0].dim();
            let report = oracle_crosscheck(&targets, 1_000_000, master)?;
            let passed = report.passed;
            let doc = CrosscheckDoc {
                schema_version: SCHEMA_VERSION,
                command: "crosscheck",
                dim,
                report,
            };
            Ok((passed, io::to_string(&doc)?, out))
        }
    }
}
