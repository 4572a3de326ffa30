//! Command-line front end behind the `qcs` binary.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 a state that fails
//! validation, 3 a numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::document::{Axis, StateDocument};
use crate::engine::{self, Diagnostic, QcsReport};
use crate::error::Error;
use crate::oracle::{self, GridSpec};
use crate::state::{GaussianSumState, PhasePoint, Validation};
use crate::states::{self, BreedingSpec, Protocol};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const MAX_TERMS_ENV: &str = "QCS_MAX_TERMS";
/// Finest grid the negativity column may refine to.
pub const NEGATIVITY_MAX_POINTS: usize = 3201;

#[derive(Debug, Parser)]
#[command(
    name = "qcs",
    version,
    about = "Quadrature coherence scale of Gaussian-sum states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Slow,
    Efficient,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Slow => Protocol::Slow,
            ProtocolArg::Efficient => Protocol::Efficient,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print purity, QCS² and diagnostics of a state document as JSON.
    Qcs { spec: PathBuf },
    /// Sweep one parameter and print a CSV table.
    Sweep {
        spec: PathBuf,
        /// eta, alpha, epsilon or r.
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Add a grid-quadrature negativity column.
        #[arg(long)]
        negativity: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// QCS² after 0..=rounds breeding rounds, as CSV.
    Breed {
        /// Fixed amplitude; by default each row uses sqrt(2^(M+1) π).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long)]
        rounds: u32,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump W(x, p) on a grid as CSV.
    Wigner {
        spec: PathBuf,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// One-dimensional slice, e.g. `p=0`.
        #[arg(long)]
        section: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HermiticityViolation { .. } => EXIT_VALIDATION,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Term cap from the environment, defaulting to [`states::DEFAULT_MAX_TERMS`].
pub fn max_terms() -> Result<usize, Failure> {
    match std::env::var(MAX_TERMS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::usage(format!(
                "{MAX_TERMS_ENV} must be a positive integer, got '{v}'"
            ))
        }),
        Err(_) => Ok(states::DEFAULT_MAX_TERMS),
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parse arguments, run, and return the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let cap = max_terms()?;
    match cmd {
        Command::Qcs { spec } => cmd_qcs(&load(&spec)?, cap, stdout),
        Command::Sweep {
            spec,
            param,
            from,
            to,
            steps,
            negativity,
            out,
        } => {
            let axis: Axis = param.parse()?;
            let doc = load(&spec)?;
            let mut buf = Vec::new();
            cmd_sweep(
                &doc, axis, from, to, steps, negativity, cap, &mut buf, stderr,
            )?;
            emit(&buf, out, stdout)
        }
        Command::Breed {
            alpha,
            r,
            rounds,
            protocol,
            out,
        } => {
            let mut buf = Vec::new();
            cmd_breed(alpha, r, rounds, protocol.into(), cap, &mut buf)?;
            emit(&buf, out, stdout)
        }
        Command::Wigner {
            spec,
            half_width,
            points,
            section,
            out,
        } => {
            let doc = load(&spec)?;
            let section = section.map(|s| parse_section(&s)).transpose()?;
            let mut buf = Vec::new();
            cmd_wigner(&doc, half_width, points, section, cap, &mut buf)?;
            emit(&buf, out, stdout)
        }
    }
}

fn load(path: &PathBuf) -> Result<StateDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(StateDocument::parse(&text)?)
}

fn emit(buf: &[u8], out: Option<PathBuf>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(&path, buf)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(buf)
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

fn io(e: std::io::Error) -> Failure {
    Failure::usage(format!("cannot write output: {e}"))
}

fn parse_section(s: &str) -> Result<f64, Failure> {
    let value = s
        .strip_prefix("p=")
        .ok_or_else(|| Failure::usage(format!("section must look like p=VALUE, got '{s}'")))?;
    value
        .parse()
        .map_err(|_| Failure::usage(format!("bad section value '{value}'")))
}

#[derive(Serialize)]
struct QcsOutput<'a> {
    #[serde(flatten)]
    report: &'a QcsReport,
    valid: bool,
}

#[derive(Serialize)]
struct InvalidOutput<'a> {
    valid: bool,
    #[serde(flatten)]
    validation: &'a Validation,
}

pub fn cmd_qcs(doc: &StateDocument, cap: usize, out: &mut dyn Write) -> Result<(), Failure> {
    let state = doc.build_capped(cap)?;
    let validation = state.validate();
    if !validation.is_valid() {
        let text = serde_json::to_string_pretty(&InvalidOutput {
            valid: false,
            validation: &validation,
        })
        .expect("validation serializes");
        writeln!(out, "{text}").map_err(io)?;
        return Err(Failure {
            code: EXIT_VALIDATION,
            message: format!(
                "state fails validation (normalization residual {:.3e}, hermiticity residual {:.3e})",
                validation.normalization_residual, validation.hermiticity_residual
            ),
        });
    }
    let report = engine::qcs(&state)?;
    let text = serde_json::to_string_pretty(&QcsOutput {
        report: &report,
        valid: true,
    })
    .expect("report serializes");
    writeln!(out, "{text}").map_err(io)?;
    Ok(())
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n)
            .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

struct SweepRow {
    value: f64,
    report: QcsReport,
    negativity: Option<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    doc: &StateDocument,
    axis: Axis,
    from: f64,
    to: f64,
    steps: usize,
    negativity: bool,
    cap: usize,
    out: &mut dyn Write,
    log: &mut dyn Write,
) -> Result<(), Failure> {
    if steps == 0 {
        return Err(Failure::usage("--steps must be at least 1"));
    }
    let values = linspace(from, to, steps);
    let rows: Vec<Result<SweepRow, Error>> = values
        .par_iter()
        .map(|&value| {
            let state = doc.with_param(axis, value)?.build_capped(cap)?;
            let report = engine::qcs(&state)?;
            let negativity = if negativity {
                Some(oracle::refined(
                    &oracle::auto_grid(&state)?,
                    NEGATIVITY_MAX_POINTS,
                    |g| oracle::negativity_volume(&state, g),
                )?)
            } else {
                None
            };
            Ok(SweepRow {
                value,
                report,
                negativity,
            })
        })
        .collect();
    let mut header = format!("{},qcs_squared,purity", axis.name());
    if negativity {
        header.push_str(",negativity");
    }
    writeln!(out, "{header}").map_err(io)?;
    for row in rows {
        let row = row?;
        let mut line = format!(
            "{},{},{}",
            fmt_float(row.value),
            fmt_float(row.report.qcs_squared),
            fmt_float(row.report.purity)
        );
        if let Some(n) = row.negativity {
            line.push(',');
            line.push_str(&fmt_float(n));
        }
        writeln!(out, "{line}").map_err(io)?;
        report_diagnostics(&row.report.diagnostics, axis.name(), row.value, log);
    }
    Ok(())
}

fn report_diagnostics(diags: &[Diagnostic], name: &str, value: f64, log: &mut dyn Write) {
    for d in diags {
        let text = serde_json::to_string(d).expect("diagnostic serializes");
        let _ = writeln!(log, "warning: {name}={value}: {text}");
    }
}

/// Damping `ε` with `tanh ε = e^{-2r}`, the GKP state whose peaks have the
/// same width as a squeezed vacuum of parameter `r`.
pub fn matched_gkp_epsilon(r: f64) -> f64 {
    (-2.0 * r).exp().atanh()
}

pub fn cmd_breed(
    alpha: Option<f64>,
    r: f64,
    rounds: u32,
    protocol: Protocol,
    cap: usize,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if r <= 0.0 {
        return Err(Failure::usage("--r must be positive"));
    }
    let reference =
        engine::qcs(&states::GkpSpec::zero(matched_gkp_epsilon(r)).build_capped(cap)?)?.qcs_squared;
    let specs: Vec<BreedingSpec> = (0..=rounds)
        .map(|m| {
            BreedingSpec::new(
                alpha.unwrap_or_else(|| BreedingSpec::gkp_amplitude(m)),
                r,
                m,
                protocol,
            )
        })
        .collect();
    for s in &specs {
        let terms = s.term_count()?;
        if terms > cap as u64 {
            return Err(Error::TermCapExceeded {
                terms: terms as usize,
                cap,
            }
            .into());
        }
    }
    let rows: Vec<Result<(BreedingSpec, QcsReport), Error>> = specs
        .into_iter()
        .map(|s| Ok((s, engine::qcs(&s.build_capped(cap)?)?)))
        .collect();
    writeln!(out, "rounds,alpha,qcs_squared,purity,n_terms,gkp_reference").map_err(io)?;
    for row in rows {
        let (s, rep) = row?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.rounds,
            fmt_float(s.alpha),
            fmt_float(rep.qcs_squared),
            fmt_float(rep.purity),
            rep.n_terms,
            fmt_float(reference)
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn cmd_wigner(
    doc: &StateDocument,
    half_width: Option<f64>,
    points: Option<usize>,
    section: Option<f64>,
    cap: usize,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let state = doc.build_capped(cap)?;
    let grid = wigner_grid_for(&state, half_width, points)?;
    let rows = oracle::wigner_grid(&state, &grid, section)?;
    writeln!(out, "x,p,w").map_err(io)?;
    for [x, p, w] in rows {
        writeln!(out, "{},{},{}", fmt_float(x), fmt_float(p), fmt_float(w)).map_err(io)?;
    }
    Ok(())
}

fn wigner_grid_for(
    state: &GaussianSumState,
    half_width: Option<f64>,
    points: Option<usize>,
) -> Result<GridSpec, Failure> {
    let auto = oracle::auto_grid(state)?;
    let center = if half_width.is_some() {
        PhasePoint::xp(0.0, 0.0)
    } else {
        auto.center.clone()
    };
    Ok(GridSpec::new(
        half_width.unwrap_or(auto.half_width),
        points.unwrap_or(auto.points_per_axis),
        center,
    )?)
}
