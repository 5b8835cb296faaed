//! The `hcsos` command line.
//!
//! Exit codes: 0 success, 1 computation or domain failure, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chain::{kernel_of, stationary};
use crate::error::{Error, Result};
use crate::extremality::{classify, classify_all, thresholds, ExtremalityVerdict, DEFAULT_BOUNDARY_TOL};
use crate::model::{Measure, ModelParams};
use crate::phase::{sweep, write_records, Format, PhaseRecord};
use crate::sampler::{estimate_marginals, EmpiricalStats, TreeConfig};
use crate::tisgm::{enumerate, iterate_boundary_law, BoundaryLaw, IterationOutcome, SolutionSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hcsos", version, about = "Translation-invariant Gibbs measures of the wand HC-SOS model on Cayley trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the translation-invariant solutions at (k, theta).
    Tisgm(PointArgs),
    /// Classify the extremality of mu0, mu1, mu2 or all of them.
    Classify(ClassifyArgs),
    /// Sweep theta over a grid and write one row per solution.
    Sweep(SweepArgs),
    /// Extremality thresholds for k = 2 and k = 3.
    Thresholds(ThresholdArgs),
    /// Sample the tree-indexed Markov chain and report empirical marginals.
    Simulate(SimulateArgs),
    /// Forward-iterate the boundary-law map for an m+1 state model.
    Iterate(IterateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Csv => Format::Csv,
            OutFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Mu0,
    Mu1,
    Mu2,
    All,
}

impl MeasureArg {
    fn measure(self) -> Option<Measure> {
        match self {
            MeasureArg::Mu0 => Some(Measure::Mu0),
            MeasureArg::Mu1 => Some(Measure::Mu1),
            MeasureArg::Mu2 => Some(Measure::Mu2),
            MeasureArg::All => None,
        }
    }
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {s}"))
    }
}

fn order(s: &str) -> std::result::Result<u32, String> {
    let k: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if k >= 2 {
        Ok(k)
    } else {
        Err(format!("tree order must be >= 2, got {k}"))
    }
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long, value_parser = order)]
    pub k: u32,
    #[arg(long, value_parser = positive_f64)]
    pub theta: f64,
    /// Machine-readable output instead of a table.
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_parser = order)]
    pub k: u32,
    #[arg(long, value_parser = positive_f64)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "all")]
    pub measure: MeasureArg,
    /// Width of the undecided band around the criterion boundaries.
    #[arg(long, value_parser = positive_f64, default_value_t = DEFAULT_BOUNDARY_TOL)]
    pub tol: f64,
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = order)]
    pub k: u32,
    #[arg(long, value_parser = positive_f64)]
    pub theta_min: f64,
    #[arg(long, value_parser = positive_f64)]
    pub theta_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutFormat,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = positive_f64, default_value_t = DEFAULT_BOUNDARY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_parser = order)]
    pub k: u32,
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = order)]
    pub k: u32,
    #[arg(long, value_parser = positive_f64)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "mu0")]
    pub measure: MeasureArg,
    #[arg(long, default_value_t = 4)]
    pub depth: u32,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    /// Highest spin; the model has m+1 states.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, value_parser = order)]
    pub k: u32,
    #[arg(long, value_parser = positive_f64)]
    pub theta: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, value_parser = positive_f64, default_value_t = 1e-12)]
    pub tol: f64,
    /// Starting law z0,...,zm (zm = 1); all ones when absent.
    #[arg(long, value_delimiter = ',')]
    pub init: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
}

/// Parses `args` (program name first) and runs the command, writing to
/// stdout and stderr. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Tisgm(a) => cmd_tisgm(a, out),
        Command::Classify(a) => cmd_classify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Thresholds(a) => cmd_thresholds(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Iterate(a) => cmd_iterate(a, out),
    }
}

fn json_line<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_tisgm(a: &PointArgs, out: &mut dyn Write) -> Result<()> {
    let set = enumerate(a.k, a.theta)?;
    match a.format {
        Some(OutFormat::Json) => json_line(&set, out),
        Some(OutFormat::Csv) => {
            writeln!(out, "k,theta,theta_cr,branch,x,y")?;
            for s in &set.solutions {
                writeln!(out, "{},{},{},{},{},{}", set.k, set.theta, set.theta_cr, s.branch, s.x, s.y)?;
            }
            Ok(())
        }
        None => print_solution_table(&set, out),
    }
}

fn print_solution_table(set: &SolutionSet, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "k = {}, theta = {}, theta_cr = {:.12}", set.k, set.theta, set.theta_cr)?;
    if set.critical {
        writeln!(out, "theta is within 1e-9 of theta_cr: the merging asymmetric roots are not reported")?;
    }
    writeln!(out, "{:<10} {:>24} {:>24} {:>12}", "branch", "x", "y", "residual")?;
    for s in &set.solutions {
        writeln!(out, "{:<10} {:>24.16e} {:>24.16e} {:>12.3e}", s.branch, s.x, s.y, s.residual(set.k, set.theta))?;
    }
    Ok(())
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> Result<()> {
    let verdicts = match a.measure.measure() {
        Some(m) => vec![classify(a.k, a.theta, m, a.tol)?],
        None => classify_all(a.k, a.theta, a.tol)?,
    };
    match a.format {
        Some(OutFormat::Json) => json_line(&verdicts, out),
        Some(OutFormat::Csv) => {
            writeln!(out, "measure,x,y,s2,kappa,gamma,ks_value,msw_value,verdict")?;
            for v in &verdicts {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    v.measure, v.solution.x, v.solution.y, v.s2, v.kappa, v.gamma, v.ks_value, v.msw_value, v.verdict
                )?;
            }
            Ok(())
        }
        None => print_verdict_table(a.k, a.theta, &verdicts, out),
    }
}

fn print_verdict_table(k: u32, theta: f64, verdicts: &[ExtremalityVerdict], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "k = {k}, theta = {theta}")?;
    writeln!(
        out,
        "{:<8} {:>14} {:>14} {:>14} {:>14} {:>14}  verdict",
        "measure", "x", "s2", "kappa", "k*s2^2", "k*kappa*gamma"
    )?;
    for v in verdicts {
        writeln!(
            out,
            "{:<8} {:>14.8e} {:>14.10} {:>14.10} {:>14.10} {:>14.10}  {}",
            v.measure, v.solution.x, v.s2, v.kappa, v.ks_value, v.msw_value, v.verdict
        )?;
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let records: Vec<PhaseRecord> = sweep(a.k, a.theta_min, a.theta_max, a.steps, a.tol)?;
    match &a.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
            write_records(&records, a.format.into(), BufWriter::new(file))
        }
        None => write_records(&records, a.format.into(), out),
    }
}

fn cmd_thresholds(a: &ThresholdArgs, out: &mut dyn Write) -> Result<()> {
    let table = match thresholds(a.k) {
        Ok(t) => t,
        Err(Error::Unsupported(note)) => {
            writeln!(out, "k = {}: {note}", a.k)?;
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    match a.format {
        Some(OutFormat::Json) => json_line(&table, out),
        Some(OutFormat::Csv) => {
            writeln!(out, "name,measure,closed_form,root_found,difference,quoted")?;
            for t in &table.entries {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    t.name, t.measure, t.closed_form, t.root_found, t.difference(), t.quoted
                )?;
            }
            Ok(())
        }
        None => {
            writeln!(out, "k = {}", table.k)?;
            writeln!(
                out,
                "{:<8} {:<8} {:>20} {:>20} {:>11} {:>8}",
                "name", "measure", "closed form", "root found", "difference", "quoted"
            )?;
            for t in &table.entries {
                writeln!(
                    out,
                    "{:<8} {:<8} {:>20.16} {:>20.16} {:>11.2e} {:>8}",
                    t.name, t.measure, t.closed_form, t.root_found, t.difference(), t.quoted
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Serialize)]
struct SimulationReport {
    k: u32,
    theta: f64,
    measure: Measure,
    x: f64,
    y: f64,
    #[serde(flatten)]
    stats: EmpiricalStats,
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let measure = a
        .measure
        .measure()
        .ok_or_else(|| Error::Domain("simulate needs a single measure (mu0, mu1 or mu2)".into()))?;
    let set = enumerate(a.k, a.theta)?;
    let sol = *set
        .get(measure.branch())
        .ok_or_else(|| Error::MeasureAbsent { measure: measure.to_string(), k: a.k, theta: a.theta })?;
    let kern = kernel_of(&sol, a.k, a.theta)?;
    // fail before sampling if the kernel has no stationary law
    stationary(&kern)?;
    let cfg = TreeConfig::new(a.k, a.depth, a.seed)?;
    let stats = estimate_marginals(&kern, &cfg, a.samples)?;
    let report = SimulationReport { k: a.k, theta: a.theta, measure, x: sol.x, y: sol.y, stats };
    match &a.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            json_line(&report, &mut w)?;
            w.flush()?;
            Ok(())
        }
        None => json_line(&report, out),
    }
}

fn cmd_iterate(a: &IterateArgs, out: &mut dyn Write) -> Result<()> {
    let params = ModelParams::new(a.k, a.theta, a.m)?;
    let init = match &a.init {
        Some(z) => BoundaryLaw::new(z.clone())?,
        None => BoundaryLaw::ones(a.m),
    };
    let outcome = iterate_boundary_law(&params, &init, a.max_iter, a.tol)?;
    if a.format == Some(OutFormat::Json) {
        return json_line(&outcome, out);
    }
    match &outcome {
        IterationOutcome::Converged { law, iterations, residual } => {
            writeln!(out, "converged after {iterations} iterations (residual {residual:.3e})")?;
            writeln!(out, "z = {}", join(law.z()))?;
            if a.m == 2 {
                let sol = law.to_solution(a.k)?;
                writeln!(out, "x = {}, y = {} ({})", sol.x, sol.y, sol.branch)?;
            }
        }
        IterationOutcome::Diverged(report) => {
            writeln!(
                out,
                "no convergence after {} iterations (last step {:.3e}{})",
                report.iterations,
                report.last_step,
                if report.escaped { ", escaped to infinity" } else { "" }
            )?;
            for z in &report.tail {
                writeln!(out, "  {}", join(z))?;
            }
        }
    }
    Ok(())
}

fn join(z: &[f64]) -> String {
    z.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}
