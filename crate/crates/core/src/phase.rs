//! θ-sweeps over the phase diagram and their flat-file encodings.

use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremality::{classify_all, classify_mu0, ExtremalityVerdict, Verdict};
use crate::model::{check_order, check_theta, Branch};
use crate::tisgm::{theta_cr, CRITICAL_TOL};

pub const CSV_HEADER: &str = "k,theta,theta_cr,branch,x,y,s2,kappa,ks_value,msw_value,verdict";

/// A verdict column entry. Grid points within [`CRITICAL_TOL`] of `θ_cr` are
/// marked `critical` instead of classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointVerdict {
    Extreme,
    NonExtreme,
    Undetermined,
    Critical,
}

impl From<Verdict> for PointVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Extreme => PointVerdict::Extreme,
            Verdict::NonExtreme => PointVerdict::NonExtreme,
            Verdict::Undetermined => PointVerdict::Undetermined,
        }
    }
}

/// One solution at one grid point; the CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseRow {
    pub k: u32,
    pub theta: f64,
    pub theta_cr: f64,
    pub branch: Branch,
    pub x: f64,
    pub y: f64,
    pub s2: f64,
    pub kappa: f64,
    pub ks_value: f64,
    pub msw_value: f64,
    pub verdict: PointVerdict,
}

/// Everything known at one `(k, θ)`: one row per solution, ordered
/// Symmetric, Upper, Lower.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub k: u32,
    pub theta: f64,
    pub theta_cr: f64,
    pub rows: Vec<PhaseRow>,
}

impl PhaseRecord {
    pub fn at(k: u32, theta: f64, boundary_tol: f64) -> Result<Self> {
        check_order(k)?;
        check_theta(theta)?;
        let theta_cr = theta_cr(k)?;
        let row = |v: &ExtremalityVerdict, verdict: PointVerdict| PhaseRow {
            k,
            theta,
            theta_cr,
            branch: v.solution.branch,
            x: v.solution.x,
            y: v.solution.y,
            s2: v.s2,
            kappa: v.kappa,
            ks_value: v.ks_value,
            msw_value: v.msw_value,
            verdict,
        };
        let rows = if (theta - theta_cr).abs() < CRITICAL_TOL {
            vec![row(&classify_mu0(k, theta, boundary_tol)?, PointVerdict::Critical)]
        } else {
            classify_all(k, theta, boundary_tol)?
                .iter()
                .map(|v| row(v, v.verdict.into()))
                .collect()
        };
        Ok(Self { k, theta, theta_cr, rows })
    }

    pub fn row(&self, branch: Branch) -> Option<&PhaseRow> {
        self.rows.iter().find(|r| r.branch == branch)
    }
}

/// `steps` uniformly spaced points from `theta_min` to `theta_max`, both included.
pub fn grid(theta_min: f64, theta_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(theta_min > 0.0 && theta_min < theta_max && theta_max.is_finite()) {
        return Err(Error::Domain(format!(
            "sweep needs 0 < theta_min < theta_max, got [{theta_min}, {theta_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::Domain(format!("sweep needs steps >= 2, got {steps}")));
    }
    let h = (theta_max - theta_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| if i == steps - 1 { theta_max } else { theta_min + i as f64 * h })
        .collect())
}

/// Classifies every grid point in parallel; records come back in grid order.
pub fn sweep(k: u32, theta_min: f64, theta_max: f64, steps: usize, boundary_tol: f64) -> Result<Vec<PhaseRecord>> {
    check_order(k)?;
    grid(theta_min, theta_max, steps)?
        .into_par_iter()
        .map(|theta| PhaseRecord::at(k, theta, boundary_tol))
        .collect()
}

/// Output encoding of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    /// One JSON object per record per line.
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Domain(format!("unknown format {other:?}"))),
        }
    }
}

/// Writes the header and one row per solution. Floats are written as the
/// shortest decimal that parses back to the same value.
pub fn write_csv<W: Write>(records: &[PhaseRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in records.iter().flat_map(|r| &r.rows) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_csv`]: consecutive rows sharing `(k, θ)` form one record.
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<PhaseRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Domain(format!("unexpected CSV header {:?}", header.join(","))));
    }
    let mut records: Vec<PhaseRecord> = Vec::new();
    for row in rdr.deserialize() {
        let row: PhaseRow = row?;
        match records.last_mut() {
            Some(r) if r.k == row.k && r.theta.to_bits() == row.theta.to_bits() => r.rows.push(row),
            _ => records.push(PhaseRecord { k: row.k, theta: row.theta, theta_cr: row.theta_cr, rows: vec![row] }),
        }
    }
    Ok(records)
}

pub fn write_json_lines<W: Write>(records: &[PhaseRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_json_lines<R: BufRead>(input: R) -> Result<Vec<PhaseRecord>> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

pub fn write_records<W: Write>(records: &[PhaseRecord], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(records, out),
        Format::Json => write_json_lines(records, out),
    }
}

/// Grid values where the μ0 verdict changes, as `(θ before, θ after)`.
pub fn mu0_flips(records: &[PhaseRecord]) -> Vec<(f64, f64)> {
    records
        .windows(2)
        .filter_map(|w| {
            let a = w[0].row(Branch::Symmetric)?.verdict;
            let b = w[1].row(Branch::Symmetric)?.verdict;
            (a != b).then_some((w[0].theta, w[1].theta))
        })
        .collect()
}
