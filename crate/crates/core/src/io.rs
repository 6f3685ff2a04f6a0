//! File formats: point and profile CSV, report and fit JSON.
//!
//! Point files have columns `t,x,y,z` (`t` optional), an optional header
//! row and `#` comment lines. Reports carry a `"schema": 1` field.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cylinder_fit::FitResult;
use crate::cylinder_test::{CylindricityReport, RadiusSearch, TrackBreak, Verdict};
use crate::error::{Error, Result};
use crate::frenet::{CurveSamples, InvariantProfile, InvariantRecord, ProfileMeta};
use crate::vec3::Vec3;

pub const SCHEMA: u32 = 1;

const PROFILE_COLUMNS: [&str; 6] = ["s", "kappa", "kappa1", "kappa2", "tau", "tau1"];

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r)
}

/// Rows of a numeric CSV with an optional header; returns the header
/// (lowercased) and `(line, values)` per data row.
fn numeric_rows<R: Read>(r: R) -> Result<(Option<Vec<String>>, Vec<(usize, Vec<f64>)>)> {
    let mut header = None;
    let mut rows = Vec::new();
    for (i, rec) in reader(r).records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                if let Some(bad) = v.iter().position(|x| !x.is_finite()) {
                    return Err(Error::Parse {
                        line,
                        msg: format!("non-finite value in column {}", bad + 1),
                    });
                }
                rows.push((line, v));
            }
            Err(e) if header.is_none() && rows.is_empty() => {
                let names: Vec<String> = rec.iter().map(|f| f.to_ascii_lowercase()).collect();
                if names.iter().any(|n| n.parse::<f64>().is_ok()) {
                    return Err(Error::Parse {
                        line,
                        msg: e.to_string(),
                    });
                }
                header = Some(names);
            }
            Err(e) => {
                return Err(Error::Parse {
                    line,
                    msg: e.to_string(),
                })
            }
        }
    }
    Ok((header, rows))
}

fn column_map(
    header: &Option<Vec<String>>,
    wanted: &[&str],
    width: usize,
    line: usize,
) -> Result<Vec<Option<usize>>> {
    match header {
        Some(h) => Ok(wanted
            .iter()
            .map(|w| h.iter().position(|n| n == w))
            .collect()),
        None => {
            // positional: trailing columns are the required ones
            let skip = wanted
                .len()
                .checked_sub(width)
                .ok_or_else(|| Error::Parse {
                    line,
                    msg: format!("expected at most {} columns, got {width}", wanted.len()),
                })?;
            Ok((0..wanted.len()).map(|i| i.checked_sub(skip)).collect())
        }
    }
}

/// Reads a point file.
pub fn read_points<R: Read>(r: R, label: &str) -> Result<CurveSamples<f64>> {
    let (header, rows) = numeric_rows(r)?;
    let first_line = rows.first().map_or(1, |r| r.0);
    let width = rows.first().map_or(3, |r| r.1.len());
    let cols = column_map(&header, &["t", "x", "y", "z"], width, first_line)?;
    if cols[1..].iter().any(Option::is_none) {
        return Err(Error::Parse {
            line: 1,
            msg: "missing x, y or z column".into(),
        });
    }
    let mut points = Vec::with_capacity(rows.len());
    let mut params = cols[0].map(|_| Vec::with_capacity(rows.len()));
    for (line, v) in &rows {
        let get = |c: Option<usize>| {
            c.and_then(|c| v.get(c).copied())
                .ok_or_else(|| Error::Parse {
                    line: *line,
                    msg: format!("expected {width} columns, got {}", v.len()),
                })
        };
        if v.len() != width {
            return Err(Error::Parse {
                line: *line,
                msg: format!("expected {width} columns, got {}", v.len()),
            });
        }
        points.push(Vec3::new(get(cols[1])?, get(cols[2])?, get(cols[3])?));
        if let Some(p) = params.as_mut() {
            p.push(get(cols[0])?);
        }
    }
    CurveSamples::new(points, params, label)
}

pub fn write_points<W: Write>(w: W, samples: &CurveSamples<f64>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    match samples.params() {
        Some(ts) => {
            out.write_record(["t", "x", "y", "z"])?;
            for (t, p) in ts.iter().zip(samples.points()) {
                out.write_record([t, &p.x, &p.y, &p.z].map(|v| v.to_string()))?;
            }
        }
        None => {
            out.write_record(["x", "y", "z"])?;
            for p in samples.points() {
                out.write_record([p.x, p.y, p.z].map(|v| v.to_string()))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(w: W, profile: &InvariantProfile<f64>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(PROFILE_COLUMNS)?;
    for r in profile.records() {
        out.write_record([r.s, r.kappa, r.kappa1, r.kappa2, r.tau, r.tau1].map(|v| v.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a profile file (`s,kappa,kappa1,kappa2,tau,tau1`).
pub fn read_profile<R: Read>(r: R) -> Result<InvariantProfile<f64>> {
    let (header, rows) = numeric_rows(r)?;
    let first_line = rows.first().map_or(1, |r| r.0);
    let cols = column_map(&header, &PROFILE_COLUMNS, PROFILE_COLUMNS.len(), first_line)?;
    if let Some(i) = cols.iter().position(Option::is_none) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("missing column {}", PROFILE_COLUMNS[i]),
        });
    }
    let mut records = Vec::with_capacity(rows.len());
    for (line, v) in &rows {
        let get = |i: usize| {
            v.get(cols[i].unwrap_or(usize::MAX))
                .copied()
                .ok_or_else(|| Error::Parse {
                    line: *line,
                    msg: format!("missing {}", PROFILE_COLUMNS[i]),
                })
        };
        records.push(InvariantRecord::new(
            get(0)?,
            get(1)?,
            get(2)?,
            get(3)?,
            get(4)?,
            get(5)?,
        ));
    }
    InvariantProfile::new(records, ProfileMeta::given())
}

/// One record of an exported report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub s: f64,
    pub psi: Option<f64>,
    pub residual: Option<f64>,
    pub q_residual: Option<f64>,
    pub axis_residual: Option<f64>,
    pub branch: i8,
    pub admissible_count: usize,
}

/// Radius search summary attached to a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub rho_best: f64,
    pub evaluations: usize,
    /// `(rho, objective)` on the coarse grid
    pub grid: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub schema: u32,
    pub rho: f64,
    pub verdict: Verdict,
    pub tol: f64,
    /// `null` when some record has no usable root
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub rootless: usize,
    pub breaks: Vec<TrackBreak<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchSummary>,
    pub records: Vec<ReportRecord>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl ReportJson {
    pub fn from_report(
        report: &CylindricityReport<f64>,
        search: Option<&RadiusSearch<f64>>,
    ) -> Self {
        Self {
            schema: SCHEMA,
            rho: report.rho,
            verdict: report.verdict,
            tol: report.tol,
            max_residual: finite(report.max_residual),
            mean_residual: finite(report.mean_residual),
            rootless: report.rootless,
            breaks: report.breaks.clone(),
            search: search.map(|s| SearchSummary {
                rho_best: s.rho,
                evaluations: s.evaluations,
                grid: s.grid.clone(),
            }),
            records: report
                .records
                .iter()
                .map(|r| ReportRecord {
                    s: r.s,
                    psi: r.best_psi,
                    residual: r.residual,
                    q_residual: r.q_residual,
                    axis_residual: r.axis_residual,
                    branch: r.branch,
                    admissible_count: r.admissible_count,
                })
                .collect(),
        }
    }
}

pub fn write_report_json<W: Write>(w: W, report: &ReportJson) -> Result<()> {
    serde_json::to_writer_pretty(w, report)?;
    Ok(())
}

/// CSV mirror of the report records; missing values are empty cells.
pub fn write_report_csv<W: Write>(w: W, report: &ReportJson) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "s",
        "psi",
        "residual",
        "q_residual",
        "axis_residual",
        "branch",
        "admissible_count",
    ])?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    for r in &report.records {
        out.write_record([
            r.s.to_string(),
            opt(r.psi),
            opt(r.residual),
            opt(r.q_residual),
            opt(r.axis_residual),
            r.branch.to_string(),
            r.admissible_count.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub schema: u32,
    pub axis_point: [f64; 3],
    pub axis_dir: [f64; 3],
    pub radius: f64,
    pub rms: f64,
    pub max: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl From<&FitResult<f64>> for FitJson {
    fn from(f: &FitResult<f64>) -> Self {
        Self {
            schema: SCHEMA,
            axis_point: f.model.axis_point.to_array(),
            axis_dir: f.model.axis_dir.to_array(),
            radius: f.model.radius,
            rms: f.rms_residual,
            max: f.max_residual,
            converged: f.converged,
            iterations: f.iterations,
        }
    }
}
