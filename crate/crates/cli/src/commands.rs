use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::process::ExitCode;

use cylcurve::cylinder_fit::{fit_cylinder, FitConfig};
use cylcurve::cylinder_test::{search_radius, track_psi, TestConfig, Verdict};
use cylcurve::frenet::{
    compute_invariants_samples, compute_invariants_spectral, EstimationMethod, InvariantConfig,
};
use cylcurve::io::{self as cio, FitJson, ReportJson};
use cylcurve::special_curves::{
    constcurv_samples, ellipse_samples, helix_samples, viviani_samples, ConstantCurvatureSpec,
    HelixSpec, Sign, VivianiSpec,
};
use cylcurve::{Error, Profile, Result, Samples};

use crate::{AnalyzeArgs, CurveKind, EstimateArgs, FitArgs, GenerateArgs, TestArgs};

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoMinimum { .. } => 1,
        Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => 3,
        Error::TooFewPoints { .. }
        | Error::DegenerateCurve { .. }
        | Error::BiregularityLost { .. } => 4,
        Error::NoAdmissibleRoot { .. } => 5,
        Error::DegenerateConfiguration(_) => 6,
        _ => 2,
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Error::InvalidInput(format!("cannot write {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn estimate_profile(samples: &Samples, e: &EstimateArgs) -> Result<Profile> {
    let config = InvariantConfig {
        window: e.window,
        degree: e.degree,
        ..InvariantConfig::default()
    };
    if e.spectral {
        compute_invariants_spectral(samples, e.max_degree, config.kappa_floor_rel)
    } else {
        compute_invariants_samples(samples, &config)
    }
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn generate(a: &GenerateArgs) -> Result<ExitCode> {
    let samples: Samples = match &a.curve {
        CurveKind::Helix {
            kappa0,
            tau0,
            length,
            n,
        } => helix_samples(&HelixSpec::new(*kappa0, *tau0)?, *length, *n)?,
        CurveKind::Viviani { rho, tmin, tmax, n } => {
            viviani_samples(&VivianiSpec::new(*rho, (*tmin, *tmax))?, *n)?
        }
        CurveKind::Ellipse { a, b, n } => ellipse_samples(*a, *b, *n)?,
        CurveKind::Constcurv {
            rho,
            kappa0,
            c,
            branch,
            smin,
            smax,
            n,
        } => {
            let mut spec = ConstantCurvatureSpec::exact(*rho, *c, Sign::Plus, *branch)?;
            spec.kappa0 = *kappa0;
            constcurv_samples(&spec, (*smin, *smax), *n)?
        }
    };
    let samples = if a.noise > 0.0 {
        samples.with_noise(a.noise, a.seed)?
    } else {
        samples
    };
    let mut out = sink(a.output.as_deref())?;
    cio::write_points(&mut out, &samples)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn diagnostics(profile: &Profile) {
    let recs = profile.records();
    let low = recs.iter().filter(|r| r.low_confidence).count();
    eprintln!(
        "records: {}  excluded (curvature below {:e} or degenerate frame): {}  low confidence: {low}",
        recs.len(),
        profile.meta.kappa_floor,
        profile.meta.excluded.len()
    );
    if let EstimationMethod::Spectral { degree, planar } = profile.meta.method {
        eprintln!("chebyshev degree: {degree}");
        if planar {
            eprintln!("points are planar within the fit residual: torsion set to zero");
        }
    }
    let kmax = recs.iter().fold(0.0f64, |m, r| m.max(r.kappa));
    let tmax = recs.iter().fold(0.0f64, |m, r| m.max(r.tau.abs()));
    if tmax <= 1e-6 * kmax {
        eprintln!("warning: planar curve (max |tau| = {tmax:e})");
    }
}

pub fn analyze(a: &AnalyzeArgs) -> Result<ExitCode> {
    let samples = cio::read_points(open(&a.input)?, &label(&a.input))?;
    let profile = estimate_profile(&samples, &a.estimate)?;
    diagnostics(&profile);
    let mut out = sink(a.output.as_deref())?;
    cio::write_profile(&mut out, &profile)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

/// Reads a profile CSV directly, or estimates one from a point CSV.
fn load_profile(path: &Path, estimate: &EstimateArgs) -> Result<Profile> {
    let mut text = String::new();
    open(path)?.read_to_string(&mut text)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first
        .to_ascii_lowercase()
        .split(',')
        .any(|c| c.trim() == "kappa")
    {
        cio::read_profile(text.as_bytes())
    } else {
        let samples = cio::read_points(text.as_bytes(), &label(path))?;
        let profile = estimate_profile(&samples, estimate)?;
        diagnostics(&profile);
        Ok(profile)
    }
}

pub fn test(a: &TestArgs) -> Result<ExitCode> {
    let mut config = if a.noisy {
        TestConfig::noisy()
    } else {
        TestConfig::analytic()
    };
    if let Some(tol) = a.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "--tol must be positive, got {tol}"
            )));
        }
        config.tol = tol;
    }
    let mut profile = load_profile(&a.input, &a.estimate)?;
    if a.trim > 0 {
        let recs = profile.records();
        if 2 * a.trim >= recs.len() {
            return Err(Error::InvalidInput(format!(
                "--trim {} leaves no records of {}",
                a.trim,
                recs.len()
            )));
        }
        let (lo, hi) = (recs[a.trim].s, recs[recs.len() - 1 - a.trim].s);
        profile = profile.window(lo, hi)?;
    }
    let (report, search) = match (a.rho, a.rho_range.as_deref()) {
        (Some(rho), None) => (track_psi(&profile, rho, &config)?, None),
        (None, Some(&[lo, hi])) => {
            let s = search_radius(&profile, (lo, hi), a.n_grid, &config)?;
            (s.report.clone(), Some(s))
        }
        _ => {
            return Err(Error::InvalidInput(
                "give exactly one of --rho or --rho-range".into(),
            ))
        }
    };
    if report.rootless == report.records.len() {
        return Err(Error::NoAdmissibleRoot {
            s: report.records.first().map_or(0.0, |r| r.s),
        });
    }
    let json = ReportJson::from_report(&report, search.as_ref());
    match &a.output {
        Some(path) => {
            let mut out = sink(Some(path))?;
            cio::write_report_json(&mut out, &json)?;
            out.flush()?;
            let mut csv = sink(Some(&path.with_extension("csv")))?;
            cio::write_report_csv(&mut csv, &json)?;
            csv.flush()?;
        }
        None => {
            let mut out = sink(None)?;
            cio::write_report_json(&mut out, &json)?;
            writeln!(out)?;
            out.flush()?;
        }
    }
    let max = json.max_residual.map_or_else(
        || "none (rootless records)".to_string(),
        |m| format!("{m:e}"),
    );
    eprintln!(
        "rho = {}  max residual = {max}  verdict = {:?}",
        report.rho, report.verdict
    );
    Ok(match report.verdict {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
    })
}

pub fn fit(a: &FitArgs) -> Result<ExitCode> {
    let samples = cio::read_points(open(&a.input)?, &label(&a.input))?;
    let result = fit_cylinder(&samples, None, &FitConfig::default())?;
    let mut out = sink(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &FitJson::from(&result))?;
    writeln!(out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
