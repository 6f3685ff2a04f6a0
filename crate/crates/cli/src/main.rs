//! `cylcurve`: generate test curves, estimate invariant profiles, run the
//! intrinsic cylinder test and fit cylinders to points.
//!
//! Exit codes: 0 success or pass, 1 test fail, 2 bad flags or unusable
//! input, 3 parse failure, 4 degenerate curve, 5 no admissible root at any
//! record, 6 degenerate cylinder configuration.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cylcurve::special_curves::Sign;

#[derive(Debug, Parser)]
#[command(
    name = "cylcurve",
    version,
    about = "Intrinsic cylindricity test for space curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write sample points of a test curve as CSV (t,x,y,z).
    Generate(GenerateArgs),
    /// Estimate the invariant profile of a point file.
    Analyze(AnalyzeArgs),
    /// Run the cylinder test at one radius or search a radius range.
    Test(TestArgs),
    /// Fit a circular cylinder to a point file.
    Fit(FitArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub curve: CurveKind,
    /// Output CSV (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Gaussian noise added to every coordinate.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum CurveKind {
    /// Arc-length helix with curvature kappa0 and torsion tau0.
    Helix {
        #[arg(long)]
        kappa0: f64,
        #[arg(long)]
        tau0: f64,
        #[arg(long, default_value_t = 20.0)]
        length: f64,
        #[arg(long, default_value_t = 400)]
        n: usize,
    },
    /// rho(1 + cos t, sin t, 2 sin(t/2)) on [tmin, tmax].
    Viviani {
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        tmin: f64,
        #[arg(long, default_value_t = std::f64::consts::TAU, allow_negative_numbers = true)]
        tmax: f64,
        #[arg(long, default_value_t = 500)]
        n: usize,
    },
    /// (a cos t, b sin t, 0) over one turn.
    Ellipse {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 400)]
        n: usize,
    },
    /// Constant curvature 1/rho with the closed-form torsion, integrated
    /// through the Frenet equations; `--branch` is the overall torsion sign.
    Constcurv {
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        kappa0: f64,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        branch: Sign,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        smin: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        smax: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Samples per local polynomial fit.
    #[arg(long, default_value_t = 7)]
    pub window: usize,
    /// Degree of the local fit (3 to 5).
    #[arg(long, default_value_t = 5)]
    pub degree: usize,
    /// Fit the whole curve with one Chebyshev series instead of local
    /// windows; much less sensitive to coordinate noise.
    #[arg(long)]
    pub spectral: bool,
    /// Highest Chebyshev degree tried with --spectral (default 2√n).
    #[arg(long, requires = "spectral")]
    pub max_degree: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output profile CSV (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub estimate: EstimateArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Profile CSV (s,kappa,kappa1,kappa2,tau,tau1) or point CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Report JSON; a CSV mirror is written next to it. Stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Test at this radius.
    #[arg(long, conflicts_with = "rho_range")]
    pub rho: Option<f64>,
    /// Search this radius range.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub rho_range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 64)]
    pub n_grid: usize,
    /// Pass threshold on the residual (default 1e-6, or 1e-3 with --noisy).
    #[arg(long)]
    pub tol: Option<f64>,
    /// Defaults tuned for profiles estimated from noisy points.
    #[arg(long)]
    pub noisy: bool,
    /// Drop this many records at each end before testing; estimated
    /// derivatives are least reliable there.
    #[arg(long, default_value_t = 0)]
    pub trim: usize,
    #[command(flatten)]
    pub estimate: EstimateArgs,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output JSON (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Test(a) => commands::test(a),
        Command::Fit(a) => commands::fit(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
