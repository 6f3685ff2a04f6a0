use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { got: usize, need: usize },

    #[error("degenerate curve: total length {length:e} below floor {floor:e}")]
    DegenerateCurve { length: f64, floor: f64 },

    #[error("biregularity lost at every record (curvature below {floor:e})")]
    BiregularityLost { floor: f64 },

    #[error("no admissible psi root at s = {s}")]
    NoAdmissibleRoot { s: f64 },

    #[error("psi'' singular at the boundary psi = rho*kappa (radicand {radicand:e})")]
    SingularAtBoundary { radicand: f64 },

    #[error("residual has no interior minimum on [{lo}, {hi}]; widen the radius range")]
    NoMinimum { lo: f64, hi: f64 },

    #[error("|tau| = {tau} exceeds the constant-curvature bound 3/(2 rho) = {bound}")]
    TorsionBoundViolated { tau: f64, bound: f64 },

    #[error("integrand vanishes on the integration path: turning point at s = {s}, tau = {tau}")]
    IntegrandSingular { s: f64, tau: f64 },

    #[error("exact constant-curvature solution needs rho*kappa0 = 1, got {rho_kappa}")]
    ExactFormInapplicable { rho_kappa: f64 },

    #[error("negative radicand {0:e}")]
    RadicandNegative(f64),

    #[error("Lancret relation needs constant tau/kappa (spread {spread:e})")]
    NotLancret { spread: f64 },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
