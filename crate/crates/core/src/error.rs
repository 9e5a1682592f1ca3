use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1")]
    PoleAt1,

    #[error("point sigma = {sigma}, t = {t} is outside the supported window ({detail})")]
    UnsupportedRange { sigma: f64, t: f64, detail: String },

    #[error("branch of log zeta is obstructed at sigma = {sigma}, t = {t}: {detail}")]
    BranchObstruction { sigma: f64, t: f64, detail: String },

    #[error("evaluation failed: {0}")]
    EvalFailure(String),

    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error("{path}: line {line}: ordinate {value} does not exceed the previous ordinate {previous}")]
    Monotonicity { path: PathBuf, line: usize, value: f64, previous: f64 },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {error:e} exceeds {tol:e}")]
    QuadratureNonconvergence { a: f64, b: f64, error: f64, tol: f64 },

    #[error("height {t} exceeds the zero table coverage {coverage}")]
    TableCoverage { t: f64, coverage: f64 },

    #[error("sieve limit {limit} outside [{min}, {max}]")]
    LimitExceeded { limit: u64, min: u64, max: u64 },

    #[error("polylogarithm argument |z| = {modulus} exceeds {max}")]
    ConvergenceDomain { modulus: f64, max: f64 },

    #[error("cutoff X = {x} exceeds the prime table limit {limit}")]
    CutoffExceeded { x: f64, limit: u64 },

    #[error("{skipped} of {total} grid points fell in guard zones (more than 20%)")]
    TooFewSamples { skipped: usize, total: usize },

    #[error("need at least three radii, got {0}")]
    TooFewRadii(usize),

    #[error("largest radius {max} exceeds the sum of the others {rest} (dominance condition)")]
    DominanceViolation { max: f64, rest: f64 },

    #[error("target modulus {modulus} exceeds the total radius {total}")]
    TargetOutsideDisk { modulus: f64, total: f64 },

    #[error("circumradius root finding failed on bracket [{lo:e}, {hi:e}]: {detail}")]
    RootFindFailure { lo: f64, hi: f64, detail: String },

    #[error("prime window exhausted at limit {limit}: {detail}")]
    WindowExhausted { limit: u64, detail: String },

    #[error("search budget exceeded: {requested} > {allowed}")]
    BudgetExceeded { requested: u64, allowed: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
