//! Crate-wide error type.

use std::path::PathBuf;

/// Errors surfaced by the laboratory's operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("gamma pole at z = {re} + {im}i (non-positive integer)")]
    GammaPole { re: f64, im: f64 },

    #[error("chi(s) singular at s = {re} + {im}i: {what}")]
    ChiSingular { re: f64, im: f64, what: &'static str },

    #[error("zeta pole at s = 1")]
    ZetaPole,

    #[error("{op}: argument {name} = {value} outside domain ({constraint})")]
    Domain {
        op: &'static str,
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("bump knots must satisfy a < b <= c < d, got ({a}, {b}, {c}, {d})")]
    BumpKnots { a: f64, b: f64, c: f64, d: f64 },

    #[error("|y| = {y} below the singular floor {floor} for the gamma-factor product")]
    SingularFloor { y: f64, floor: f64 },

    #[error("tail envelope of {what} not integrable at sigma = {sigma}: requires {constraint}")]
    Envelope {
        what: &'static str,
        sigma: f64,
        constraint: String,
    },

    #[error("s = {re} + {im}i within the pole guard |s-1| >= {guard}")]
    PoleGuard { re: f64, im: f64, guard: f64 },

    #[error("sample grid step {step} below the cache quantum {quantum}")]
    StepTooFine { step: f64, quantum: f64 },

    #[error("cache file {path}: {what}")]
    CacheFormat { path: PathBuf, what: String },

    #[error("cache does not cover [{lo}, {hi}]: missing [{missing_lo}, {missing_hi}]")]
    CacheCoverage {
        lo: f64,
        hi: f64,
        missing_lo: f64,
        missing_hi: f64,
    },

    #[error("spectral data {path}, row {row}: {what}")]
    SpectralData {
        path: PathBuf,
        row: usize,
        what: String,
    },

    #[error("spectral query window [{lo}, {hi}] outside coverage [{cov_lo}, {cov_hi}]")]
    SpectralCoverage {
        lo: f64,
        hi: f64,
        cov_lo: f64,
        cov_hi: f64,
    },

    #[error("spectral dataset is empty: coverage undefined")]
    SpectralEmpty,

    #[error("root bracketing failed for {op} on [{lo}, {hi}]")]
    Bracketing { op: &'static str, lo: f64, hi: f64 },

    #[error("fit is rank deficient: {rows} rows for {cols} coefficients")]
    RankDeficient { rows: usize, cols: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
