//! Crate-wide error type. Variant names follow the failure modes of the
//! individual subsystems (series construction, spectral extraction, reduction,
//! contour tracking, quadrature, statistics windows).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("weight must be an even integer >= 4, got {0}")]
    InvalidWeight(i64),
    #[error("invalid truncation order: {0}")]
    InvalidTruncation(String),
    #[error("insufficient truncation: need {needed} terms, have {have}")]
    InsufficientTruncation { needed: usize, have: usize },
    #[error("no cusp forms at weight {0}")]
    NoCuspForms(i64),
    #[error("degenerate Hecke spectrum at weight {weight}: {detail}")]
    DegenerateSpectrum { weight: i64, detail: String },
    #[error("prime cutoff {0} too small (need >= 100)")]
    CutoffTooSmall(u64),
    #[error("invalid prime range: {0}")]
    RangeError(String),
    #[error("point not in the upper half-plane: y = {0}")]
    InvalidPoint(f64),
    #[error("fundamental-domain reduction exceeded the step limit")]
    ReductionError,
    #[error("contour passes through a zero: {0}")]
    ContourThroughZero(String),
    #[error("phase sampling failure: {0}")]
    SamplingError(String),
    #[error("unresolved zero cluster: {0}")]
    UnresolvedCluster(String),
    #[error("invalid region: {0}")]
    RegionError(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureError(String),
    #[error("singular quadrature failure: {0}")]
    SingularQuadError(String),
    #[error("budget exceeded: {0}")]
    BudgetError(String),
    #[error("window violation: {0}")]
    WindowError(String),
    #[error("cache: {0}")]
    CacheError(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
