use thiserror::Error;

/// Failure conditions shared by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("potential is identically zero, no threshold exists")]
    ZeroPotential,
    #[error("potential is not integrable: {0}")]
    NonIntegrablePotential(String),
    #[error("top eigenvalue is degenerate (gap {gap:e})")]
    DegenerateTopEigenvalue { gap: f64 },
    #[error("not at threshold: |mu(0) - 1| = {defect:e} exceeds {tol:e}")]
    NotAtThreshold { defect: f64, tol: f64 },
    #[error("k = {k} is outside the validity window: {reason}")]
    OutsideValidityWindow { k: f64, reason: String },
    #[error("integration step under-resolved: {0}")]
    IntegrationUnderresolved(String),
    #[error("quadrature under-resolved: {0}")]
    QuadratureUnderresolved(String),
    #[error("angle quadrature under-resolved: relative change {change:e}")]
    AngleUnderresolved { change: f64 },
    #[error("pair {pair} is at or above its two-body threshold (coupling * mu = {value})")]
    PairAtOrAboveThreshold { pair: &'static str, value: f64 },
    #[error("no threshold in bracket [{lo}, {hi}]")]
    NoThresholdInBracket { lo: f64, hi: f64 },
    #[error("bracket invalid: {0}")]
    BracketInvalid(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("ill-conditioned basis: {0}")]
    IllConditionedBasis(String),
    #[error("path point unbound: {0}")]
    PathPointUnbound(String),
    #[error("pair classification drifted along the path: {0}")]
    ClassificationDrift(String),
    #[error("iteration did not converge: {0}")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
