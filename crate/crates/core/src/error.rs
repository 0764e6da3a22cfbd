use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate subset: {0} points (expected 1..=8)")]
    DegenerateSubset(usize),

    #[error("duplicate phase-space point ({0},{1}) in subset")]
    DuplicatePoint(u8, u8),

    #[error("subset of {0} points is not canonicalized by this procedure (at most 4)")]
    NotCanonicalizable(usize),

    #[error("not an invertible affine map: det = 0 (mod 3)")]
    SingularAffine,

    #[error("not a Bell vector: {0}")]
    NotBellVector(String),

    #[error("pair not embeddable as given: |<psi1|psi2>| = {0:.3e}")]
    PairNotEmbeddable(f64),

    #[error("fourth state not embeddable: {0}")]
    FourthNotEmbeddable(String),

    #[error("invalid simplex state: {0}")]
    InvalidState(String),

    #[error("not a witness candidate: {0}")]
    NotWitnessCandidate(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("optimizer did not converge: {0}")]
    Optimizer(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
