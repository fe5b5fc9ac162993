use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaslovError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("subspace containment fails: {0}")]
    NotContained(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("lagrangian {index} is not Lagrangian: {reason}")]
    NotLagrangian { index: usize, reason: String },
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("subspace is not isotropic: {0}")]
    NotIsotropic(String),
    /// An identity that must always hold failed; this is a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("tolerance breach: {what} residual {residual:e} exceeds {tol:e}")]
    ToleranceBreach {
        what: String,
        residual: f64,
        tol: f64,
    },
}

impl MaslovError {
    pub fn consistency(msg: impl Into<String>) -> Self {
        MaslovError::Consistency(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        MaslovError::Precondition(msg.into())
    }

    /// True for errors caused by the caller's input rather than a failed identity.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            MaslovError::Consistency(_) | MaslovError::ToleranceBreach { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, MaslovError>;

/// Returns a consistency error when `cond` is false.
pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(MaslovError::Consistency(msg()))
    }
}
