use thiserror::Error;

use crate::report::ViolationReport;

/// Errors raised while building or evaluating algebraic structures.
#[derive(Debug, Clone, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is outside the domain of the table")]
    Domain(String),

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    #[error("window overflow: {0}")]
    WindowOverflow(String),

    #[error("generator data does not extend consistently: {tag} fails at {witness}")]
    ExtensionInconsistency { tag: String, witness: String },

    #[error("matrix is not in the span of the algebra (residual {0:.3e})")]
    NotInAlgebra(f64),

    #[error("construction refused: {reason}")]
    Refused { reason: String, report: Option<Box<ViolationReport>> },
}

impl AlgebraError {
    pub fn refused(reason: impl Into<String>) -> Self {
        AlgebraError::Refused {
            reason: reason.into(),
            report: None,
        }
    }

    pub fn refused_with(reason: impl Into<String>, report: ViolationReport) -> Self {
        AlgebraError::Refused {
            reason: reason.into(),
            report: Some(Box::new(report)),
        }
    }
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
