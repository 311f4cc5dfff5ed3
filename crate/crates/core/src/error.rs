use crate::exact::ExactError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("at step {step}: {source}")]
    AtStep { step: String, source: Box<Error> },
}

impl Error {
    /// Precision or resource exhaustion, as opposed to a definite answer.
    pub fn is_exhaustion(&self) -> bool {
        match self {
            Error::Exact(ExactError::PrecisionExhausted { .. }) | Error::ResourceLimit(_) => true,
            Error::AtStep { source, .. } => source.is_exhaustion(),
            _ => false,
        }
    }

    /// Tags the error with a (possibly nested) step position.
    pub fn at_step(self, step: impl Into<String>) -> Error {
        match self {
            Error::AtStep { step: inner, source } => Error::AtStep { step: format!("{}.{inner}", step.into()), source },
            other => Error::AtStep { step: step.into(), source: Box::new(other) },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
