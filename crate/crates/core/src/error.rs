use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid axis: {0}")]
    InvalidAxis(String),
    #[error("invalid M: {0}")]
    InvalidM(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("candidate set is empty")]
    EmptyCandidates,
    #[error("sample is empty")]
    EmptySample,
    #[error("tree is empty")]
    EmptyTree,
    #[error("no valid K: {0}")]
    NoValidK(String),
    #[error("bracket does not converge: {0}")]
    NonConvergentBracket(String),
    #[error("optimizer failure: {0}")]
    OptimizerFailure(String),
    #[error("cross-check mismatch: {0}")]
    CrossCheck(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

/// Coarse grouping used by callers that map errors to exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Verification,
    Budget,
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidProfile(_) => "invalid_profile",
            Error::InvalidSpace(_) => "invalid_space",
            Error::InvalidInstance(_) => "invalid_instance",
            Error::InvalidAxis(_) => "invalid_axis",
            Error::InvalidM(_) => "invalid_m",
            Error::OutOfRange(_) => "out_of_range",
            Error::EmptyCandidates => "empty_candidates",
            Error::EmptySample => "empty_sample",
            Error::EmptyTree => "empty_tree",
            Error::NoValidK(_) => "no_valid_k",
            Error::NonConvergentBracket(_) => "non_convergent_bracket",
            Error::OptimizerFailure(_) => "optimizer_failure",
            Error::CrossCheck(_) => "cross_check_mismatch",
            Error::SizeLimit(_) => "size_limit",
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NonConvergentBracket(_) | Error::OptimizerFailure(_) | Error::CrossCheck(_) => {
                ErrorClass::Verification
            }
            Error::SizeLimit(_) => ErrorClass::Budget,
            _ => ErrorClass::Validation,
        }
    }
}
