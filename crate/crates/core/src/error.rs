use std::fmt;

/// Errors reported by the numerical kernels and bound evaluators.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    Domain { op: &'static str, msg: String },
    /// A search or estimate could not be completed (unbracketed root,
    /// all grid points infeasible, degenerate sample set).
    Numeric { op: &'static str, msg: String },
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub(crate) fn numeric(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric { op, msg: msg.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { op, msg } => write!(f, "{op}: domain error: {msg}"),
            Error::Numeric { op, msg } => write!(f, "{op}: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
