use std::fmt;

use crate::intervals::Interval;

/// Errors raised by engine operations.
///
/// Every variant carries a stable machine name (see [`Error::name`]) that the
/// command-line front end reports verbatim.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("domination violated on atom {atom}: {lhs} > {rhs}")]
    Domination {
        atom: Interval,
        lhs: String,
        rhs: String,
    },
    #[error("profiles differ on atom {atom}: {left} vs {right}")]
    ProfileMismatch {
        atom: Interval,
        left: String,
        right: String,
    },
    #[error("integral is indefinite (positive and negative variations are both infinite)")]
    IndefiniteIntegral,
    #[error("cannot certify negligibility of {point}: it carries mass {mass}")]
    CannotCertify { point: String, mass: String },
    #[error("series did not stabilize within cap {cap}; {required} terms are required")]
    Stabilization { cap: usize, required: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Domination { .. } => "DominationError",
            Error::ProfileMismatch { .. } => "ProfileMismatch",
            Error::IndefiniteIntegral => "IndefiniteIntegral",
            Error::CannotCertify { .. } => "CannotCertify",
            Error::Stabilization { .. } => "StabilizationError",
            Error::Parse(_) => "ParseError",
            Error::Internal(_) => "InternalError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
