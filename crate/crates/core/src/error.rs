//! Crate-wide error type.
//!
//! `Undecidable` is a first-class outcome, not a failure mode: the structural
//! decision procedures refuse to guess, and callers (including the CLI, which
//! maps it to its own exit code) must treat it distinctly from a violation.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("quotient collapses to the zero ring")]
    ZeroRing,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("nonzero constant term: {0}")]
    NonzeroConstantTerm(String),
    #[error("series not reversible: {0}")]
    NotReversible(String),
    #[error("not triangular: {0}")]
    NotTriangular(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
