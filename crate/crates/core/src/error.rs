//! Crate-wide error type.
//!
//! Every stage maps its failures onto one of these variants so the CLI can
//! translate them into stable exit codes (usage / data / numerical).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file; the message names the offending field.
    #[error("format error: {0}")]
    Format(String),

    /// An argument violated a precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An operation that needs at least one object pixel got none.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// The region is too small or too symmetric for the requested descriptor.
    #[error("degenerate region: {0}")]
    Degenerate(String),

    /// A non-finite value appeared mid-computation.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A classifier failed to converge.
    #[error("training error: {0}")]
    Training(String),

    /// Synthetic data could not be generated under the given constraints.
    #[error("generation error: {0}")]
    Generation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
