//! Error taxonomy shared by the library and the CLI.
//!
//! The variants are grouped by how the CLI maps them to exit codes:
//! hypothesis failures (rejected inputs) exit with 2, internal-check
//! failures (a cross-check that must hold mathematically came out false)
//! exit with 3, and usage problems exit with 64.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain the algorithms are stated for
    /// (even p, non-prime p, zero multiplicity, odd dimension required...).
    #[error("hypotheses not satisfied: {0}")]
    Hypothesis(String),

    /// A structurally invalid argument (lengths, ranges, encodings).
    #[error("bad parameter: {0}")]
    BadParameter(String),

    /// An enumeration or solve would exceed its stated budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A redundant internal verification failed; this indicates a bug and
    /// is never expected on valid inputs.
    #[error("internal check failed: {0}")]
    InternalCheck(String),

    /// Malformed JSON or an input file that does not parse.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// The process exit code the CLI uses for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) => 2,
            Error::InternalCheck(_) => 3,
            Error::Budget(_) => 3,
            Error::BadParameter(_) | Error::InvalidInput(_) => 64,
        }
    }
}
