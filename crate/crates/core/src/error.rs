//! Error taxonomy shared by every module.
//!
//! The variants mirror the CLI exit-code scheme: parameter-domain errors
//! (exit 2), budget errors (exit 3), verification failures (exit 1), and
//! everything else (exit 1).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the supported domain (p = 2, p | r, r < 3, bad coset, ...).
    #[error("parameter domain: {0}")]
    ParamDomain(String),

    /// A desk-scale budget (element count, graph size, search space) was exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A cross-check between formula, construction, and oracle disagreed.
    /// Never silently recorded as success.
    #[error("verification failure: {0}")]
    Verification(String),

    /// An internal invariant broke; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    /// Census file schema version not supported by this build.
    #[error("unsupported schema version {found} (supported: {supported})")]
    SchemaVersion { found: u32, supported: u32 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file (JSON parse errors keep serde's line/column context).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: 0 is success, 1 verification/other failure,
    /// 2 parameter domain, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParamDomain(_) => 2,
            Error::Budget(_) => 3,
            _ => 1,
        }
    }
}
