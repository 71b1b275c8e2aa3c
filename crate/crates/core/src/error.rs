use std::fmt;

use thiserror::Error;

/// Why a protocol run ended without an output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    /// A commitment opening did not verify.
    BadOpening,
    /// The tested error rate exceeded the acceptance threshold.
    ErrorRate,
    /// Too few positions survived to carry the requested output length.
    ShortSet,
    /// Revealed shares do not lie on a low-degree polynomial.
    InconsistentShares,
    /// The authentication tag did not verify.
    MacReject,
    /// Syndrome-based error correction failed.
    DecodeFailure,
    /// A party declined to continue.
    Refusal,
    /// A received message could not be decoded.
    Malformed,
    /// A simulator ran out of rewinding attempts.
    EnforcementFailure,
    /// The judgment on the opened positions failed.
    Judgment,
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AbortReason::BadOpening => "bad-opening",
            AbortReason::ErrorRate => "error-rate",
            AbortReason::ShortSet => "short-set",
            AbortReason::InconsistentShares => "inconsistent-shares",
            AbortReason::MacReject => "mac-reject",
            AbortReason::DecodeFailure => "decode-failure",
            AbortReason::Refusal => "refusal",
            AbortReason::Malformed => "malformed",
            AbortReason::EnforcementFailure => "enforcement-failure",
            AbortReason::Judgment => "judgment",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("protocol aborted: {0}")]
    Abort(AbortReason),
    #[error("schedule violation at round {round}: {detail}")]
    Schedule { round: usize, detail: String },
    #[error("wire decode error: {0}")]
    Wire(String),
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, Error::Abort(_))
    }

    pub fn abort_reason(&self) -> Option<AbortReason> {
        match self {
            Error::Abort(r) => Some(*r),
            _ => None,
        }
    }
}

impl From<AbortReason> for Error {
    fn from(r: AbortReason) -> Self {
        Error::Abort(r)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
