//! Error type shared by every module in the crate.
//!
//! Variants are grouped by category so that callers (notably the CLI) can
//! map them onto coarse exit codes without string matching.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user-facing parameter (config key, CLI flag, function argument).
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A row or header of an input file that does not match its format.
    /// `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A field that should be numeric but is not. `line` is 1-based.
    #[error("value error at line {line}: {msg}")]
    Value { line: usize, msg: String },

    /// Missing observations in an input series. The message lists the
    /// missing timestamps (capped).
    #[error("gap in series {label}: {} missing sample(s): {}", missing.len(), fmt_missing(missing))]
    Gap { label: String, missing: Vec<String> },

    /// Two series with different sampling steps where one step is required.
    #[error("sampling step mismatch: {0}")]
    StepMismatch(String),

    /// Time-range intersection of two series is empty or too short.
    #[error("series do not overlap: {0}")]
    EmptyOverlap(String),

    /// Series too short, constant, or otherwise carrying no information.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Matrix/series shape disagreement between related objects.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Not enough observations for the requested model order.
    #[error("sample too small: {0}")]
    SampleSize(String),

    /// A linear system was singular or too ill-conditioned to solve.
    #[error("numerical conditioning failure: {0}")]
    Conditioning(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

fn fmt_missing(missing: &[String]) -> String {
    const SHOW: usize = 8;
    if missing.len() <= SHOW {
        missing.join(", ")
    } else {
        format!("{}, ... ({} more)", missing[..SHOW].join(", "), missing.len() - SHOW)
    }
}
