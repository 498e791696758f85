//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data, with the offending line number where known.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally valid input violating a model constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input file does not follow the expected layout.
    #[error("format error: {0}")]
    Format(String),

    /// TLE line failed its modulo-10 checksum.
    #[error("checksum mismatch on TLE line {line}: computed {computed}, stored {stored}")]
    Checksum {
        line: usize,
        computed: u32,
        stored: u32,
    },

    /// Request outside the mathematical validity region of a model.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid argument to an operation.
    #[error("argument error: {0}")]
    Argument(String),

    /// Sensor position coincides with a source element.
    #[error("singular separation at t = {time_s} s: sensor inside the source domain")]
    Singularity { time_s: f64 },

    /// Two series that must share a time base do not.
    #[error("time-base alignment error: {0}")]
    Alignment(String),

    /// Kernel identifier registered without a shipped functional form.
    #[error("kernel '{0}' is reserved but has no registered form")]
    UnregisteredKernel(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
