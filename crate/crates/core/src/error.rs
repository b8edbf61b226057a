use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the simulation library.
///
/// Variants split into two families: configuration problems (`Validation`,
/// `Parse`, `WrongVariant`, `IndexOutOfRange`, `InvalidArgument`) and numeric
/// failures (everything else). The CLI maps them to exit codes 2 and 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("operation `{operation}` requires a {expected} bath")]
    WrongVariant {
        operation: &'static str,
        expected: &'static str,
    },

    #[error("index {index} out of range for length {length}")]
    IndexOutOfRange { index: usize, length: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("reference energy {e_ref} lies on the spectrum (distance {distance:.3e})")]
    ReferenceOnSpectrum { e_ref: Complex64, distance: f64 },

    #[error("energy {energy} collides with a pole (distance {distance:.3e})")]
    PoleCollision { energy: Complex64, distance: f64 },

    #[error("energy {energy} lies on the spectral loop")]
    OnLoop { energy: Complex64 },

    #[error("poles coalesce (|E+ - E-| = {separation:.3e}); use the confluent formula")]
    DegeneratePoles { separation: f64 },

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("resolvent truncation error {estimate:.3e} exceeds tolerance")]
    TruncationTooLarge { value: Complex64, estimate: f64 },

    #[error("eigensolver failed: {0}")]
    ConvergenceFailure(String),

    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("need at least {needed} tail sites above threshold, found {found}")]
    InsufficientTail { needed: usize, found: usize },

    #[error("need at least {needed} usable points, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("fit window ({t_min}, {t_max}) holds {found} samples, need at least {needed}")]
    EmptyWindow {
        t_min: f64,
        t_max: f64,
        found: usize,
        needed: usize,
    },

    #[error("fit requires positive values; found {value} at t = {t}")]
    NonPositiveValues { t: f64, value: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for configuration errors, false for numeric failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::Parse { .. }
                | Error::WrongVariant { .. }
                | Error::IndexOutOfRange { .. }
                | Error::InvalidArgument(_)
        )
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            3
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
