use thiserror::Error;

/// Errors raised by the numerical routines and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// An oscillator preset is missing a parameter or has an invalid one.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested time lies past the validity horizon of a flow or phase solution.
    #[error("horizon error at t = {t}: {reason} (last valid time {last_valid})")]
    Horizon {
        t: f64,
        last_valid: f64,
        reason: String,
    },

    /// The spatial grid is too small or too coarse for the field it holds.
    #[error("grid error: {0}")]
    Grid(String),

    #[error("integrability error: {0}")]
    Integrability(String),

    /// A computed quantity violates a bound it is supposed to satisfy.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("certificate failure: {0}")]
    Certificate(String),

    /// Two routes that must agree (e.g. flow horizon vs. linear reduction) do not.
    #[error("contradiction: {0}")]
    Contradiction(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn horizon(t: f64, last_valid: f64, reason: impl Into<String>) -> Self {
        Error::Horizon {
            t,
            last_valid,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input files rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Json(_) | Error::Format(_) | Error::Parameter(_)
        )
    }
}
