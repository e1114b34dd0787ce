use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quantum number {0} is not a non-negative multiple of 1/2")]
    NotHalfInteger(f64),

    #[error("quantum number {0} is not a multiple of 1/2")]
    NotHalfIntegerProjection(f64),

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("state {label} = |F={f}, M={m}> does not exist")]
    MissingState { label: &'static str, f: f64, m: f64 },

    #[error("Green's function evaluated at a pole (|denominator| = {modulus:.3e})")]
    Pole { modulus: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no transparency minimum between dressed resonances")]
    NoTransparencyWindow,

    #[error("solver step rejected: local error {error:.3e} exceeds tolerance {tolerance:.3e} at t = {time:.4}")]
    StepRejected { error: f64, tolerance: f64, time: f64 },

    #[error("non-finite value in solver state at t = {time:.4}")]
    NonFinite { time: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure comes from the input description rather than the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter(_)
                | Error::InvalidAtom(_)
                | Error::NotHalfInteger(_)
                | Error::NotHalfIntegerProjection(_)
                | Error::MissingState { .. }
        )
    }

    /// Short machine-readable tag, used in sweep tables and CLI error lines.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::NotHalfInteger(_) | Error::NotHalfIntegerProjection(_) => "half_integer",
            Error::InvalidAtom(_) => "invalid_atom",
            Error::MissingState { .. } => "missing_state",
            Error::Pole { .. } => "pole",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NoTransparencyWindow => "no_transparency_window",
            Error::StepRejected { .. } => "step_rejected",
            Error::NonFinite { .. } => "non_finite",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }
}
