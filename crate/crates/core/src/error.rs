use thiserror::Error;

use crate::mode::ModeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the validated evaluation range.
    #[error("argument out of range: {0}")]
    Range(String),

    /// An iterative method failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The mode label is not legal for the requested cavity or model.
    #[error("invalid mode {mode}: {reason}")]
    Classification { mode: ModeId, reason: String },

    #[error("fitted table has no entry for mode {0}")]
    MissingMode(ModeId),

    #[error("forbidden torus region: minor radius {r} m exceeds major radius {major} m")]
    Forbidden { r: f64, major: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mode {0} not present in spectrum")]
    NotFound(ModeId),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of an iterative solver rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
