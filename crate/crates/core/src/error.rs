use std::path::PathBuf;

use thiserror::Error;

use crate::evolve::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid sizing: n_modes must be even and at least 4, got {0}")]
    GridSize(usize),

    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids ({0} vs {1} modes)")]
    GridMismatch(usize, usize),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("fit undefined: {0}")]
    UndefinedFit(String),

    #[error("unsupported parameters: {0}")]
    UnsupportedParameters(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solution blew up at t = {time}")]
    BlowUp {
        time: f64,
        partial: Option<Box<Trajectory>>,
    },

    #[error("time {0} is outside the stored trajectory")]
    TimeOutOfRange(f64),

    #[error("too few frames: need at least {needed}, have {have}")]
    TooFewFrames { needed: usize, have: usize },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("too few scales in range: need at least 4, have {0}")]
    TooFewScales(usize),

    #[error("config: {0}")]
    Config(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed table {path}: {message}")]
    Table { path: PathBuf, message: String },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
