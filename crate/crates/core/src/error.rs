use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the planning toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid coordinate: {0}")]
    InvalidCoordinate(String),

    #[error("workspace too large: point is {dlat:.4} deg lat / {dlon:.4} deg lon from origin (limit 1 deg)")]
    WorkspaceTooLarge { dlat: f64, dlon: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("isolated seed: no data point within the kernel cutoff")]
    IsolatedSeed,

    #[error("empty input: at least one house is required")]
    EmptyInput,

    #[error("no centers supplied")]
    NoCenters,

    #[error("degenerate distance between stops {from} and {to} (duplicate stops?)")]
    DegenerateDistance { from: usize, to: usize },

    #[error("too few stops: {0} (need at least 3)")]
    TooFewStops(usize),

    #[error("duplicate stops at indices {0} and {1}")]
    DuplicateStops(usize, usize),

    #[error("instance too large: {0} stops (brute force supports at most {max})", max = crate::routing::BRUTE_FORCE_MAX_STOPS)]
    InstanceTooLarge(usize),

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("empty dataset: {}", .0.display())]
    EmptyDataset(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by how the tool was invoked rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::InstanceTooLarge(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
