//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoarseError {
    #[error("invalid scale parameter {name}={value}: {reason}")]
    InvalidScale {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("unknown point id {id} (space has {n} points)")]
    UnknownPoint { id: usize, n: usize },

    #[error("subset {name} contains point id {id}, out of range for a space of {n} points")]
    SubsetOutOfRange { name: String, id: usize, n: usize },

    #[error("unknown subset {0:?}")]
    UnknownSubset(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no interior cut exists: {0}")]
    NoInteriorCut(String),

    #[error("invalid cover: {0}")]
    InvalidCover(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, CoarseError>;
