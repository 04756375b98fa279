use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the simulation primitives and the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid bit character {0:?}: expected '0' or '1'")]
    InvalidBit(char),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invariant violated at iteration {iteration}: {detail}")]
    Invariant { iteration: u32, detail: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Errors raised while loading or validating an experiment configuration.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required field `{0}`")]
    MissingField(&'static str),

    #[error("`{field}` = {value} is out of range (expected {bounds})")]
    OutOfRange {
        field: String,
        value: String,
        bounds: String,
    },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("duplicate arm label `{0}`")]
    DuplicateLabel(String),

    #[error("malformed config: {0}")]
    Parse(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Top-level failure of an experiment run. Each variant maps to a CLI exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("arm `{arm}`, replicate {replicate}: {source}")]
    Simulation {
        arm: String,
        replicate: u32,
        #[source]
        source: Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Simulation { .. } => 3,
            RunError::Io { .. } => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
