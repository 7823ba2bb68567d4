use std::path::PathBuf;

use thiserror::Error;

use crate::subset::LevelRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sampler was handed a state that breaks one of its preconditions.
    /// Seeing this means a caller bug, not bad user input.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Subset Simulation hit `max_levels` without reaching the stopping band.
    #[error("level budget exceeded: no stop after {max_levels} conditional levels")]
    BudgetExceeded {
        max_levels: usize,
        partial: Box<Vec<LevelRecord>>,
    },

    /// No sample strictly exceeded the next intermediate threshold, so the
    /// next level cannot be seeded. Happens only with tied responses.
    #[error("level {level} stalled: all responses tied at {value}, no seeds above the threshold")]
    Stalled {
        level: usize,
        value: f64,
        partial: Box<Vec<LevelRecord>>,
    },

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Partial level records carried by a run that terminated abnormally.
    pub fn partial_records(&self) -> Option<&[LevelRecord]> {
        match self {
            Error::BudgetExceeded { partial, .. } | Error::Stalled { partial, .. } => {
                Some(partial.as_slice())
            }
            _ => None,
        }
    }
}
