use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty lexicon")]
    EmptyLexicon,

    #[error("empty table")]
    EmptyTable,

    #[error("duplicate noun form `{0}`")]
    DuplicateForm(String),

    #[error("unknown noun form `{0}`")]
    UnknownForm(String),

    #[error("unknown neighbor `{0}`")]
    UnknownNeighbor(String),

    #[error("unknown sense `{0}`")]
    UnknownSense(String),

    #[error("non-positive concentration for `{0}`")]
    NonPositiveConcentration(String),

    #[error("both genders required")]
    MissingGender,

    #[error("no entries in inventory")]
    NoCoverage,

    #[error("constant input")]
    ConstantInput,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient overlap with judgments; missing: {}", .0.join(", "))]
    InsufficientOverlap(Vec<String>),

    #[error("training diverged at iteration {iteration}: objective is {value}")]
    Diverged { iteration: usize, value: f64 },

    #[error("no convergence after {iterations} iterations (max deviation {max_deviation:e})")]
    NotConverged { iterations: usize, max_deviation: f64 },

    #[error("grid cell alpha={alpha}, beta={beta}: {source}")]
    GridCell {
        alpha: f64,
        beta: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for failures of the numerical routines rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Diverged { .. } | Error::NotConverged { .. } => true,
            Error::GridCell { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
