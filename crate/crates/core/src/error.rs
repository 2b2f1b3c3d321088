use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown language `{0}` (expected arabic, bulgarian, english, or custom)")]
    UnknownLanguage(String),

    #[error("corpus is empty after filtering: no document reached {min_letters} letters")]
    EmptyCorpus { min_letters: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {msg}")]
    CsvParse {
        path: PathBuf,
        line: usize,
        column: usize,
        msg: String,
    },

    #[error("{path}: row `{label}` sums to {sum:e}, expected 1 within {tol:e}")]
    RowSum {
        path: PathBuf,
        label: String,
        sum: f64,
        tol: f64,
    },

    #[error("pgm {path}: {msg}")]
    Pgm { path: PathBuf, msg: String },

    #[error("atlas {path}: {msg}")]
    Atlas { path: PathBuf, msg: String },

    #[error("atlas entry {family}:{name}: {msg}")]
    AtlasEntry {
        family: String,
        name: String,
        msg: String,
    },

    #[error("brute force would evaluate {count} mappings, above the limit of {limit}")]
    SearchSpace { count: u128, limit: u128 },

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
