use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FournError {
    #[error(transparent)]
    Core(#[from] fourn_core::Error),
    #[error("{}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}, line {line}: {message}", path.display())]
    Parse { path: PathBuf, line: u64, message: String },
    #[error("{}: missing header, expected `{expected}`", path.display())]
    MissingHeader { path: PathBuf, expected: &'static str },
    #[error("{}: duplicate location on lines {first} and {second}", path.display())]
    DuplicateLocation { path: PathBuf, first: u64, second: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid model file {}: {message}", path.display())]
    Model { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, FournError>;

impl FournError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FournError::Io { path: path.into(), source }
    }
}
