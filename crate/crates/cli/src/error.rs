use std::path::PathBuf;

use thiserror::Error;

use crate::format::FormatError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("header mismatch: {0}")]
    HeaderMismatch(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fqtile::Error),
}
