use std::io;
use std::path::PathBuf;

use nql_core::chain::ChainError;
use nql_core::config::ConfigError;
use nql_core::dataset::DatasetError;
use nql_core::index::IndexError;
use nql_core::model::ModelError;
use nql_core::pca::PcaError;
use thiserror::Error;

pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    UnwritablePath { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Dataset { path: PathBuf, source: DatasetError },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: ModelError },
    #[error("schema mismatch: model expects columns {expected:?}, data has {found:?}")]
    SchemaMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("standardization failed: {0}")]
    Standardize(DatasetError),
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Standardize(_) | CliError::Pca(_) | CliError::Chain(_) | CliError::Index(_) => {
                EXIT_COMPUTATION
            }
            _ => EXIT_USAGE,
        }
    }
}
