use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("i/o failure on {path}: {source}")]
    IoFailure { path: String, source: std::io::Error },
    #[error("sampler exhausted after {attempts} attempts for {what} (acceptance rate {rate:.3e})")]
    SamplerExhausted { what: String, attempts: usize, rate: f64 },
    #[error("malformed matrix file: {0}")]
    MatrixFormat(String),
    #[error("malformed record: {0}")]
    Record(String),
    #[error(transparent)]
    Core(#[from] schatten_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::IoFailure { path: path.display().to_string(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
