use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(String),

    #[error("input {path}: {reason}{}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    InputFile {
        path: PathBuf,
        line: Option<usize>,
        reason: String,
    },

    #[error(transparent)]
    Core(#[from] natsamp::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub(crate) fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}
