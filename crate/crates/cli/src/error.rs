use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("search failed at k = {k}: {source}")]
    Search {
        k: usize,
        #[source]
        source: fekete_core::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub const CONFIG_EXIT: i32 = 2;
    pub const SEARCH_EXIT: i32 = 3;
    pub const IO_EXIT: i32 = 4;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => Self::CONFIG_EXIT,
            CliError::Search { .. } => Self::SEARCH_EXIT,
            CliError::Io { .. } => Self::IO_EXIT,
        }
    }

    pub(crate) fn search(k: usize) -> impl FnOnce(fekete_core::Error) -> CliError {
        move |source| CliError::Search { k, source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
