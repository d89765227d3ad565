#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Host-side companion of `fhjrc-core`: TOML run configuration, IQ/plan/CSV
//! file formats, the Monte-Carlo harness and the command implementations
//! behind the `fhjrc` binary.

pub mod bench;
pub mod commands;
pub mod config;
pub mod io;

use std::path::PathBuf;

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] fhjrc_core::Error),

    /// The run configuration could not be parsed or failed validation.
    #[error("configuration: {0}")]
    Config(String),

    /// A data file is malformed.
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Machine-readable category printed by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Core(e) => e.category(),
            Error::Config(_) => "config",
            Error::Format { .. } => "format",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit code of the category. 2 is left to argument errors.
    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 3,
            "domain" => 4,
            "input-length" => 5,
            "dimension" => 6,
            "calibration" => 7,
            "io" => 8,
            "format" => 9,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
