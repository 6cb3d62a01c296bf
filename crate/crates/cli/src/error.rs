// Copyright 2026 The qpmp Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command, grouped by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("format error in {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{stage} failed: {source}")]
    Numerical {
        stage: String,
        #[source]
        source: qpmp_core::Error,
    },
    #[error("no start converged ({0})")]
    NoConvergence(String),
}

impl CliError {
    /// 1 for configuration, format and file errors, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Format { .. } | CliError::Io { .. } => 1,
            CliError::Numerical { .. } | CliError::NoConvergence(_) => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn numerical(stage: impl Into<String>, source: qpmp_core::Error) -> Self {
        CliError::Numerical {
            stage: stage.into(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
