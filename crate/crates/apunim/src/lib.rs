//! File formats, reports and the command-line front end for `apunim-core`.

use std::fmt::Display;
use std::path::Path;

pub mod cli;
pub mod config;
pub mod io;
pub mod manifest;
pub mod report;

pub use apunim_core as core;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad input, configuration or arguments.
    #[error("{0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 2,
            AppError::Internal(_) => 3,
        }
    }

    pub(crate) fn io<E: Display>(path: &Path) -> impl Fn(E) -> AppError + '_ {
        move |e| AppError::Internal(format!("{}: {e}", path.display()))
    }

    pub(crate) fn csv(path: &Path) -> impl Fn(csv::Error) -> AppError + '_ {
        move |e| AppError::Internal(format!("{}: {e}", path.display()))
    }
}
