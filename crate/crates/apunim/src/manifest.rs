//! `manifest.json`: what was run, on which inputs, with which settings.

use std::path::Path;

use apunim_core::{ConfigEcho, LabelScale};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::AppError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<LabelScale>,
    pub dimensions: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub threads: usize,
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_owned(),
            arguments: std::env::args().skip(1).collect(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config: None,
            scale: None,
            dimensions: Vec::new(),
            inputs: Vec::new(),
            threads: rayon::current_num_threads(),
            duration_seconds: 0.0,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<(), AppError> {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<(), AppError> {
        let path = dir.join("manifest.json");
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| AppError::Internal(e.to_string()))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(AppError::io(&path))
    }
}

pub fn sha256_file(path: &Path) -> Result<String, AppError> {
    let bytes = std::fs::read(path)
        .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}
