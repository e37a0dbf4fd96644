//! The TOML run configuration: scale, dimensions and analysis defaults.
//!
//! ```toml
//! [scale]
//! kind = "ordinal"
//! levels = ["0", "1", "2", "3", "4"]
//!
//! [analysis]
//! alpha = 0.2
//! partitions = 100
//!
//! [[dimension]]
//! name = "education"
//! ordinal_order = ["primary", "secondary", "tertiary"]
//! ```

use std::path::Path;

use apunim_core::{AnalysisConfig, PartitionScoreMode, ScaleKind, SignificanceMode};
use serde::{Deserialize, Serialize};

use crate::AppError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scale: Option<ScaleConfig>,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default, rename = "dimension")]
    pub dimensions: Vec<DimensionConfig>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleConfig {
    pub kind: ScaleKind,
    pub levels: Vec<String>,
}

/// Analysis defaults; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub alpha: Option<f64>,
    pub partitions: Option<usize>,
    pub fwer: Option<f64>,
    pub seed: Option<u64>,
    pub min_group: Option<usize>,
    pub partition_score_mode: Option<PartitionScoreMode>,
    pub significance_mode: Option<SignificanceMode>,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionConfig {
    pub name: String,
    /// Declared groups; inferred from the annotator file when absent.
    pub groups: Option<Vec<String>>,
    pub ordinal_order: Option<Vec<String>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// Defaults from the file laid over the built-in ones.
    pub fn analysis_config(&self) -> AnalysisConfig {
        let d = AnalysisConfig::default();
        let a = &self.analysis;
        AnalysisConfig {
            alpha: a.alpha.unwrap_or(d.alpha),
            partitions: a.partitions.unwrap_or(d.partitions),
            fwer: a.fwer.unwrap_or(d.fwer),
            master_seed: a.seed.unwrap_or(d.master_seed),
            min_group: a.min_group.unwrap_or(d.min_group),
            partition_score_mode: a.partition_score_mode.unwrap_or(d.partition_score_mode),
            significance_mode: a.significance_mode.unwrap_or(d.significance_mode),
        }
    }
}
