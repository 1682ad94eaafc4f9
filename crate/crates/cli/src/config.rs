//! Run configuration file, merged under command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use advqa_core::{FakeAnswerMode, PlacementStrategy, SkipPolicy};

use crate::commands::CliError;

/// Every setting a run can take from the config file. Missing fields fall
/// back to built-in defaults; flags override.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<PlacementStrategy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fake_answer_mode: Option<FakeAnswerMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fake_table: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variants_per_question: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_policy: Option<SkipPolicy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep_unperturbed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adv_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub persons: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locations: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irregular_verbs: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let reader = crate::commands::open(path)?;
        serde_json::from_reader(reader)
            .map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }
}

/// `flag` if given, else the config value.
pub fn pick<T: Clone>(flag: Option<T>, from_config: &Option<T>) -> Option<T> {
    flag.or_else(|| from_config.clone())
}
