//! Versioned JSON run configuration. Every field is optional; command-line
//! flags take precedence over the file, which takes precedence over defaults.

use std::fs;
use std::path::Path;

use mfvmd::bolt::SeChoice;
use mfvmd::vmd::InitPolicy;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema: u32,
    #[serde(default)]
    pub plots: Option<bool>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub vmd: VmdFile,
    #[serde(default)]
    pub se: Option<SeChoice>,
    #[serde(default)]
    pub analysis: AnalysisFile,
    #[serde(default)]
    pub simulate: SimulateFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VmdFile {
    pub modes: Option<usize>,
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub init: Option<InitPolicy>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisFile {
    pub velocity_m_s: Option<f64>,
    pub blank_time_s: Option<f64>,
    pub min_peak_ratio: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub snr_db: Option<f64>,
    pub echo_amplitude: Option<f64>,
    pub bolt_length_m: Option<f64>,
    pub wave_velocity_m_s: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self {
                schema: SCHEMA,
                ..Default::default()
            });
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: FileConfig =
            serde_json::from_str(text).map_err(|e| CliError::BadConfig(e.to_string()))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::BadConfig(format!(
                "unsupported schema {} (expected {SCHEMA})",
                cfg.schema
            )));
        }
        Ok(cfg)
    }
}
