use std::time::Duration;

use serde::Deserialize;
use spanembed::EmbedConfig;

use crate::{CliError, Params};

/// Environment variable naming a JSON file of default parameters.
pub const CONFIG_ENV: &str = "SPANEMBED_CONFIG";

/// Defaults read from the config file; command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub gamma: Option<f64>,
    pub gamma0: Option<f64>,
    pub gamma1: Option<f64>,
    pub beta: Option<f64>,
    pub retry_budget: Option<usize>,
    pub undo_window: Option<usize>,
    pub detect_restarts: Option<usize>,
    /// Seconds; 0 means unlimited.
    pub time_budget: Option<f64>,
}

pub fn load() -> Result<FileConfig, CliError> {
    match std::env::var(CONFIG_ENV) {
        Ok(path) if !path.is_empty() => {
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))
        }
        _ => Ok(FileConfig::default()),
    }
}

pub fn budget(secs: Option<f64>) -> Result<Option<Duration>, CliError> {
    match secs {
        None => Ok(EmbedConfig::default().oracle_time_budget),
        Some(0.0) => Ok(None),
        Some(s) if s > 0.0 && s.is_finite() => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(CliError::Usage(format!("time budget must be a non-negative number of seconds, got {s}"))),
    }
}

impl FileConfig {
    pub fn embed_config(&self, p: &Params, time_budget: Option<f64>) -> Result<EmbedConfig, CliError> {
        let d = EmbedConfig::default();
        let cfg = EmbedConfig {
            gamma: p.gamma.or(self.gamma).unwrap_or(d.gamma),
            gamma0: p.gamma0.or(self.gamma0).unwrap_or(d.gamma0),
            gamma1: p.gamma1.or(self.gamma1).unwrap_or(d.gamma1),
            beta: p.beta.or(self.beta).unwrap_or(d.beta),
            retry_budget: self.retry_budget.unwrap_or(d.retry_budget),
            undo_window: self.undo_window.unwrap_or(d.undo_window),
            detect_restarts: self.detect_restarts.unwrap_or(d.detect_restarts),
            oracle_time_budget: budget(time_budget.or(self.time_budget))?,
            seed: p.seed,
            ..d
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}
