//! Configuration resolution: built-in defaults, overlaid by an optional JSON
//! config file, overlaid by explicit flags. The two window lengths default
//! to "auto": one less than the widest input axis, so every forward offset
//! the data can show is inside the window.

use std::path::Path;

use serde::Deserialize;
use temporal_metrics::metrics::{MetricConfig, ShMode, TasMode};

use crate::commands::CliError;
use crate::ConfigArgs;

/// The shape of a `--config` file: every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    delta: Option<f64>,
    epsilon: Option<f64>,
    lambda: Option<f64>,
    max_horizon: Option<usize>,
    tas_window: Option<usize>,
    sh_mode: Option<ShMode>,
    clip_ttr: Option<bool>,
    tas_mode: Option<TasMode>,
}

fn read_config_file(path: &Path) -> Result<PartialConfig, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| CliError::ConfigFile {
        path: path.display().to_string(),
        message: source.to_string(),
    })
}

/// Resolve the effective configuration for this invocation.
///
/// `auto_horizon` is the data-derived window: one less than the widest input
/// axis (at least 1). It is used when neither a flag nor the config file
/// pins `max_horizon`; `tas_window` then defaults to the resolved horizon.
pub fn resolve(args: &ConfigArgs, auto_horizon: usize) -> Result<MetricConfig, CliError> {
    let file = match &args.config {
        Some(path) => read_config_file(path)?,
        None => PartialConfig::default(),
    };
    let defaults = MetricConfig::default();

    let max_horizon = args
        .max_horizon
        .or(file.max_horizon)
        .unwrap_or_else(|| auto_horizon.max(1));
    let cfg = MetricConfig {
        delta: args.delta.or(file.delta).unwrap_or(defaults.delta),
        epsilon: args.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
        lambda: args.lambda.or(file.lambda).unwrap_or(defaults.lambda),
        max_horizon,
        tas_window: args.tas_window.or(file.tas_window).unwrap_or(max_horizon),
        sh_mode: args.sh_mode.map(ShMode::from).or(file.sh_mode).unwrap_or(defaults.sh_mode),
        clip_ttr: args.clip_ttr.or(file.clip_ttr).unwrap_or(defaults.clip_ttr),
        tas_mode: args.tas_mode.map(TasMode::from).or(file.tas_mode).unwrap_or(defaults.tas_mode),
    };
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}
