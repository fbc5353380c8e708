//! Tunables shared by every metric kernel.

use serde::{Deserialize, Serialize};

/// How the stability horizon treats a dip-and-recover transfer profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShMode {
    /// Largest horizon `h` such that every *defined* offset in `[0, h]` stays
    /// at or above the threshold — the scan stops at the first defined cell
    /// below it. A later recovery does not extend the horizon.
    Contiguous,
    /// Largest defined offset at or above the threshold, regardless of dips
    /// in between.
    LiteralMax,
}

impl std::str::FromStr for ShMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "contiguous" => Ok(ShMode::Contiguous),
            "literal-max" => Ok(ShMode::LiteralMax),
            other => Err(format!(
                "unknown stability-horizon mode {other:?} (expected \"contiguous\" or \"literal-max\")"
            )),
        }
    }
}

impl std::fmt::Display for ShMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShMode::Contiguous => "contiguous",
            ShMode::LiteralMax => "literal-max",
        })
    }
}

/// How the adaptation score combines per-offset evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TasMode {
    /// Ratio of averages: mean future accuracy over mean oracle accuracy,
    /// clipped once at the end. Offsets with a present-but-zero oracle still
    /// contribute to both averages.
    Ratio,
    /// Sensitivity variant: mean of per-offset (clipped) transfer ratios.
    /// Offsets whose oracle is absent *or zero* have no defined ratio and are
    /// skipped, so the offset set can be smaller than in ratio mode.
    PerTerm,
}

impl std::str::FromStr for TasMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ratio" => Ok(TasMode::Ratio),
            "per-term" => Ok(TasMode::PerTerm),
            other => Err(format!(
                "unknown adaptation-score mode {other:?} (expected \"ratio\" or \"per-term\")"
            )),
        }
    }
}

impl std::fmt::Display for TasMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TasMode::Ratio => "ratio",
            TasMode::PerTerm => "per-term",
        })
    }
}

/// Invalid [`MetricConfig`] fields.
#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("delta must be finite and lie in [0, 1] (got {0})")]
    Delta(f64),
    #[error("epsilon must be finite and >= 0 (got {0})")]
    Epsilon(f64),
    #[error("lambda must be finite and > 0 (got {0})")]
    Lambda(f64),
    #[error("max_horizon must be >= 1")]
    MaxHorizon,
    #[error("tas_window must be >= 1")]
    TasWindow,
}

/// All metric tunables in one place.
///
/// Every kernel takes the full config so that one struct pins an entire
/// evaluation run; reports embed a snapshot of it and refuse to be compared
/// across differing snapshots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    /// Stability threshold on the transfer ratio, in `[0, 1]`.
    pub delta: f64,
    /// Slack subtracted from each absolute deviation in the drift statistic;
    /// deviations below it never accumulate. Must be `>= 0`.
    pub epsilon: f64,
    /// Decision threshold the drift statistic must strictly exceed. Must be
    /// `> 0`.
    pub lambda: f64,
    /// Largest forward offset (in steps) the horizon kernels examine. Must be
    /// `>= 1`.
    pub max_horizon: usize,
    /// Number of forward offsets the adaptation score averages over. Must be
    /// `>= 1`.
    pub tas_window: usize,
    /// Stability-horizon mode.
    pub sh_mode: ShMode,
    /// Whether transfer ratios (and the final adaptation score) are clipped
    /// at 1, treating "model beats the oracle" as full transfer.
    pub clip_ttr: bool,
    /// Adaptation-score averaging mode.
    pub tas_mode: TasMode,
}

impl Default for MetricConfig {
    /// The reference configuration: `delta = 0.6`, `epsilon = 0.02`,
    /// `lambda = 0.15`, `max_horizon = 6`, `tas_window = 6`, contiguous
    /// stability mode, clipping on, ratio-of-averages adaptation score.
    fn default() -> Self {
        MetricConfig {
            delta: 0.6,
            epsilon: 0.02,
            lambda: 0.15,
            max_horizon: 6,
            tas_window: 6,
            sh_mode: ShMode::Contiguous,
            clip_ttr: true,
            tas_mode: TasMode::Ratio,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.delta.is_finite() || !(0.0..=1.0).contains(&self.delta) {
            return Err(ConfigError::Delta(self.delta));
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(ConfigError::Epsilon(self.epsilon));
        }
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(ConfigError::Lambda(self.lambda));
        }
        if self.max_horizon < 1 {
            return Err(ConfigError::MaxHorizon);
        }
        if self.tas_window < 1 {
            return Err(ConfigError::TasWindow);
        }
        Ok(())
    }
}
