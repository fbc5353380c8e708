//! Stability and drift horizons.
//!
//! Both kernels reduce one training row to "how many steps forward does the
//! model stay healthy", but they watch different signals.
//!
//! **Stability horizon** `SH_δ(t)` watches the transfer ratio `g(t, t+h)`:
//!
//! * `contiguous` (default): the largest `h ≤ H` such that every *defined*
//!   offset `h' ∈ [0, h]` satisfies `g ≥ δ`; the scan stops at the first
//!   defined offset below `δ` and ignores any later recovery.
//! * `literal-max`: the largest defined `h ≤ H` with `g ≥ δ`, dips included.
//!
//! Absent (or undefined-oracle) cells neither satisfy nor violate the
//! threshold — they are skipped. When the scan never finds a defined offset
//! below `δ` (contiguous), or the best satisfying offset is also the last
//! defined one (literal-max), the horizon is indistinguishable from one
//! limited by data: the value is the largest defined offset and
//! `truncated = true`.
//!
//! **Drift horizon** `DH(t)` watches absolute deviations from the training
//! diagonal through a one-sided CUSUM with slack `ε`:
//!
//! ```text
//! S_0 = 0
//! S_h = max(0, S_{h-1} + (|A(t, t+h) - A(t, t)| - ε))   when A(t, t+h) is present
//! S_h = S_{h-1}                                          when it is absent
//! ```
//!
//! `DH(t)` is the first `h ∈ [1, H]` with `S_h > λ` (strictly). If the
//! statistic never crosses within the window, the sentinel `H + 1` is
//! returned with `truncated = true` — "no detectable drift within the
//! evaluation window" — and aggregate means deliberately include the
//! sentinel.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{MetricConfig, ShMode};
use super::ttr::{TtrCell, TtrMatrix};
use super::KernelError;
use crate::matrix::AccuracyMatrix;

/// A horizon value in steps plus whether it was cut short by data
/// availability rather than an observed crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub value: usize,
    pub truncated: bool,
}

/// Per-training-time horizons with their truncation flags.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HorizonResult {
    entries: BTreeMap<usize, Horizon>,
}

impl HorizonResult {
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, Horizon)>,
    {
        HorizonResult { entries: entries.into_iter().collect() }
    }

    pub fn get(&self, t: usize) -> Option<Horizon> {
        self.entries.get(&t).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Horizon)> + '_ {
        self.entries.iter().map(|(t, h)| (*t, *h))
    }

    /// Arithmetic mean of the horizon values in ascending `t` order,
    /// sentinel values included. `None` when empty.
    pub fn mean(&self) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let sum: f64 = self.entries.values().map(|h| h.value as f64).sum();
        Some(sum / self.entries.len() as f64)
    }

    /// Whether any entry is truncated (drives the footnote on reported means).
    pub fn any_truncated(&self) -> bool {
        self.entries.values().any(|h| h.truncated)
    }
}

/// Stability horizon of training time `t`.
///
/// Requires a defined diagonal ratio `g(t, t)` (i.e. `A(t, t)` present and
/// positive); the result always lies in `[0, max_horizon]`.
pub fn stability_horizon(
    ttr: &TtrMatrix,
    t: usize,
    cfg: &MetricConfig,
) -> Result<Horizon, KernelError> {
    let periods = ttr.periods();
    if t >= periods {
        return Err(KernelError::TrainIndexOutOfRange { index: t, periods });
    }
    match ttr.get(t, t) {
        TtrCell::Ratio(_) => {}
        _ => return Err(KernelError::UndefinedOracle { t }),
    }

    match cfg.sh_mode {
        ShMode::Contiguous => {
            let mut last_defined = 0usize;
            for h in 1..=cfg.max_horizon {
                let tau = match t.checked_add(h) {
                    Some(tau) if tau < periods => tau,
                    _ => break,
                };
                if let TtrCell::Ratio(g) = ttr.get(t, tau) {
                    if g < cfg.delta {
                        return Ok(Horizon { value: h - 1, truncated: false });
                    }
                    last_defined = h;
                }
            }
            Ok(Horizon { value: last_defined, truncated: true })
        }
        ShMode::LiteralMax => {
            let mut best = 0usize;
            let mut last_defined = 0usize;
            for h in 1..=cfg.max_horizon {
                let tau = match t.checked_add(h) {
                    Some(tau) if tau < periods => tau,
                    _ => break,
                };
                if let TtrCell::Ratio(g) = ttr.get(t, tau) {
                    last_defined = h;
                    if g >= cfg.delta {
                        best = h;
                    }
                }
            }
            Ok(Horizon { value: best, truncated: best == last_defined })
        }
    }
}

/// The drift statistic `S_1 … S_H` for training time `t`.
///
/// Requires `A(t, t)` present. Absent offsets carry the previous value
/// forward, so the returned vector always has exactly `max_horizon` entries
/// and every entry is `>= 0`.
pub fn drift_statistic(
    matrix: &AccuracyMatrix,
    t: usize,
    cfg: &MetricConfig,
) -> Result<Vec<f64>, KernelError> {
    let periods = matrix.periods();
    if t >= periods {
        return Err(KernelError::TrainIndexOutOfRange { index: t, periods });
    }
    let baseline = matrix.get(t, t).ok_or(KernelError::DiagonalAbsent { t })?;

    let mut out = Vec::with_capacity(cfg.max_horizon);
    let mut s = 0.0f64;
    for h in 1..=cfg.max_horizon {
        let cell = t
            .checked_add(h)
            .filter(|tau| *tau < periods)
            .and_then(|tau| matrix.get(t, tau));
        if let Some(a) = cell {
            s = (s + ((a - baseline).abs() - cfg.epsilon)).max(0.0);
        }
        out.push(s);
    }
    Ok(out)
}

/// Drift horizon of training time `t`: the first `h` with `S_h > lambda`,
/// or the sentinel `max_horizon + 1` with `truncated = true` when the
/// statistic never crosses within the window.
pub fn drift_horizon(
    matrix: &AccuracyMatrix,
    t: usize,
    cfg: &MetricConfig,
) -> Result<Horizon, KernelError> {
    let stat = drift_statistic(matrix, t, cfg)?;
    for (i, s) in stat.iter().enumerate() {
        if *s > cfg.lambda {
            return Ok(Horizon { value: i + 1, truncated: false });
        }
    }
    Ok(Horizon { value: cfg.max_horizon + 1, truncated: true })
}

/// Stability horizons for every training time with a defined diagonal ratio.
pub fn stability_horizons(ttr: &TtrMatrix, cfg: &MetricConfig) -> HorizonResult {
    HorizonResult::from_entries((0..ttr.periods()).filter_map(|t| {
        stability_horizon(ttr, t, cfg).ok().map(|h| (t, h))
    }))
}

/// Drift horizons for every training time with a present diagonal.
pub fn drift_horizons(matrix: &AccuracyMatrix, cfg: &MetricConfig) -> HorizonResult {
    HorizonResult::from_entries((0..matrix.periods()).filter_map(|t| {
        drift_horizon(matrix, t, cfg).ok().map(|h| (t, h))
    }))
}
