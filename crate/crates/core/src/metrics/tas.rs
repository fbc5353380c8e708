//! Temporal adaptation score.
//!
//! For a training time `t` and window length `n`, the score compares the
//! model's forward accuracy to contemporaneous oracle accuracy over the same
//! offsets:
//!
//! ```text
//! K        = { k in [1, n] : A(t, t+k) and A(t+k, t+k) are both present }
//! ood_avg  = mean over K of A(t, t+k)
//! id_avg   = mean over K of A(t+k, t+k)
//! tas      = min(1, ood_avg / id_avg)        (clipping optional)
//! ```
//!
//! The averaging is *paired*: an offset contributes to both averages or to
//! neither, so the two means always cover the same evaluation periods and
//! the ratio stays comparable across models with different sparsity. A
//! present-but-zero oracle stays in `K` (it is a legitimate, if brutal,
//! reference); only when the oracle *average* is zero is the score
//! undefined. Windows reaching past the end of the axis are truncated to
//! the offsets that exist.
//!
//! The alternative per-term mode averages individually clipped ratios
//! `A(t, t+k) / A(t+k, t+k)` instead, skipping offsets whose oracle is zero.
//! It is exposed for sensitivity analysis; the ratio-of-averages form is
//! the default.

use std::collections::BTreeMap;

use super::config::{MetricConfig, TasMode};
use super::KernelError;
use crate::matrix::AccuracyMatrix;

/// Adaptation score of one training time, with the paired averages
/// behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TasEntry {
    /// Mean forward (out-of-domain) accuracy over the paired window.
    pub ood_avg: f64,
    /// Mean oracle (in-domain) accuracy over the same window.
    pub id_avg: f64,
    /// The score itself.
    pub tas: f64,
}

/// Per-training-time adaptation scores.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TasResult {
    entries: BTreeMap<usize, TasEntry>,
}

impl TasResult {
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, TasEntry)>,
    {
        TasResult { entries: entries.into_iter().collect() }
    }

    pub fn get(&self, t: usize) -> Option<TasEntry> {
        self.entries.get(&t).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, TasEntry)> + '_ {
        self.entries.iter().map(|(t, e)| (*t, *e))
    }

    /// Arithmetic mean of the scores in ascending `t` order; `None` when
    /// empty.
    pub fn mean(&self) -> Option<f64> {
        if self.entries.is_empty() {
            return None;
        }
        let sum: f64 = self.entries.values().map(|e| e.tas).sum();
        Some(sum / self.entries.len() as f64)
    }

    /// Smallest score across training times; `None` when empty.
    pub fn min(&self) -> Option<f64> {
        self.entries
            .values()
            .map(|e| e.tas)
            .fold(None, |acc, v| Some(acc.map_or(v, |m: f64| m.min(v))))
    }
}

/// Adaptation score for training time `t`.
pub fn temporal_adaptation_score(
    matrix: &AccuracyMatrix,
    t: usize,
    cfg: &MetricConfig,
) -> Result<TasEntry, KernelError> {
    let periods = matrix.periods();
    if t >= periods {
        return Err(KernelError::TrainIndexOutOfRange { index: t, periods });
    }

    let paired = (1..=cfg.tas_window).filter_map(|k| {
        let tau = t.checked_add(k).filter(|tau| *tau < periods)?;
        match (matrix.get(t, tau), matrix.get(tau, tau)) {
            (Some(ood), Some(id)) => Some((ood, id)),
            _ => None,
        }
    });

    match cfg.tas_mode {
        TasMode::Ratio => {
            let mut ood_sum = 0.0f64;
            let mut id_sum = 0.0f64;
            let mut count = 0usize;
            for (ood, id) in paired {
                ood_sum += ood;
                id_sum += id;
                count += 1;
            }
            if count == 0 {
                return Err(KernelError::EmptyTasWindow { t });
            }
            let ood_avg = ood_sum / count as f64;
            let id_avg = id_sum / count as f64;
            if id_avg == 0.0 {
                return Err(KernelError::ZeroIdBaseline { t });
            }
            let raw = ood_avg / id_avg;
            let tas = if cfg.clip_ttr { raw.min(1.0) } else { raw };
            Ok(TasEntry { ood_avg, id_avg, tas })
        }
        TasMode::PerTerm => {
            let mut ood_sum = 0.0f64;
            let mut id_sum = 0.0f64;
            let mut term_sum = 0.0f64;
            let mut count = 0usize;
            for (ood, id) in paired {
                if id == 0.0 {
                    continue; // a per-term ratio against a zero oracle is undefined
                }
                let raw = ood / id;
                term_sum += if cfg.clip_ttr { raw.min(1.0) } else { raw };
                ood_sum += ood;
                id_sum += id;
                count += 1;
            }
            if count == 0 {
                return Err(KernelError::EmptyTasWindow { t });
            }
            Ok(TasEntry {
                ood_avg: ood_sum / count as f64,
                id_avg: id_sum / count as f64,
                tas: term_sum / count as f64,
            })
        }
    }
}

/// Adaptation scores for every training time with a non-empty paired window.
pub fn temporal_adaptation_scores(matrix: &AccuracyMatrix, cfg: &MetricConfig) -> TasResult {
    TasResult::from_entries((0..matrix.periods()).filter_map(|t| {
        temporal_adaptation_score(matrix, t, cfg).ok().map(|e| (t, e))
    }))
}
