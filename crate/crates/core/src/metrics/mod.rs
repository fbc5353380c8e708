//! Metric kernels over accuracy matrices.
//!
//! Everything in this module is a pure function of an immutable
//! [`AccuracyMatrix`](crate::matrix::AccuracyMatrix) and a [`MetricConfig`]:
//!
//! * [`compute_ttr`] — the grid of transfer ratios `g(t, τ)`;
//! * [`stability_horizon`] — how long `g` stays at or above a tolerance;
//! * [`drift_statistic`] / [`drift_horizon`] — CUSUM change detection on
//!   deviations from the training diagonal;
//! * [`temporal_adaptation_score`] — forward accuracy normalized by
//!   contemporaneous oracle accuracy;
//! * [`evaluate_model`] — all of the above for every evaluable training
//!   time, assembled into a [`MetricReport`].
//!
//! Per-training-time kernels return [`KernelError`] when a training time
//! lacks the cells the metric needs; the bulk helpers and
//! [`evaluate_model`] record such training times as skipped rather than
//! inventing values for them.

mod config;
mod evaluate;
mod horizon;
mod tas;
mod ttr;

pub use config::{ConfigError, MetricConfig, ShMode, TasMode};
pub use evaluate::{
    evaluate_model, EvaluateError, MatrixStats, MetricReport, ReportAggregates,
    ReportIntegrityError, SkippedTrainTime, TrainTimeRecord,
};
pub use horizon::{
    drift_horizon, drift_horizons, drift_statistic, stability_horizon, stability_horizons,
    Horizon, HorizonResult,
};
pub use tas::{temporal_adaptation_score, temporal_adaptation_scores, TasEntry, TasResult};
pub use ttr::{compute_ttr, TtrCell, TtrMatrix};

use thiserror::Error;

/// Why a metric kernel could not produce a value for a training time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("train time index {index} is out of range for an axis of {periods} periods")]
    TrainIndexOutOfRange { index: usize, periods: usize },
    #[error(
        "train time {t} has no defined oracle baseline: the diagonal accuracy is absent or zero"
    )]
    UndefinedOracle { t: usize },
    #[error("train time {t} has no diagonal accuracy to anchor the drift statistic")]
    DiagonalAbsent { t: usize },
    #[error(
        "the adaptation window of train time {t} has no offset where both the forward \
         accuracy and the oracle accuracy are present"
    )]
    EmptyTasWindow { t: usize },
    #[error("the oracle accuracies in the adaptation window of train time {t} average to zero")]
    ZeroIdBaseline { t: usize },
}
