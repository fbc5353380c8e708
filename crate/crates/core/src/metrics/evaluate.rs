//! Whole-model evaluation: every kernel for every evaluable training time,
//! assembled into a single serializable report.
//!
//! A training time earns a record only when all three per-time metrics are
//! defined for it; otherwise it is listed as skipped together with the
//! first kernel error (stability, then drift, then adaptation order).
//! Training times whose rows hold no cells at all are not part of the
//! evaluation and appear in neither list.
//!
//! Reports check their own books: aggregates are computed from the per-time
//! records on construction, and [`MetricReport::from_json`] re-verifies
//! them, so a hand-edited document that no longer adds up is rejected
//! rather than propagated into comparison tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ConfigError, MetricConfig};
use super::horizon::{drift_horizon, stability_horizon, Horizon};
use super::tas::temporal_adaptation_score;
use super::ttr::compute_ttr;
use crate::matrix::AccuracyMatrix;

/// Per-training-time results: both horizons plus the adaptation score with
/// the paired averages behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainTimeRecord {
    /// Position on the time axis.
    pub t: usize,
    /// The axis label at `t`.
    pub label: String,
    pub stability_horizon: Horizon,
    pub drift_horizon: Horizon,
    /// Mean forward accuracy over the paired adaptation window.
    pub ood_avg: f64,
    /// Mean oracle accuracy over the same window.
    pub id_avg: f64,
    /// Temporal adaptation score.
    pub tas: f64,
}

/// A training time that was present in the matrix but could not be
/// evaluated, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkippedTrainTime {
    pub t: usize,
    pub label: String,
    pub reason: String,
}

/// Whole-matrix accuracy summaries: the in-domain diagonal and the forward
/// (eval later than train) off-diagonal cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixStats {
    /// Mean of present diagonal cells.
    pub id_avg: f64,
    /// Mean of present cells with eval time after train time.
    pub ood_avg: f64,
    /// Minimum present cell with eval time after train time.
    pub ood_min: f64,
}

impl MatrixStats {
    /// Summarize a matrix. `None` when it has no present diagonal cell or
    /// no present forward cell — there is nothing to average.
    pub fn compute(matrix: &AccuracyMatrix) -> Option<MatrixStats> {
        let mut id_sum = 0.0f64;
        let mut id_count = 0usize;
        let mut ood_sum = 0.0f64;
        let mut ood_count = 0usize;
        let mut ood_min = f64::INFINITY;
        for (train, eval, value) in matrix.cells() {
            if eval == train {
                id_sum += value;
                id_count += 1;
            } else if eval > train {
                ood_sum += value;
                ood_count += 1;
                ood_min = ood_min.min(value);
            }
        }
        (id_count > 0 && ood_count > 0).then(|| MatrixStats {
            id_avg: id_sum / id_count as f64,
            ood_avg: ood_sum / ood_count as f64,
            ood_min,
        })
    }
}

/// Model-level aggregates, all recomputable from the per-time records and
/// the matrix summaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportAggregates {
    /// Mean of present diagonal cells of the accuracy matrix.
    pub id_avg: f64,
    /// Mean of present forward cells of the accuracy matrix.
    pub ood_avg: f64,
    /// Minimum present forward cell of the accuracy matrix.
    pub ood_min: f64,
    /// Mean adaptation score across records.
    pub tas_mean: f64,
    /// Smallest adaptation score across records.
    pub tas_min: f64,
    /// Mean stability horizon across records, in steps.
    pub sh_mean: f64,
    /// Mean drift horizon across records, in steps; sentinel values for
    /// never-crossing training times are included.
    pub dh_mean: f64,
    /// Whether `sh_mean` averages over any data-limited horizon.
    pub sh_mean_includes_truncated: bool,
    /// Whether `dh_mean` includes any never-crossed sentinel.
    pub dh_mean_includes_truncated: bool,
}

impl ReportAggregates {
    fn from_records(records: &[TrainTimeRecord], stats: MatrixStats) -> ReportAggregates {
        debug_assert!(!records.is_empty());
        let len = records.len() as f64;
        let tas_sum: f64 = records.iter().map(|r| r.tas).sum();
        let sh_sum: f64 = records.iter().map(|r| r.stability_horizon.value as f64).sum();
        let dh_sum: f64 = records.iter().map(|r| r.drift_horizon.value as f64).sum();
        let tas_min = records.iter().map(|r| r.tas).fold(f64::INFINITY, f64::min);
        ReportAggregates {
            id_avg: stats.id_avg,
            ood_avg: stats.ood_avg,
            ood_min: stats.ood_min,
            tas_mean: tas_sum / len,
            tas_min,
            sh_mean: sh_sum / len,
            dh_mean: dh_sum / len,
            sh_mean_includes_truncated: records.iter().any(|r| r.stability_horizon.truncated),
            dh_mean_includes_truncated: records.iter().any(|r| r.drift_horizon.truncated),
        }
    }
}

/// All metrics for one model: per-training-time records, skipped training
/// times with reasons, aggregates, and the configuration snapshot they were
/// computed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricReport {
    model_name: String,
    config: MetricConfig,
    records: Vec<TrainTimeRecord>,
    skipped: Vec<SkippedTrainTime>,
    aggregates: ReportAggregates,
}

/// Why a report document failed its internal consistency checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportIntegrityError {
    #[error("not a valid report document: {0}")]
    Malformed(String),
    #[error(transparent)]
    InvalidConfig(#[from] ConfigError),
    #[error("report has no per-train-time records")]
    EmptyRecords,
    #[error("per-train-time entries out of order or duplicated at position {position}")]
    UnsortedRecords { position: usize },
    #[error("train time {t} appears both as a record and as skipped")]
    DuplicateTrainTime { t: usize },
    #[error("{metric} of train time {t} is {value} steps, outside [{min}, {max}]")]
    HorizonOutOfRange { metric: &'static str, t: usize, value: usize, min: usize, max: usize },
    #[error(
        "drift horizon of train time {t} disagrees with its truncation flag: \
         the sentinel value and the flag must come together"
    )]
    SentinelFlagMismatch { t: usize },
    #[error("record field {field} of train time {t} is {value}, outside its valid range")]
    RecordOutOfRange { field: &'static str, t: usize, value: f64 },
    #[error("aggregate {field} is {stored} but recomputes to {expected}")]
    AggregateMismatch { field: &'static str, stored: f64, expected: f64 },
    #[error("aggregate flag {field} disagrees with the per-train-time records")]
    AggregateFlagMismatch { field: &'static str },
    #[error("aggregate {field} is {value}, outside its valid range")]
    AggregateOutOfRange { field: &'static str, value: f64 },
}

/// Why a model could not be evaluated at all.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvaluateError {
    #[error(transparent)]
    InvalidConfig(#[from] ConfigError),
    #[error(
        "no evaluable train time in '{model}': every row lacks the diagonal or the \
         forward cells the metrics require"
    )]
    NoEvaluableTrainTime { model: String },
}

impl MetricReport {
    /// Assemble and verify a report from its parts, computing the
    /// aggregates from the records and matrix summaries.
    pub fn from_parts(
        model_name: impl Into<String>,
        config: MetricConfig,
        records: Vec<TrainTimeRecord>,
        skipped: Vec<SkippedTrainTime>,
        stats: MatrixStats,
    ) -> Result<MetricReport, ReportIntegrityError> {
        if records.is_empty() {
            return Err(ReportIntegrityError::EmptyRecords);
        }
        let aggregates = ReportAggregates::from_records(&records, stats);
        let report = MetricReport {
            model_name: model_name.into(),
            config,
            records,
            skipped,
            aggregates,
        };
        report.validate()?;
        Ok(report)
    }

    /// Parse a report from its JSON document form, re-verifying every
    /// internal invariant including the aggregate arithmetic.
    pub fn from_json(text: &str) -> Result<MetricReport, ReportIntegrityError> {
        let report: MetricReport = serde_json::from_str(text)
            .map_err(|e| ReportIntegrityError::Malformed(e.to_string()))?;
        report.validate()?;
        Ok(report)
    }

    /// Serialize to the JSON document form (pretty-printed, trailing
    /// newline, byte-deterministic).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self)
            .expect("a validated report always serializes");
        text.push('\n');
        text
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn config(&self) -> &MetricConfig {
        &self.config
    }

    /// Per-training-time records in ascending `t` order.
    pub fn records(&self) -> &[TrainTimeRecord] {
        &self.records
    }

    /// Skipped training times in ascending `t` order.
    pub fn skipped(&self) -> &[SkippedTrainTime] {
        &self.skipped
    }

    pub fn aggregates(&self) -> &ReportAggregates {
        &self.aggregates
    }

    fn validate(&self) -> Result<(), ReportIntegrityError> {
        self.config.validate()?;
        if self.records.is_empty() {
            return Err(ReportIntegrityError::EmptyRecords);
        }

        for (i, pair) in self.records.windows(2).enumerate() {
            if pair[0].t >= pair[1].t {
                return Err(ReportIntegrityError::UnsortedRecords { position: i + 1 });
            }
        }
        for (i, pair) in self.skipped.windows(2).enumerate() {
            if pair[0].t >= pair[1].t {
                return Err(ReportIntegrityError::UnsortedRecords { position: i + 1 });
            }
        }
        for s in &self.skipped {
            if self.records.binary_search_by_key(&s.t, |r| r.t).is_ok() {
                return Err(ReportIntegrityError::DuplicateTrainTime { t: s.t });
            }
        }

        let h = self.config.max_horizon;
        for r in &self.records {
            let sh = r.stability_horizon;
            if sh.value > h {
                return Err(ReportIntegrityError::HorizonOutOfRange {
                    metric: "stability horizon",
                    t: r.t,
                    value: sh.value,
                    min: 0,
                    max: h,
                });
            }
            let dh = r.drift_horizon;
            if dh.value < 1 || dh.value > h + 1 {
                return Err(ReportIntegrityError::HorizonOutOfRange {
                    metric: "drift horizon",
                    t: r.t,
                    value: dh.value,
                    min: 1,
                    max: h + 1,
                });
            }
            if dh.truncated != (dh.value == h + 1) {
                return Err(ReportIntegrityError::SentinelFlagMismatch { t: r.t });
            }
            for (field, value, max) in [
                ("ood_avg", r.ood_avg, 1.0),
                ("id_avg", r.id_avg, 1.0),
                ("tas", r.tas, if self.config.clip_ttr { 1.0 } else { f64::INFINITY }),
            ] {
                if !(0.0..=max).contains(&value) {
                    return Err(ReportIntegrityError::RecordOutOfRange {
                        field,
                        t: r.t,
                        value,
                    });
                }
            }
        }

        let a = &self.aggregates;
        for (field, value) in [
            ("id_avg", a.id_avg),
            ("ood_avg", a.ood_avg),
            ("ood_min", a.ood_min),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ReportIntegrityError::AggregateOutOfRange { field, value });
            }
        }
        if a.ood_min > a.ood_avg {
            return Err(ReportIntegrityError::AggregateOutOfRange {
                field: "ood_min",
                value: a.ood_min,
            });
        }

        let recomputed = ReportAggregates::from_records(
            &self.records,
            MatrixStats { id_avg: a.id_avg, ood_avg: a.ood_avg, ood_min: a.ood_min },
        );
        for (field, stored, expected) in [
            ("tas_mean", a.tas_mean, recomputed.tas_mean),
            ("tas_min", a.tas_min, recomputed.tas_min),
            ("sh_mean", a.sh_mean, recomputed.sh_mean),
            ("dh_mean", a.dh_mean, recomputed.dh_mean),
        ] {
            if stored != expected {
                return Err(ReportIntegrityError::AggregateMismatch { field, stored, expected });
            }
        }
        for (field, stored, expected) in [
            (
                "sh_mean_includes_truncated",
                a.sh_mean_includes_truncated,
                recomputed.sh_mean_includes_truncated,
            ),
            (
                "dh_mean_includes_truncated",
                a.dh_mean_includes_truncated,
                recomputed.dh_mean_includes_truncated,
            ),
        ] {
            if stored != expected {
                return Err(ReportIntegrityError::AggregateFlagMismatch { field });
            }
        }
        Ok(())
    }
}

/// Evaluate every training time of a matrix under one configuration.
///
/// A training time becomes a record when the stability horizon, drift
/// horizon, and adaptation score are all defined for it; training times
/// failing any precondition are listed as skipped with the first kernel's
/// reason. Rows with no present cells at all belong to neither list.
pub fn evaluate_model(
    matrix: &AccuracyMatrix,
    cfg: &MetricConfig,
) -> Result<MetricReport, EvaluateError> {
    cfg.validate()?;
    let ttr = compute_ttr(matrix, cfg);

    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for t in 0..matrix.periods() {
        if !matrix.row_present(t) {
            continue;
        }
        let label = matrix
            .axis()
            .label(t)
            .expect("t ranges over the axis")
            .to_string();
        let sh = stability_horizon(&ttr, t, cfg);
        let dh = drift_horizon(matrix, t, cfg);
        let tas = temporal_adaptation_score(matrix, t, cfg);
        match (sh, dh, tas) {
            (Ok(sh), Ok(dh), Ok(tas)) => records.push(TrainTimeRecord {
                t,
                label,
                stability_horizon: sh,
                drift_horizon: dh,
                ood_avg: tas.ood_avg,
                id_avg: tas.id_avg,
                tas: tas.tas,
            }),
            (sh, dh, tas) => {
                let reason = sh
                    .err()
                    .or(dh.err())
                    .or(tas.err())
                    .expect("at least one kernel failed")
                    .to_string();
                skipped.push(SkippedTrainTime { t, label, reason });
            }
        }
    }

    if records.is_empty() {
        return Err(EvaluateError::NoEvaluableTrainTime {
            model: matrix.model_name().to_string(),
        });
    }
    let stats = MatrixStats::compute(matrix)
        .expect("an evaluable train time implies diagonal and forward cells");
    Ok(
        MetricReport::from_parts(matrix.model_name(), cfg.clone(), records, skipped, stats)
            .expect("freshly computed parts are consistent"),
    )
}
