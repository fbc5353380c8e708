//! Partially observed accuracy matrices over an ordered time axis.
//!
//! The central type is [`AccuracyMatrix`]: accuracies `A(t, τ)` of a model
//! trained at period `t` and evaluated on period `τ`, with both indices living
//! on a shared [`TimeAxis`] of opaque, ordered period labels. Matrices are
//! usually partial — a cell that was never evaluated is *absent*, which is a
//! first-class state distinct from an accuracy of `0.0`. Two matrices that
//! differ only in whether a cell is absent or zero are unequal, and every
//! consumer in this crate skips absent cells instead of imputing them.
//!
//! Cells with `τ < t` (evaluation before the training period) are accepted and
//! stored; the horizon metrics ignore them, but raw-accuracy heatmaps and
//! serialization preserve them.
//!
//! Two interchange formats are supported, see [`parse_matrix`] and
//! [`serialize_matrix`]:
//!
//! * **CSV** — first header cell is the literal `train\eval`, the remaining
//!   header cells are the evaluation-period labels in axis order. Each data
//!   row starts with a training-period label (which must appear in the
//!   header) followed by one field per evaluation period; an empty field is
//!   an absent cell. Rows whose training period has no present cells may be
//!   omitted entirely. The CSV format carries no model name.
//! * **JSON** — `{"model_name": …, "labels": […], "cells": [{"train": …,
//!   "eval": …, "acc": …}, …]}` with labels in axis order and cells keyed by
//!   label.
//!
//! Serialization writes each value as the shortest decimal that parses back
//! to the identical `f64`, so `parse(serialize(m))` reproduces labels,
//! presence, and values exactly. Matrices are immutable after construction.

mod io;

use std::collections::HashMap;
use std::io::Read;

/// Upper bound on the number of axis labels.
///
/// Cells are stored densely (`periods²` slots), so the axis length is capped
/// to keep a corrupt or hostile header from requesting a multi-gigabyte
/// allocation. A 4096-period grid (~134 MB) is far beyond any realistic
/// per-period evaluation run.
pub const MAX_LABELS: usize = 4096;

/// Errors from matrix construction, parsing, or row extraction.
#[derive(Debug, thiserror::Error)]
pub enum MatrixError {
    #[error("too many time labels: {count} exceeds the supported maximum of {MAX_LABELS}")]
    TooManyLabels { count: usize },
    #[error("time label at position {position} is empty")]
    EmptyLabel { position: usize },
    #[error("duplicate time label {label:?}")]
    DuplicateLabel { label: String },
    #[error("index {index} is out of range for an axis of {periods} periods")]
    IndexOutOfRange { index: usize, periods: usize },
    #[error("accuracy value {value} at (train {train:?}, eval {eval:?}) outside [0,1]")]
    ValueOutOfRange { train: String, eval: String, value: f64 },
    #[error("duplicate cell at (train {train:?}, eval {eval:?})")]
    DuplicateCell { train: String, eval: String },
    #[error("malformed header: first cell must be the literal `train\\eval`, found {found:?}")]
    MalformedHeader { found: String },
    #[error("row {row}: train label {label:?} does not appear in the header")]
    UnknownTrainLabel { label: String, row: usize },
    #[error("cell {cell}: label {label:?} does not appear in `labels`")]
    UnknownCellLabel { label: String, cell: usize },
    #[error("row {row}: expected {expected} fields, found {found}")]
    RowWidth { row: usize, expected: usize, found: usize },
    #[error("unparseable accuracy at (train {train:?}, eval {eval:?}): {text:?}")]
    UnparseableValue { train: String, eval: String, text: String },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Interchange format selector for [`parse_matrix`] / [`serialize_matrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl std::str::FromStr for MatrixFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "json" => Ok(MatrixFormat::Json),
            other => Err(format!("unknown matrix format {other:?} (expected \"csv\" or \"json\")")),
        }
    }
}

impl std::fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Json => "json",
        })
    }
}

/// An ordered set of unique, opaque period labels.
///
/// Position on the axis defines temporal order; label text is never
/// interpreted. All index arithmetic in the metric kernels happens on axis
/// indices, never on labels.
#[derive(Debug, Clone)]
pub struct TimeAxis {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl TimeAxis {
    /// Builds an axis from labels in temporal order.
    ///
    /// Labels must be non-empty and unique; at most [`MAX_LABELS`] are
    /// accepted. An axis with zero labels is permitted (a degenerate matrix
    /// that can hold no cells).
    pub fn new<I, S>(labels: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_LABELS {
            return Err(MatrixError::TooManyLabels { count: labels.len() });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(MatrixError::EmptyLabel { position: i });
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(MatrixError::DuplicateLabel { label: label.clone() });
            }
        }
        Ok(TimeAxis { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

impl PartialEq for TimeAxis {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for TimeAxis {}

/// A partially observed accuracy matrix.
///
/// Present cells hold accuracies in `[0, 1]`; everything else is absent.
/// Storage is a dense row-major grid so that kernel lookups and full-grid
/// scans stay cheap even at a thousand periods.
#[derive(Debug, Clone)]
pub struct AccuracyMatrix {
    axis: TimeAxis,
    model_name: String,
    // Row-major `periods²` slots; NaN marks an absent cell. NaN can never be
    // a value because values are validated into [0, 1] on construction.
    values: Vec<f64>,
    present: usize,
}

impl AccuracyMatrix {
    /// Builds a matrix from `(train index, eval index, accuracy)` triples.
    ///
    /// Every index must be valid on `axis`, every value must lie in `[0, 1]`,
    /// and no cell may appear twice.
    pub fn from_cells<I>(
        axis: TimeAxis,
        model_name: impl Into<String>,
        cells: I,
    ) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let periods = axis.len();
        let mut values = vec![f64::NAN; periods * periods];
        let mut present = 0usize;
        for (train, eval, value) in cells {
            if train >= periods {
                return Err(MatrixError::IndexOutOfRange { index: train, periods });
            }
            if eval >= periods {
                return Err(MatrixError::IndexOutOfRange { index: eval, periods });
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(MatrixError::ValueOutOfRange {
                    train: axis.labels[train].clone(),
                    eval: axis.labels[eval].clone(),
                    value,
                });
            }
            let slot = &mut values[train * periods + eval];
            if !slot.is_nan() {
                return Err(MatrixError::DuplicateCell {
                    train: axis.labels[train].clone(),
                    eval: axis.labels[eval].clone(),
                });
            }
            *slot = value;
            present += 1;
        }
        Ok(AccuracyMatrix { axis, model_name: model_name.into(), values, present })
    }

    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    /// Returns the same matrix under a different model name.
    pub fn with_model_name(mut self, model_name: impl Into<String>) -> Self {
        self.model_name = model_name.into();
        self
    }

    /// Number of periods on the axis.
    pub fn periods(&self) -> usize {
        self.axis.len()
    }

    /// Number of present cells.
    pub fn cell_count(&self) -> usize {
        self.present
    }

    /// The accuracy at `(train, eval)`, or `None` when the cell is absent or
    /// either index is out of range.
    pub fn get(&self, train: usize, eval: usize) -> Option<f64> {
        let periods = self.axis.len();
        if train >= periods || eval >= periods {
            return None;
        }
        let v = self.values[train * periods + eval];
        if v.is_nan() {
            None
        } else {
            Some(v)
        }
    }

    /// Whether any cell in training row `train` is present.
    pub fn row_present(&self, train: usize) -> bool {
        let periods = self.axis.len();
        train < periods
            && self.values[train * periods..(train + 1) * periods]
                .iter()
                .any(|v| !v.is_nan())
    }

    /// Present cells as `(train, eval, accuracy)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let periods = self.axis.len();
        self.values.iter().enumerate().filter_map(move |(i, v)| {
            if v.is_nan() {
                None
            } else {
                Some((i / periods, i % periods, *v))
            }
        })
    }

    /// Grid equality: same labels, same presence pattern, same values.
    ///
    /// This is the equality the round-trip contract quantifies over; unlike
    /// `==` it ignores the model name (the CSV format does not carry one).
    pub fn same_grid(&self, other: &Self) -> bool {
        self.axis == other.axis
            && self.present == other.present
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a.is_nan() && b.is_nan()) || a == b)
    }
}

impl PartialEq for AccuracyMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.model_name == other.model_name && self.same_grid(other)
    }
}

impl Eq for AccuracyMatrix {}

/// The present cells of training row `t` as `(offset, accuracy)` pairs with
/// `offset = τ − t ≥ 0`, in increasing offset order. Absent cells are skipped;
/// cells with `τ < t` are not reported.
pub fn eval_row(matrix: &AccuracyMatrix, t: usize) -> Result<Vec<(usize, f64)>, MatrixError> {
    let periods = matrix.periods();
    if t >= periods {
        return Err(MatrixError::IndexOutOfRange { index: t, periods });
    }
    Ok((t..periods)
        .filter_map(|tau| matrix.get(t, tau).map(|v| (tau - t, v)))
        .collect())
}

/// Parses a matrix document in the given format.
pub fn parse_matrix<R: Read>(reader: R, format: MatrixFormat) -> Result<AccuracyMatrix, MatrixError> {
    match format {
        MatrixFormat::Csv => io::parse_csv(reader),
        MatrixFormat::Json => io::parse_json(reader),
    }
}

/// Serializes a matrix in the given format.
///
/// Output is deterministic: cells are written in row-major order and values as
/// the shortest round-trippable decimals. Valid matrices always serialize.
pub fn serialize_matrix(matrix: &AccuracyMatrix, format: MatrixFormat) -> Vec<u8> {
    match format {
        MatrixFormat::Csv => io::write_csv(matrix),
        MatrixFormat::Json => io::write_json(matrix),
    }
}
