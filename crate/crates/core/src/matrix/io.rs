//! CSV and JSON readers/writers for [`AccuracyMatrix`].
//!
//! Both writers are deterministic (row-major cell order, shortest
//! round-trippable decimals) so identical matrices always serialize to
//! identical bytes. Both readers reject, with an error naming the offending
//! row/column or cell, every document that does not encode a valid matrix:
//! malformed headers, duplicate labels, duplicate cells, values outside
//! `[0, 1]`, and unparseable numbers.

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{AccuracyMatrix, MatrixError, TimeAxis};

/// Literal content of the first CSV header cell.
const HEADER_CELL: &str = r"train\eval";

pub(super) fn parse_csv<R: Read>(reader: R) -> Result<AccuracyMatrix, MatrixError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(record) => record?,
        None => {
            return Err(MatrixError::MalformedHeader { found: String::from("<empty document>") })
        }
    };
    let first = header.get(0).unwrap_or_default();
    if first != HEADER_CELL {
        return Err(MatrixError::MalformedHeader { found: first.to_string() });
    }
    let axis = TimeAxis::new(header.iter().skip(1).map(str::to_string))?;
    let periods = axis.len();

    let mut cells = Vec::new();
    let mut seen_rows: HashSet<usize> = HashSet::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        let row = i + 2; // 1-based, counting the header line
        if record.len() != periods + 1 {
            return Err(MatrixError::RowWidth {
                row,
                expected: periods + 1,
                found: record.len(),
            });
        }
        let train_label = &record[0];
        let train = axis
            .index_of(train_label)
            .ok_or_else(|| MatrixError::UnknownTrainLabel { label: train_label.to_string(), row })?;
        if !seen_rows.insert(train) {
            return Err(MatrixError::DuplicateLabel { label: train_label.to_string() });
        }
        for (eval, field) in record.iter().skip(1).enumerate() {
            if field.is_empty() {
                continue;
            }
            let value: f64 = field.parse().map_err(|_| MatrixError::UnparseableValue {
                train: train_label.to_string(),
                eval: axis.labels()[eval].clone(),
                text: field.to_string(),
            })?;
            cells.push((train, eval, value));
        }
    }
    // The CSV format carries no model name; callers that need one (the CLI
    // uses the file stem) rename via `with_model_name`.
    AccuracyMatrix::from_cells(axis, "", cells)
}

pub(super) fn write_csv(matrix: &AccuracyMatrix) -> Vec<u8> {
    let periods = matrix.periods();
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());

    let mut header = Vec::with_capacity(periods + 1);
    header.push(HEADER_CELL.to_string());
    header.extend(matrix.axis().labels().iter().cloned());
    w.write_record(&header).expect("writing CSV to a Vec cannot fail");

    for train in 0..periods {
        if !matrix.row_present(train) {
            continue;
        }
        let mut record = Vec::with_capacity(periods + 1);
        record.push(matrix.axis().labels()[train].clone());
        for eval in 0..periods {
            match matrix.get(train, eval) {
                Some(v) => record.push(format_value(v)),
                None => record.push(String::new()),
            }
        }
        w.write_record(&record).expect("writing CSV to a Vec cannot fail");
    }
    w.into_inner().expect("flushing a CSV Vec writer cannot fail")
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    model_name: String,
    labels: Vec<String>,
    cells: Vec<CellDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellDoc {
    train: String,
    eval: String,
    acc: f64,
}

pub(super) fn parse_json<R: Read>(reader: R) -> Result<AccuracyMatrix, MatrixError> {
    let doc: MatrixDoc =
        serde_json::from_reader(reader).map_err(|e| MatrixError::MalformedJson(e.to_string()))?;
    let axis = TimeAxis::new(doc.labels)?;
    let mut cells = Vec::with_capacity(doc.cells.len());
    for (i, cell) in doc.cells.iter().enumerate() {
        let train = axis
            .index_of(&cell.train)
            .ok_or_else(|| MatrixError::UnknownCellLabel { label: cell.train.clone(), cell: i })?;
        let eval = axis
            .index_of(&cell.eval)
            .ok_or_else(|| MatrixError::UnknownCellLabel { label: cell.eval.clone(), cell: i })?;
        cells.push((train, eval, cell.acc));
    }
    AccuracyMatrix::from_cells(axis, doc.model_name, cells)
}

pub(super) fn write_json(matrix: &AccuracyMatrix) -> Vec<u8> {
    let doc = MatrixDoc {
        model_name: matrix.model_name().to_string(),
        labels: matrix.axis().labels().to_vec(),
        cells: matrix
            .cells()
            .map(|(train, eval, acc)| CellDoc {
                train: matrix.axis().labels()[train].clone(),
                eval: matrix.axis().labels()[eval].clone(),
                acc,
            })
            .collect(),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("matrix documents always serialize");
    out.push(b'\n');
    out
}

/// Shortest decimal representation that parses back to the identical `f64`.
fn format_value(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::super::{eval_row, parse_matrix, serialize_matrix, MatrixFormat};
    use super::*;

    fn parse_csv_str(s: &str) -> Result<AccuracyMatrix, MatrixError> {
        parse_matrix(s.as_bytes(), MatrixFormat::Csv)
    }

    #[test]
    fn csv_diagonal_only_grid() {
        let doc = "train\\eval,2000,2001,2002\n2000,1,,\n2001,,0.9,\n2002,,,0.8\n";
        let m = parse_csv_str(doc).unwrap();
        assert_eq!(m.periods(), 3);
        assert_eq!(m.cell_count(), 3);
        assert_eq!(m.get(0, 0), Some(1.0));
        assert_eq!(m.get(1, 1), Some(0.9));
        assert_eq!(m.get(2, 2), Some(0.8));
        assert_eq!(m.get(0, 1), None);
        assert_eq!(m.get(2, 0), None);
    }

    #[test]
    fn csv_rows_may_cover_a_subset_of_the_axis() {
        // Wide layout: more evaluation periods than training rows.
        let doc = "train\\eval,2000,2001,2002,2003\n2000,0.9,0.8,0.7,0.6\n2001,,0.9,0.85,0.8\n";
        let m = parse_csv_str(doc).unwrap();
        assert_eq!(m.periods(), 4);
        assert_eq!(m.cell_count(), 7);
        assert_eq!(eval_row(&m, 1).unwrap(), vec![(0, 0.9), (1, 0.85), (2, 0.8)]);
        // Axis rows 2 and 3 simply hold no cells.
        assert!(!m.row_present(2));
        assert!(!m.row_present(3));
    }

    #[test]
    fn csv_header_only_is_a_valid_empty_matrix() {
        let m = parse_csv_str("train\\eval,2000\n").unwrap();
        assert_eq!(m.periods(), 1);
        assert_eq!(m.cell_count(), 0);
        // And it round-trips: serialization of a matrix with no present rows
        // is the header alone.
        let bytes = serialize_matrix(&m, MatrixFormat::Csv);
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), "train\\eval,2000\n");
        assert!(parse_matrix(&bytes[..], MatrixFormat::Csv).unwrap().same_grid(&m));
    }

    #[test]
    fn csv_malformed_header_is_rejected() {
        let err = parse_csv_str("time,2000\n").unwrap_err();
        assert!(matches!(err, MatrixError::MalformedHeader { .. }), "{err}");
        let err = parse_csv_str("").unwrap_err();
        assert!(matches!(err, MatrixError::MalformedHeader { .. }), "{err}");
    }

    #[test]
    fn csv_rejects_duplicate_labels() {
        let err = parse_csv_str("train\\eval,2000,2000\n").unwrap_err();
        assert!(matches!(err, MatrixError::DuplicateLabel { label } if label == "2000"));
        let err =
            parse_csv_str("train\\eval,2000,2001\n2000,0.5,\n2000,,0.5\n").unwrap_err();
        assert!(matches!(err, MatrixError::DuplicateLabel { label } if label == "2000"));
    }

    #[test]
    fn csv_rejects_unknown_train_label_with_row_number() {
        let err = parse_csv_str("train\\eval,2000,2001\n1999,0.5,\n").unwrap_err();
        assert!(
            matches!(&err, MatrixError::UnknownTrainLabel { label, row: 2 } if label == "1999"),
            "{err}"
        );
    }

    #[test]
    fn csv_rejects_bad_row_width() {
        let err = parse_csv_str("train\\eval,2000,2001\n2000,0.5\n").unwrap_err();
        assert!(
            matches!(err, MatrixError::RowWidth { row: 2, expected: 3, found: 2 }),
            "{err}"
        );
    }

    #[test]
    fn csv_rejects_out_of_range_and_unparseable_values() {
        let err = parse_csv_str("train\\eval,2000,2001\n2000,1.3,\n").unwrap_err();
        assert!(err.to_string().contains("outside [0,1]"), "{err}");

        let err = parse_csv_str("train\\eval,2000,2001\n2000,,abc\n").unwrap_err();
        assert!(
            matches!(&err, MatrixError::UnparseableValue { train, eval, text }
                if train == "2000" && eval == "2001" && text == "abc"),
            "{err}"
        );

        // NaN and infinities parse as floats but are not accuracies.
        let err = parse_csv_str("train\\eval,2000,2001\n2000,NaN,\n").unwrap_err();
        assert!(err.to_string().contains("outside [0,1]"), "{err}");
    }

    #[test]
    fn csv_quotes_labels_with_separators() {
        let axis = TimeAxis::new(["q1, 2000", "q2, 2000"]).unwrap();
        let m = AccuracyMatrix::from_cells(axis, "", [(0, 0, 0.75), (0, 1, 0.5)]).unwrap();
        let bytes = serialize_matrix(&m, MatrixFormat::Csv);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"q1, 2000\""), "{text}");
        let back = parse_matrix(&bytes[..], MatrixFormat::Csv).unwrap();
        assert!(back.same_grid(&m));
    }

    #[test]
    fn csv_values_round_trip_exactly() {
        let axis = TimeAxis::new(["a", "b"]).unwrap();
        let tricky = 0.123_456_789_012_345_68; // needs all 17 significant digits
        let m = AccuracyMatrix::from_cells(
            axis,
            "",
            [(0, 0, tricky), (0, 1, 1.0), (1, 0, f64::MIN_POSITIVE), (1, 1, 0.0)],
        )
        .unwrap();
        let bytes = serialize_matrix(&m, MatrixFormat::Csv);
        let back = parse_matrix(&bytes[..], MatrixFormat::Csv).unwrap();
        assert!(back.same_grid(&m));
        // Serialization is deterministic byte-for-byte.
        assert_eq!(bytes, serialize_matrix(&back, MatrixFormat::Csv));
    }

    #[test]
    fn json_document_round_trips_including_model_name() {
        let doc = r#"{
            "model_name": "erm-2013",
            "labels": ["2013", "2014", "2015"],
            "cells": [
                {"train": "2013", "eval": "2013", "acc": 0.91},
                {"train": "2013", "eval": "2015", "acc": 0.77},
                {"train": "2014", "eval": "2014", "acc": 0.9}
            ]
        }"#;
        let m = parse_matrix(doc.as_bytes(), MatrixFormat::Json).unwrap();
        assert_eq!(m.model_name(), "erm-2013");
        assert_eq!(m.get(0, 2), Some(0.77));
        assert_eq!(m.get(0, 1), None);

        let bytes = serialize_matrix(&m, MatrixFormat::Json);
        let back = parse_matrix(&bytes[..], MatrixFormat::Json).unwrap();
        assert_eq!(back, m);
        assert_eq!(bytes, serialize_matrix(&back, MatrixFormat::Json));
    }

    #[test]
    fn json_rejects_duplicate_cells_unknown_labels_and_bad_values() {
        let dup = r#"{"model_name":"m","labels":["a"],"cells":[
            {"train":"a","eval":"a","acc":0.5},
            {"train":"a","eval":"a","acc":0.6}]}"#;
        let err = parse_matrix(dup.as_bytes(), MatrixFormat::Json).unwrap_err();
        assert!(matches!(err, MatrixError::DuplicateCell { .. }), "{err}");

        let unknown = r#"{"model_name":"m","labels":["a"],"cells":[
            {"train":"b","eval":"a","acc":0.5}]}"#;
        let err = parse_matrix(unknown.as_bytes(), MatrixFormat::Json).unwrap_err();
        assert!(
            matches!(&err, MatrixError::UnknownCellLabel { label, cell: 0 } if label == "b"),
            "{err}"
        );

        let range = r#"{"model_name":"m","labels":["a"],"cells":[
            {"train":"a","eval":"a","acc":1.3}]}"#;
        let err = parse_matrix(range.as_bytes(), MatrixFormat::Json).unwrap_err();
        assert!(err.to_string().contains("outside [0,1]"), "{err}");

        let err = parse_matrix(&b"{not json"[..], MatrixFormat::Json).unwrap_err();
        assert!(matches!(err, MatrixError::MalformedJson(_)), "{err}");
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Random partial matrices: unique printable labels (commas and
        /// spaces included, to exercise CSV quoting), presence decided per
        /// cell, values across [0, 1] including exact endpoints.
        fn arb_matrix() -> impl Strategy<Value = AccuracyMatrix> {
            let label = proptest::string::string_regex("[a-zA-Z0-9 ,._-]{1,8}").unwrap();
            (1usize..7, proptest::collection::vec(label, 7), "[a-z0-9_]{0,12}")
                .prop_flat_map(|(periods, mut raw_labels, name)| {
                    raw_labels.truncate(periods);
                    // De-duplicate by suffixing the position.
                    let labels: Vec<String> = raw_labels
                        .into_iter()
                        .enumerate()
                        .map(|(i, l)| format!("{l}#{i}"))
                        .collect();
                    let value = prop_oneof![
                        2 => Just(0.0),
                        2 => Just(1.0),
                        8 => 0.0..=1.0f64,
                    ];
                    let cell = proptest::option::weighted(0.6, value);
                    (
                        Just(labels),
                        proptest::collection::vec(cell, periods * periods),
                        Just(name),
                    )
                })
                .prop_map(|(labels, slots, name)| {
                    let periods = labels.len();
                    let axis = TimeAxis::new(labels).unwrap();
                    let cells = slots.into_iter().enumerate().filter_map(|(i, v)| {
                        v.map(|v| (i / periods, i % periods, v))
                    });
                    AccuracyMatrix::from_cells(axis, name, cells).unwrap()
                })
        }

        proptest! {
            #[test]
            fn csv_round_trip_preserves_grid(m in arb_matrix()) {
                let bytes = serialize_matrix(&m, MatrixFormat::Csv);
                let back = parse_matrix(&bytes[..], MatrixFormat::Csv).unwrap();
                prop_assert!(back.same_grid(&m));
            }

            #[test]
            fn json_round_trip_preserves_everything(m in arb_matrix()) {
                let bytes = serialize_matrix(&m, MatrixFormat::Json);
                let back = parse_matrix(&bytes[..], MatrixFormat::Json).unwrap();
                prop_assert!(back == m);
            }

            #[test]
            fn eval_row_matches_naive_scan(m in arb_matrix(), t_pick in 0usize..7) {
                let t = t_pick % m.periods();
                let mut expected = Vec::new();
                for tau in t..m.periods() {
                    if let Some(v) = m.get(t, tau) {
                        expected.push((tau - t, v));
                    }
                }
                prop_assert_eq!(eval_row(&m, t).unwrap(), expected);
            }
        }
    }
}
