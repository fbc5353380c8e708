//! Presentation of metric reports: comparison tables, heatmap grids, and
//! timeline series.
//!
//! Everything here formats immutable data and is byte-deterministic:
//! identical inputs produce identical documents. Percentages render to one
//! decimal place, horizons to one decimal place in steps. A horizon mean
//! that averages over data-limited train times is footnoted in text output
//! and flagged in JSON output, so censoring stays visible after
//! aggregation.

use serde::Serialize;
use thiserror::Error;

use crate::matrix::AccuracyMatrix;
use crate::metrics::{MetricReport, TtrCell, TtrMatrix};

/// Selectable columns of the model comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableColumn {
    /// Mean accuracy on the training period itself (diagonal).
    Id,
    /// Mean accuracy on later periods (forward off-diagonals).
    Ood,
    /// Worst accuracy on any later period.
    OodMin,
    /// Mean temporal adaptation score.
    TasAvg,
    /// Worst temporal adaptation score.
    TasMin,
    /// Mean stability horizon in steps.
    ShAvg,
    /// Mean drift horizon in steps (sentinels included).
    DhAvg,
}

impl TableColumn {
    /// Every column in the default order.
    pub fn all() -> [TableColumn; 7] {
        [
            TableColumn::Id,
            TableColumn::Ood,
            TableColumn::OodMin,
            TableColumn::TasAvg,
            TableColumn::TasMin,
            TableColumn::ShAvg,
            TableColumn::DhAvg,
        ]
    }

    /// Flag-style identifier.
    pub fn name(&self) -> &'static str {
        match self {
            TableColumn::Id => "id",
            TableColumn::Ood => "ood",
            TableColumn::OodMin => "ood-min",
            TableColumn::TasAvg => "tas-avg",
            TableColumn::TasMin => "tas-min",
            TableColumn::ShAvg => "sh-avg",
            TableColumn::DhAvg => "dh-avg",
        }
    }

    /// Human-readable column header.
    pub fn header(&self) -> &'static str {
        match self {
            TableColumn::Id => "ID Avg.",
            TableColumn::Ood => "OOD Avg.",
            TableColumn::OodMin => "OOD Min.",
            TableColumn::TasAvg => "TAS Avg.",
            TableColumn::TasMin => "TAS Min.",
            TableColumn::ShAvg => "SH Avg. (steps)",
            TableColumn::DhAvg => "DH Avg. (steps)",
        }
    }

    fn is_percentage(&self) -> bool {
        !matches!(self, TableColumn::ShAvg | TableColumn::DhAvg)
    }
}

impl std::fmt::Display for TableColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TableColumn {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TableColumn::all()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ReportError::UnknownColumn(s.to_string()))
    }
}

/// Why a presentation document could not be assembled.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReportError {
    #[error(
        "mixed configs: report '{first}' and report '{second}' were computed under \
         different configurations"
    )]
    MixedConfigs { first: String, second: String },
    #[error("cannot build a table from zero reports")]
    EmptyReportSet,
    #[error("cannot build a table with zero columns")]
    EmptyColumnSet,
    #[error(
        "unknown table column '{0}': expected id, ood, ood-min, tas-avg, tas-min, \
         sh-avg, or dh-avg"
    )]
    UnknownColumn(String),
    #[error("report for '{model}' does not describe this matrix: {detail}")]
    ReportMatrixMismatch { model: String, detail: String },
}

/// One rendered table cell: the raw aggregate, its rendering, and whether
/// the value averages over data-limited train times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub column: TableColumn,
    pub value: f64,
    pub rendered: String,
    pub includes_truncated: bool,
}

/// One model's row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub model: String,
    pub cells: Vec<TableCell>,
}

/// A model comparison table; rows in input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub columns: Vec<TableColumn>,
    pub rows: Vec<TableRow>,
}

/// Build a comparison table from reports computed under one configuration.
/// Rows keep the input order; columns keep the selection order.
pub fn comparison_table(
    reports: &[&MetricReport],
    columns: &[TableColumn],
) -> Result<ComparisonTable, ReportError> {
    let first = reports.first().ok_or(ReportError::EmptyReportSet)?;
    if columns.is_empty() {
        return Err(ReportError::EmptyColumnSet);
    }
    for report in &reports[1..] {
        if report.config() != first.config() {
            return Err(ReportError::MixedConfigs {
                first: first.model_name().to_string(),
                second: report.model_name().to_string(),
            });
        }
    }

    let rows = reports
        .iter()
        .map(|report| {
            let a = report.aggregates();
            let cells = columns
                .iter()
                .map(|&column| {
                    let (value, includes_truncated) = match column {
                        TableColumn::Id => (a.id_avg, false),
                        TableColumn::Ood => (a.ood_avg, false),
                        TableColumn::OodMin => (a.ood_min, false),
                        TableColumn::TasAvg => (a.tas_mean, false),
                        TableColumn::TasMin => (a.tas_min, false),
                        TableColumn::ShAvg => (a.sh_mean, a.sh_mean_includes_truncated),
                        TableColumn::DhAvg => (a.dh_mean, a.dh_mean_includes_truncated),
                    };
                    let rendered = if column.is_percentage() {
                        format!("{:.1}%", value * 100.0)
                    } else {
                        format!("{value:.1}")
                    };
                    TableCell { column, value, rendered, includes_truncated }
                })
                .collect();
            TableRow { model: report.model_name().to_string(), cells }
        })
        .collect();

    Ok(ComparisonTable { columns: columns.to_vec(), rows })
}

impl ComparisonTable {
    /// Aligned plain-text rendering with a footnote when any mean includes
    /// data-limited train times.
    pub fn render_text(&self) -> String {
        let headers: Vec<&str> = std::iter::once("model")
            .chain(self.columns.iter().map(|c| c.header()))
            .collect();
        let mut grid: Vec<Vec<String>> =
            vec![headers.iter().map(|h| h.to_string()).collect()];
        let mut any_footnote = false;
        for row in &self.rows {
            let mut line = vec![row.model.clone()];
            for cell in &row.cells {
                if cell.includes_truncated {
                    any_footnote = true;
                    line.push(format!("{}*", cell.rendered));
                } else {
                    line.push(cell.rendered.clone());
                }
            }
            grid.push(line);
        }

        let widths: Vec<usize> = (0..headers.len())
            .map(|i| grid.iter().map(|line| line[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &grid {
            let mut rendered_line = String::new();
            for (i, text) in line.iter().enumerate() {
                if i > 0 {
                    rendered_line.push_str("  ");
                    // Numeric columns are right-aligned under their header.
                    rendered_line.push_str(&" ".repeat(widths[i] - text.len()));
                    rendered_line.push_str(text);
                } else {
                    rendered_line.push_str(text);
                    rendered_line.push_str(&" ".repeat(widths[i] - text.len()));
                }
            }
            out.push_str(rendered_line.trim_end());
            out.push('\n');
        }
        if any_footnote {
            out.push_str("* mean includes train times cut short by the evaluation window\n");
        }
        out
    }

    /// JSON document form (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("a table always serializes");
        text.push('\n');
        text
    }

    /// CSV form with raw (unrounded) values. Each horizon-mean column is
    /// followed by a `…-includes-truncated` column, so censoring stays
    /// machine-readable.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["model".to_string()];
        for column in &self.columns {
            header.push(column.name().to_string());
            if !column.is_percentage() {
                header.push(format!("{}-includes-truncated", column.name()));
            }
        }
        writer.write_record(&header).expect("writing to memory cannot fail");
        for row in &self.rows {
            let mut record = vec![row.model.clone()];
            for cell in &row.cells {
                record.push(format!("{}", cell.value));
                if !cell.column.is_percentage() {
                    record.push(cell.includes_truncated.to_string());
                }
            }
            writer.write_record(&record).expect("writing to memory cannot fail");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush"))
            .expect("csv output is utf-8")
    }
}

/// Marker for heatmap cells that carry no plottable value, plus the
/// exact-center tag for diverging colormaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellTag {
    /// No evaluation was recorded for this train/eval pair.
    NonEvaluated,
    /// The ratio is undefined because the eval-time oracle is absent or zero.
    UndefinedOracle,
    /// The value sits exactly on the requested center.
    AtCenter,
}

/// One heatmap cell: a value, or a tag explaining its absence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeatmapCell {
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<CellTag>,
}

/// Plot-ready grid: axis labels, per-cell values/tags, and the requested
/// colormap center.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapData {
    pub model_name: String,
    pub labels: Vec<String>,
    pub center: Option<f64>,
    /// Row-major: `cells[train][eval]`.
    pub cells: Vec<Vec<HeatmapCell>>,
}

fn value_cell(value: f64, center: Option<f64>) -> HeatmapCell {
    let tag = (center == Some(value)).then_some(CellTag::AtCenter);
    HeatmapCell { value: Some(value), tag }
}

/// Heatmap grid of raw accuracies.
pub fn heatmap_data(matrix: &AccuracyMatrix, center: Option<f64>) -> HeatmapData {
    let p = matrix.periods();
    let cells = (0..p)
        .map(|train| {
            (0..p)
                .map(|eval| match matrix.get(train, eval) {
                    Some(v) => value_cell(v, center),
                    None => HeatmapCell { value: None, tag: Some(CellTag::NonEvaluated) },
                })
                .collect()
        })
        .collect();
    HeatmapData {
        model_name: matrix.model_name().to_string(),
        labels: matrix.axis().labels().to_vec(),
        center,
        cells,
    }
}

/// Heatmap grid of transfer ratios, with undefined-oracle cells marked
/// distinctly from never-evaluated ones.
pub fn heatmap_data_ttr(ttr: &TtrMatrix, center: Option<f64>) -> HeatmapData {
    let p = ttr.periods();
    let cells = (0..p)
        .map(|train| {
            (0..p)
                .map(|eval| match ttr.get(train, eval) {
                    TtrCell::Ratio(g) => value_cell(g, center),
                    TtrCell::UndefinedOracle => {
                        HeatmapCell { value: None, tag: Some(CellTag::UndefinedOracle) }
                    }
                    TtrCell::Absent => {
                        HeatmapCell { value: None, tag: Some(CellTag::NonEvaluated) }
                    }
                })
                .collect()
        })
        .collect();
    HeatmapData {
        model_name: ttr.model_name().to_string(),
        labels: ttr.axis().labels().to_vec(),
        center,
        cells,
    }
}

impl HeatmapData {
    /// JSON document form (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("a heatmap always serializes");
        text.push('\n');
        text
    }

    /// CSV grid: one row per train label, `undef` for undefined-oracle
    /// cells, empty fields for never-evaluated ones. Every row is written,
    /// empty or not — the grid is meant to be plotted whole.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec![r"train\eval".to_string()];
        header.extend(self.labels.iter().cloned());
        writer.write_record(&header).expect("writing to memory cannot fail");
        for (train, row) in self.cells.iter().enumerate() {
            let mut record = vec![self.labels[train].clone()];
            for cell in row {
                record.push(match (cell.value, cell.tag) {
                    (Some(v), _) => format!("{v}"),
                    (None, Some(CellTag::UndefinedOracle)) => "undef".to_string(),
                    (None, _) => String::new(),
                });
            }
            writer.write_record(&record).expect("writing to memory cannot fail");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush"))
            .expect("csv output is utf-8")
    }
}

/// One aligned point of the per-train-time series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelinePoint {
    pub t: usize,
    pub label: String,
    /// Accuracy on the training period itself.
    pub id_acc: f64,
    /// Mean forward accuracy over the paired adaptation window.
    pub ood_avg: f64,
    /// Temporal adaptation score.
    pub tas: f64,
}

/// Per-train-time trends of in-domain accuracy, forward accuracy, and
/// adaptation score, aligned on the time axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineSeries {
    pub model_name: String,
    pub points: Vec<TimelinePoint>,
}

/// Align a report's records with the matrix it was computed from.
pub fn timeline_series(
    report: &MetricReport,
    matrix: &AccuracyMatrix,
) -> Result<TimelineSeries, ReportError> {
    let mismatch = |detail: String| ReportError::ReportMatrixMismatch {
        model: report.model_name().to_string(),
        detail,
    };
    if report.model_name() != matrix.model_name() {
        return Err(mismatch(format!("the matrix is named '{}'", matrix.model_name())));
    }
    let mut points = Vec::with_capacity(report.records().len());
    for record in report.records() {
        if record.t >= matrix.periods() {
            return Err(mismatch(format!(
                "record train time {} is outside the {}-period axis",
                record.t,
                matrix.periods()
            )));
        }
        let axis_label = matrix
            .axis()
            .label(record.t)
            .expect("bounds were checked above");
        if record.label != axis_label {
            return Err(mismatch(format!(
                "record at train time {} is labeled '{}' but the axis says '{axis_label}'",
                record.t, record.label
            )));
        }
        let id_acc = matrix.get(record.t, record.t).ok_or_else(|| {
            mismatch(format!("train time {} has no diagonal accuracy", record.t))
        })?;
        points.push(TimelinePoint {
            t: record.t,
            label: record.label.clone(),
            id_acc,
            ood_avg: record.ood_avg,
            tas: record.tas,
        });
    }
    Ok(TimelineSeries { model_name: report.model_name().to_string(), points })
}

impl TimelineSeries {
    /// JSON document form (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("a series always serializes");
        text.push('\n');
        text
    }

    /// CSV form: `t,label,id_acc,ood_avg,tas`, one row per evaluated train
    /// time.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["t", "label", "id_acc", "ood_avg", "tas"])
            .expect("writing to memory cannot fail");
        for p in &self.points {
            writer
                .write_record([
                    p.t.to_string(),
                    p.label.clone(),
                    format!("{}", p.id_acc),
                    format!("{}", p.ood_avg),
                    format!("{}", p.tas),
                ])
                .expect("writing to memory cannot fail");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush"))
            .expect("csv output is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{AccuracyMatrix, TimeAxis};
    use crate::metrics::{
        compute_ttr, evaluate_model, Horizon, MatrixStats, MetricConfig, TrainTimeRecord,
    };
    use crate::scenario::{generate, scenario_suite, Presence, ScenarioSpec};

    fn matrix(labels: usize, cells: &[(usize, usize, f64)]) -> AccuracyMatrix {
        let axis = TimeAxis::new((0..labels).map(|i| format!("y{i}"))).unwrap();
        AccuracyMatrix::from_cells(axis, "demo", cells.iter().copied()).unwrap()
    }

    fn record(t: usize, sh: (usize, bool), dh: (usize, bool), tas: f64) -> TrainTimeRecord {
        TrainTimeRecord {
            t,
            label: format!("y{t}"),
            stability_horizon: Horizon { value: sh.0, truncated: sh.1 },
            drift_horizon: Horizon { value: dh.0, truncated: dh.1 },
            ood_avg: 0.5,
            id_avg: 0.8,
            tas,
        }
    }

    fn report_with(
        name: &str,
        cfg: &MetricConfig,
        tas: &[f64],
        sh: &[(usize, bool)],
        dh: &[(usize, bool)],
        stats: MatrixStats,
    ) -> MetricReport {
        let records: Vec<_> = tas
            .iter()
            .zip(sh)
            .zip(dh)
            .enumerate()
            .map(|(t, ((&tas, &sh), &dh))| record(t, sh, dh, tas))
            .collect();
        MetricReport::from_parts(name, cfg.clone(), records, vec![], stats).unwrap()
    }

    #[test]
    fn percentages_and_horizons_render_to_one_decimal() {
        let cfg = MetricConfig::default();
        let stats = MatrixStats { id_avg: 0.325, ood_avg: 0.271, ood_min: 0.154 };
        let sh = [(4, false), (6, false), (5, false), (5, false), (5, false),
                  (4, false), (4, false), (6, false), (6, false), (6, false)];
        let dh = [(2, false), (7, true), (7, true), (7, true), (6, false),
                  (7, true), (7, true), (7, true), (7, true), (7, true)];
        let tas = [0.759; 10];
        let report = report_with("ft", &cfg, &tas, &sh, &dh, stats);
        let table = comparison_table(&[&report], &TableColumn::all()).unwrap();

        let texts: Vec<&str> =
            table.rows[0].cells.iter().map(|c| c.rendered.as_str()).collect();
        assert_eq!(
            texts,
            vec!["32.5%", "27.1%", "15.4%", "75.9%", "75.9%", "5.1", "6.4"]
        );
        // Only the DH mean averaged over sentinel values.
        let flags: Vec<bool> =
            table.rows[0].cells.iter().map(|c| c.includes_truncated).collect();
        assert_eq!(flags, vec![false, false, false, false, false, false, true]);

        let text = table.render_text();
        assert!(text.contains("6.4*"), "rendered:\n{text}");
        assert!(!text.contains("5.1*"), "rendered:\n{text}");
        assert!(text.contains("* mean includes"), "rendered:\n{text}");
        assert!(text.contains("SH Avg. (steps)"), "rendered:\n{text}");

        let csv = table.to_csv();
        assert!(
            csv.starts_with(
                "model,id,ood,ood-min,tas-avg,tas-min,\
                 sh-avg,sh-avg-includes-truncated,dh-avg,dh-avg-includes-truncated\n"
            ),
            "csv:\n{csv}"
        );
        assert!(csv.contains(",5.1,false,6.4,true\n"), "csv:\n{csv}");
    }

    #[test]
    fn mean_and_min_columns_come_from_distinct_aggregates() {
        let cfg = MetricConfig::default();
        let stats = MatrixStats { id_avg: 0.9, ood_avg: 0.8, ood_min: 0.7 };
        // Five scores averaging 0.978 with a 0.893 worst case.
        let tas = [1.0, 1.0, 1.0, 0.997, 0.893];
        let sh = [(6, true); 5];
        let dh = [(7, true); 5];
        let report = report_with("moco", &cfg, &tas, &sh, &dh, stats);
        let table =
            comparison_table(&[&report], &[TableColumn::TasAvg, TableColumn::TasMin])
                .unwrap();
        let texts: Vec<&str> =
            table.rows[0].cells.iter().map(|c| c.rendered.as_str()).collect();
        assert_eq!(texts, vec!["97.8%", "89.3%"]);
    }

    #[test]
    fn rows_follow_input_order_and_configs_must_match() {
        let cfg = MetricConfig::default();
        let stats = MatrixStats { id_avg: 0.5, ood_avg: 0.4, ood_min: 0.3 };
        let a = report_with("alpha", &cfg, &[0.9], &[(3, false)], &[(2, false)], stats);
        let b = report_with("beta", &cfg, &[0.8], &[(2, false)], &[(3, false)], stats);
        let table = comparison_table(&[&b, &a], &TableColumn::all()).unwrap();
        let models: Vec<&str> = table.rows.iter().map(|r| r.model.as_str()).collect();
        assert_eq!(models, vec!["beta", "alpha"]);

        let other_cfg = MetricConfig { delta: 0.7, ..MetricConfig::default() };
        let c = report_with("gamma", &other_cfg, &[0.8], &[(2, false)], &[(3, false)], stats);
        assert_eq!(
            comparison_table(&[&a, &c], &TableColumn::all()),
            Err(ReportError::MixedConfigs {
                first: "alpha".to_string(),
                second: "gamma".to_string()
            })
        );
        assert_eq!(
            comparison_table(&[], &TableColumn::all()),
            Err(ReportError::EmptyReportSet)
        );
        assert_eq!(comparison_table(&[&a], &[]), Err(ReportError::EmptyColumnSet));
    }

    #[test]
    fn identical_inputs_render_identical_bytes() {
        let m = matrix(
            3,
            &[(0, 0, 0.95), (0, 1, 0.8), (0, 2, 0.7), (1, 1, 0.9), (2, 2, 0.8)],
        );
        let cfg = MetricConfig::default();
        let r1 = evaluate_model(&m, &cfg).unwrap();
        let r2 = evaluate_model(&m, &cfg).unwrap();
        let t1 = comparison_table(&[&r1], &TableColumn::all()).unwrap();
        let t2 = comparison_table(&[&r2], &TableColumn::all()).unwrap();
        assert_eq!(t1.render_text(), t2.render_text());
        assert_eq!(t1.to_json(), t2.to_json());
    }

    #[test]
    fn printed_aggregates_match_recomputation_to_the_last_digit() {
        let m = generate(&ScenarioSpec {
            periods: 8,
            base_acc: 0.87,
            difficulty_rate: 0.04,
            lag_rate: 0.09,
            floor_g: 0.3,
            noise_amp: 0.005,
            seed: 11,
            presence: Presence::UpperTriangle,
        })
        .unwrap();
        let report = evaluate_model(&m, &MetricConfig::default()).unwrap();
        let table = comparison_table(&[&report], &TableColumn::all()).unwrap();
        for cell in &table.rows[0].cells {
            let printed: f64 = cell
                .rendered
                .trim_end_matches('%')
                .parse()
                .expect("rendered cells are numeric");
            let expected = if cell.column.is_percentage() {
                cell.value * 100.0
            } else {
                cell.value
            };
            // One decimal is rendered, so half a unit in the last digit.
            assert!(
                (printed - expected).abs() <= 0.05 + 1e-9,
                "{}: printed {printed}, expected {expected}",
                cell.column
            );
        }
    }

    #[test]
    fn column_names_parse_and_unknown_names_do_not() {
        for column in TableColumn::all() {
            assert_eq!(column.name().parse::<TableColumn>().unwrap(), column);
        }
        assert_eq!(
            "oodmin".parse::<TableColumn>(),
            Err(ReportError::UnknownColumn("oodmin".to_string()))
        );
    }

    #[test]
    fn accuracy_heatmap_marks_absent_cells() {
        let m = matrix(3, &[(0, 0, 0.9), (1, 1, 0.8), (2, 2, 0.7)]);
        let grid = heatmap_data(&m, None);
        assert_eq!(grid.labels, vec!["y0", "y1", "y2"]);
        assert_eq!(grid.center, None);
        for (train, row) in grid.cells.iter().enumerate() {
            for (eval, cell) in row.iter().enumerate() {
                if train == eval {
                    assert!(cell.value.is_some() && cell.tag.is_none());
                } else {
                    assert_eq!(cell.value, None);
                    assert_eq!(cell.tag, Some(CellTag::NonEvaluated));
                }
            }
        }
        let csv = grid.to_csv();
        assert!(csv.starts_with("train\\eval,y0,y1,y2\n"));
        assert!(csv.contains("y0,0.9,,\n"), "csv:\n{csv}");
    }

    #[test]
    fn ttr_heatmap_tags_center_and_undefined_oracles() {
        // g(0,1) = 0.3/0.5 lands exactly on 0.6; the eval-time oracle at
        // period 2 is zero, so that column's ratio is undefined.
        let m = matrix(
            3,
            &[(0, 0, 0.9), (0, 1, 0.3), (0, 2, 0.4), (1, 1, 0.5), (2, 2, 0.0)],
        );
        let ttr = compute_ttr(&m, &MetricConfig::default());
        let grid = heatmap_data_ttr(&ttr, Some(0.6));
        assert_eq!(grid.cells[0][1].value, Some(0.6));
        assert_eq!(grid.cells[0][1].tag, Some(CellTag::AtCenter));
        assert_eq!(grid.cells[0][0], HeatmapCell { value: Some(1.0), tag: None });
        assert_eq!(grid.cells[0][2].tag, Some(CellTag::UndefinedOracle));
        assert_eq!(grid.cells[2][2].tag, Some(CellTag::UndefinedOracle));
        assert_eq!(grid.cells[1][0].tag, Some(CellTag::NonEvaluated));

        let csv = grid.to_csv();
        assert!(csv.contains("y0,1,0.6,undef\n"), "csv:\n{csv}");
        let json = grid.to_json();
        assert!(json.contains("\"at-center\""), "json:\n{json}");
        assert!(json.contains("\"undefined-oracle\""), "json:\n{json}");
        assert!(json.contains("\"center\": 0.6"), "json:\n{json}");
    }

    #[test]
    fn timeline_flattens_the_report_onto_the_axis() {
        let suite = scenario_suite();
        let spec = &suite.members.iter().find(|m| m.name == "pure-difficulty").unwrap().spec;
        let m = generate(spec).unwrap();
        let cfg = MetricConfig::default();
        let report = evaluate_model(&m, &cfg).unwrap();
        let series = timeline_series(&report, &m).unwrap();

        assert_eq!(series.model_name, "synthetic");
        assert_eq!(series.points.len(), report.records().len());
        for pair in series.points.windows(2) {
            // Intrinsic difficulty: both accuracy series decay together…
            assert!(pair[0].id_acc > pair[1].id_acc);
            assert!(pair[0].ood_avg > pair[1].ood_avg);
        }
        for p in &series.points {
            // …while the adaptation score stays pinned at 1.
            assert_eq!(p.tas, 1.0);
            assert!(p.ood_avg < p.id_acc);
        }

        let csv = series.to_csv();
        assert!(csv.starts_with("t,label,id_acc,ood_avg,tas\n"));
        assert_eq!(csv.lines().count(), series.points.len() + 1);
        assert_eq!(series.to_json(), series.to_json());
    }

    #[test]
    fn stationary_timeline_is_flat() {
        let suite = scenario_suite();
        let spec = &suite.members.iter().find(|m| m.name == "stationary").unwrap().spec;
        let m = generate(spec).unwrap();
        let report = evaluate_model(&m, &MetricConfig::default()).unwrap();
        let series = timeline_series(&report, &m).unwrap();
        for p in &series.points {
            assert_eq!(p.id_acc, 0.8);
            // The window mean re-associates the additions, so compare loosely.
            assert!((p.ood_avg - 0.8).abs() < 1e-12);
            assert_eq!(p.tas, 1.0);
        }
    }

    #[test]
    fn timeline_rejects_a_matrix_the_report_does_not_describe() {
        let m = matrix(
            3,
            &[(0, 0, 0.95), (0, 1, 0.8), (0, 2, 0.7), (1, 1, 0.9), (2, 2, 0.8)],
        );
        let report = evaluate_model(&m, &MetricConfig::default()).unwrap();
        let renamed = m.clone().with_model_name("other");
        assert!(matches!(
            timeline_series(&report, &renamed),
            Err(ReportError::ReportMatrixMismatch { .. })
        ));
        // Same name, different axis labels.
        let other = AccuracyMatrix::from_cells(
            TimeAxis::new(["a", "b", "c"].map(String::from)).unwrap(),
            "demo",
            [(0, 0, 0.95), (0, 1, 0.8), (0, 2, 0.7), (1, 1, 0.9), (2, 2, 0.8)],
        )
        .unwrap();
        assert!(matches!(
            timeline_series(&report, &other),
            Err(ReportError::ReportMatrixMismatch { .. })
        ));
    }
}
