//! Subcommand implementations and the exit-code contract.
//!
//! Exit codes: 0 on success; 2 for anything wrong with inputs or
//! configuration (unparseable files, invalid or mixed configs, bad flags);
//! 3 for precondition failures on well-formed inputs (nothing evaluable);
//! 1 for unexpected conditions, including failed suite checks.

use std::fs;
use std::io::Write;
use std::path::Path;

use temporal_metrics::matrix::{
    parse_matrix, serialize_matrix, AccuracyMatrix, MatrixError, MatrixFormat,
};
use temporal_metrics::metrics::{
    compute_ttr, evaluate_model, ConfigError, EvaluateError, MetricReport,
    ReportIntegrityError,
};
use temporal_metrics::report::{
    comparison_table, heatmap_data_ttr, timeline_series, ReportError, TableColumn,
};
use temporal_metrics::scenario::{generate, run_scenario_suite, ScenarioError, ScenarioSpec, SuiteError};
use thiserror::Error;

use crate::overlay;
use crate::{
    Command, CompareArgs, EvaluateArgs, MatrixFormatArg, OutputFormat, SuiteArgs,
    SynthArgs, TtrArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Matrix { path: String, source: MatrixError },
    #[error("{path}: {source}")]
    ReportFile { path: String, source: ReportIntegrityError },
    #[error("{path}: {message}")]
    SpecParse { path: String, message: String },
    #[error("{path}: {source}")]
    Scenario { path: String, source: ScenarioError },
    #[error("config: {0}")]
    Config(ConfigError),
    #[error("config file {path}: {message}")]
    ConfigFile { path: String, message: String },
    #[error("{0}")]
    Table(#[from] ReportError),
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
    #[error("{0}")]
    Usage(String),
    #[error("scenario suite could not run: {0}")]
    Suite(#[from] SuiteError),
    #[error("scenario suite checks failed")]
    SuiteChecksFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            // A well-formed matrix with nothing to evaluate is a
            // precondition failure, not an input error.
            CliError::Evaluate(EvaluateError::NoEvaluableTrainTime { .. }) => 3,
            CliError::Suite(_) | CliError::SuiteChecksFailed => 1,
            _ => 2,
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Evaluate(args) => evaluate(args),
        Command::Compare(args) => compare(args),
        Command::Ttr(args) => ttr(args),
        Command::Synth(args) => synth(args),
        Command::Suite(args) => suite(args),
    }
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&args.input, args.matrix_format, args.name.as_deref())?;
    let cfg = overlay::resolve(&args.config, matrix.periods().saturating_sub(1))?;
    let report = evaluate_model(&matrix, &cfg)?;
    let document = match args.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Text => render_report_text(&report)?,
        OutputFormat::Csv => timeline_series(&report, &matrix)?.to_csv(),
    };
    write_output(args.output.as_deref(), document.as_bytes())
}

fn render_report_text(report: &MetricReport) -> Result<String, CliError> {
    let table = comparison_table(&[report], &TableColumn::all())?;
    let mut text = table.render_text();
    if !report.skipped().is_empty() {
        text.push('\n');
        text.push_str("skipped train times:\n");
        for skip in report.skipped() {
            text.push_str(&format!("  {} ({}): {}\n", skip.t, skip.label, skip.reason));
        }
    }
    Ok(text)
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let columns = parse_columns(args.columns.as_deref())?;
    let reports: Vec<MetricReport> = if !args.reports.is_empty() {
        if args.config.any_set() {
            return Err(CliError::Usage(
                "config flags do not apply to precomputed reports; \
                 each report carries the configuration it was computed under"
                    .to_string(),
            ));
        }
        args.reports.iter().map(|path| load_report(path)).collect::<Result<_, _>>()?
    } else {
        let matrices: Vec<AccuracyMatrix> = args
            .inputs
            .iter()
            .map(|path| load_matrix(path, None, None))
            .collect::<Result<_, _>>()?;
        let auto_horizon = matrices
            .iter()
            .map(|m| m.periods().saturating_sub(1))
            .max()
            .unwrap_or(1);
        let cfg = overlay::resolve(&args.config, auto_horizon)?;
        matrices
            .iter()
            .map(|matrix| evaluate_model(matrix, &cfg).map_err(CliError::from))
            .collect::<Result<_, _>>()?
    };

    let refs: Vec<&MetricReport> = reports.iter().collect();
    let table = comparison_table(&refs, &columns)?;
    let document = match args.format {
        OutputFormat::Text => table.render_text(),
        OutputFormat::Json => table.to_json(),
        OutputFormat::Csv => table.to_csv(),
    };
    write_output(args.output.as_deref(), document.as_bytes())
}

fn parse_columns(columns: Option<&[String]>) -> Result<Vec<TableColumn>, CliError> {
    match columns {
        None => Ok(TableColumn::all().to_vec()),
        Some(names) => names
            .iter()
            .map(|name| name.trim().parse::<TableColumn>().map_err(CliError::from))
            .collect(),
    }
}

fn ttr(args: TtrArgs) -> Result<(), CliError> {
    let matrix = load_matrix(&args.input, args.matrix_format, args.name.as_deref())?;
    let cfg = overlay::resolve(&args.config, matrix.periods().saturating_sub(1))?;
    let ratios = compute_ttr(&matrix, &cfg);
    let grid = heatmap_data_ttr(&ratios, args.center);
    let document = match args.format {
        OutputFormat::Json => grid.to_json(),
        OutputFormat::Csv | OutputFormat::Text => grid.to_csv(),
    };
    write_output(args.output.as_deref(), document.as_bytes())
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    let path = args.spec.display().to_string();
    let bytes = fs::read(&args.spec)
        .map_err(|source| CliError::Io { path: path.clone(), source })?;
    let spec: ScenarioSpec = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::SpecParse { path: path.clone(), message: e.to_string() })?;
    let matrix = generate(&spec).map_err(|source| CliError::Scenario { path, source })?;
    let matrix = match args.name {
        Some(name) => matrix.with_model_name(name),
        None => matrix,
    };
    let format = match args.format {
        OutputFormat::Csv => MatrixFormat::Csv,
        OutputFormat::Json => MatrixFormat::Json,
        OutputFormat::Text => {
            return Err(CliError::Usage(
                "synth writes a matrix: use --format csv or --format json".to_string(),
            ));
        }
    };
    write_output(args.output.as_deref(), &serialize_matrix(&matrix, format))
}

fn suite(args: SuiteArgs) -> Result<(), CliError> {
    let outcome = run_scenario_suite()?;
    write_output(args.output.as_deref(), outcome.render_text().as_bytes())?;
    if outcome.all_passed() {
        Ok(())
    } else {
        Err(CliError::SuiteChecksFailed)
    }
}

fn load_matrix(
    path: &Path,
    format: Option<MatrixFormatArg>,
    name: Option<&str>,
) -> Result<AccuracyMatrix, CliError> {
    let display = path.display().to_string();
    let bytes = fs::read(path)
        .map_err(|source| CliError::Io { path: display.clone(), source })?;
    let format = format.map(MatrixFormat::from).unwrap_or_else(|| sniff_format(path));
    let matrix = parse_matrix(&bytes[..], format)
        .map_err(|source| CliError::Matrix { path: display, source })?;
    Ok(match name {
        Some(name) => matrix.with_model_name(name),
        // CSV carries no model name; fall back to the file stem.
        None if matrix.model_name().is_empty() => {
            let stem = path
                .file_stem()
                .and_then(|stem| stem.to_str())
                .unwrap_or("model")
                .to_string();
            matrix.with_model_name(stem)
        }
        None => matrix,
    })
}

fn sniff_format(path: &Path) -> MatrixFormat {
    match path.extension().and_then(|ext| ext.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => MatrixFormat::Json,
        _ => MatrixFormat::Csv,
    }
}

fn load_report(path: &Path) -> Result<MetricReport, CliError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: display.clone(), source })?;
    MetricReport::from_json(&text)
        .map_err(|source| CliError::ReportFile { path: display, source })
}

fn write_output(output: Option<&Path>, document: &[u8]) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, document).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(document)
            .map_err(|source| CliError::Io { path: "<stdout>".to_string(), source }),
    }
}
