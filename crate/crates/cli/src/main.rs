//! `tmetrics`: temporal-adaptation metrics over accuracy matrices.
//!
//! The subcommands wire matrix ingestion, the metric kernels, scenario
//! synthesis, and report rendering into reproducible invocations: identical
//! inputs produce byte-identical outputs, and no document embeds timestamps
//! or environment details.

mod commands;
mod overlay;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use temporal_metrics::matrix::MatrixFormat;
use temporal_metrics::metrics::{ShMode, TasMode};

#[derive(Parser)]
#[command(
    name = "tmetrics",
    version,
    about = "Temporal-adaptation metrics over accuracy matrices",
    long_about = "Computes transfer ratios, stability and drift horizons, and \
                  adaptation scores from accuracy matrices A(train, eval), and \
                  generates synthetic drift scenarios with known ground truth."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one accuracy matrix into a metric report
    Evaluate(EvaluateArgs),
    /// Build a model comparison table from matrices or precomputed reports
    Compare(CompareArgs),
    /// Export transfer-ratio heatmap data for one matrix
    Ttr(TtrArgs),
    /// Generate a synthetic drift-scenario matrix from a spec file
    Synth(SynthArgs),
    /// Run the canonical scenario suite and print its signature checks
    Suite(SuiteArgs),
}

/// Metric configuration flags. Precedence: built-in defaults, then the
/// `--config` file, then explicit flags.
#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Stability threshold on the transfer ratio [default: 0.6]
    #[arg(long, value_name = "RATIO")]
    delta: Option<f64>,

    /// Per-step slack absorbed before drift deviations accumulate [default: 0.02]
    #[arg(long, value_name = "SLACK")]
    epsilon: Option<f64>,

    /// Decision bar on the drift statistic [default: 0.15]
    #[arg(long, value_name = "BAR")]
    lambda: Option<f64>,

    /// Evaluation window in steps [default: auto; one less than the widest input axis]
    #[arg(long, value_name = "STEPS")]
    max_horizon: Option<usize>,

    /// Adaptation-score window in steps [default: auto; the resolved max horizon]
    #[arg(long, value_name = "STEPS")]
    tas_window: Option<usize>,

    /// Stability reading: stop at the first dip, or credit the literal maximum [default: contiguous]
    #[arg(long, value_name = "MODE")]
    sh_mode: Option<ShModeArg>,

    /// Clip ratios (and the ratio-mode score) at 1 [default: true]
    #[arg(long, value_name = "BOOL")]
    clip_ttr: Option<bool>,

    /// Adaptation score: ratio of window means, or mean of per-step ratios [default: ratio]
    #[arg(long, value_name = "MODE")]
    tas_mode: Option<TasModeArg>,

    /// JSON file with configuration values; flags override the file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl ConfigArgs {
    /// Whether any configuration source was given explicitly.
    fn any_set(&self) -> bool {
        self.delta.is_some()
            || self.epsilon.is_some()
            || self.lambda.is_some()
            || self.max_horizon.is_some()
            || self.tas_window.is_some()
            || self.sh_mode.is_some()
            || self.clip_ttr.is_some()
            || self.tas_mode.is_some()
            || self.config.is_some()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShModeArg {
    Contiguous,
    LiteralMax,
}

impl From<ShModeArg> for ShMode {
    fn from(mode: ShModeArg) -> ShMode {
        match mode {
            ShModeArg::Contiguous => ShMode::Contiguous,
            ShModeArg::LiteralMax => ShMode::LiteralMax,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TasModeArg {
    Ratio,
    PerTerm,
}

impl From<TasModeArg> for TasMode {
    fn from(mode: TasModeArg) -> TasMode {
        match mode {
            TasModeArg::Ratio => TasMode::Ratio,
            TasModeArg::PerTerm => TasMode::PerTerm,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixFormatArg {
    Csv,
    Json,
}

impl From<MatrixFormatArg> for MatrixFormat {
    fn from(format: MatrixFormatArg) -> MatrixFormat {
        match format {
            MatrixFormatArg::Csv => MatrixFormat::Csv,
            MatrixFormatArg::Json => MatrixFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Accuracy matrix file (CSV or JSON)
    input: PathBuf,

    /// Input format [default: inferred from the file extension, else csv]
    #[arg(long, value_name = "FMT")]
    matrix_format: Option<MatrixFormatArg>,

    /// Model name override [default: the file's model_name, or the file stem]
    #[arg(long, value_name = "NAME")]
    name: Option<String>,

    /// Output: json = report document, text = rendered summary, csv = per-period timeline
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,

    /// Write the document here instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Accuracy matrix files, one model per file
    #[arg(required_unless_present = "reports", conflicts_with = "reports")]
    inputs: Vec<PathBuf>,

    /// Compare precomputed report JSON files instead of evaluating matrices
    #[arg(long, num_args = 1.., value_name = "PATH")]
    reports: Vec<PathBuf>,

    /// Table columns, comma-separated
    /// [default: id,ood,ood-min,tas-avg,tas-min,sh-avg,dh-avg]
    #[arg(long, value_delimiter = ',', value_name = "COLS")]
    columns: Option<Vec<String>>,

    /// Output: text = aligned table, json/csv = machine-readable table
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,

    /// Write the document here instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct TtrArgs {
    /// Accuracy matrix file (CSV or JSON)
    input: PathBuf,

    /// Input format [default: inferred from the file extension, else csv]
    #[arg(long, value_name = "FMT")]
    matrix_format: Option<MatrixFormatArg>,

    /// Model name override [default: the file's model_name, or the file stem]
    #[arg(long, value_name = "NAME")]
    name: Option<String>,

    /// Diverging-colormap center; cells exactly at it are tagged [default: none]
    #[arg(long, value_name = "VALUE")]
    center: Option<f64>,

    /// Output: json = heatmap document, csv/text = ratio grid
    #[arg(long, value_enum, default_value = "json")]
    format: OutputFormat,

    /// Write the document here instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Scenario spec JSON file
    spec: PathBuf,

    /// Matrix output format: csv or json
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,

    /// Model name override [default: synthetic]
    #[arg(long, value_name = "NAME")]
    name: Option<String>,

    /// Write the matrix here instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SuiteArgs {
    /// Write the check lines here instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_internally_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn any_set_detects_flags_and_the_config_file() {
        assert!(!ConfigArgs::default().any_set());

        let flagged = ConfigArgs { delta: Some(0.5), ..ConfigArgs::default() };
        assert!(flagged.any_set());

        let via_file = ConfigArgs {
            config: Some(PathBuf::from("config.json")),
            ..ConfigArgs::default()
        };
        assert!(via_file.any_set());
    }
}
