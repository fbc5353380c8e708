//! Post-hoc temporal-adaptation metrics for models evaluated across time.
//!
//! The input is an accuracy matrix `A(t, τ)`: the accuracy of the model
//! trained through period `t` when evaluated on period `τ`. From that
//! matrix alone, this crate computes how gracefully a model ages:
//!
//! - **Temporal transfer ratio** `g(t, τ) = A(t, τ) / A(τ, τ)` — forward
//!   accuracy normalized by the oracle trained at the evaluation period,
//!   which separates transfer loss from intrinsic period difficulty
//!   ([`metrics::compute_ttr`]).
//! - **Stability horizon** — how many steps ahead the transfer ratio stays
//!   at or above a threshold ([`metrics::stability_horizon`]).
//! - **Drift horizon** — the first step at which a one-sided CUSUM over
//!   forward accuracy changes signals drift ([`metrics::drift_horizon`]).
//! - **Temporal adaptation score** — windowed forward accuracy divided by
//!   the matched oracle accuracy over the same window
//!   ([`metrics::temporal_adaptation_score`]).
//!
//! [`metrics::evaluate_model`] runs all of these per train time and
//! aggregates them into a serializable [`metrics::MetricReport`];
//! [`report`] renders reports as comparison tables, heatmap grids, and
//! timeline series; [`scenario`] generates synthetic drift scenarios with
//! known ground truth, plus a self-checking scenario suite.
//!
//! ```
//! use temporal_metrics::matrix::{AccuracyMatrix, TimeAxis};
//! use temporal_metrics::metrics::{evaluate_model, MetricConfig};
//!
//! let axis = TimeAxis::new(["2019", "2020", "2021"].map(String::from))?;
//! let matrix = AccuracyMatrix::from_cells(
//!     axis,
//!     "demo",
//!     [
//!         (0, 0, 0.95), (0, 1, 0.80), (0, 2, 0.70),
//!         (1, 1, 0.90), (1, 2, 0.85),
//!         (2, 2, 0.88),
//!     ],
//! )?;
//!
//! let report = evaluate_model(&matrix, &MetricConfig::default())?;
//! let first = &report.records()[0];
//! assert_eq!(first.label, "2019");
//! assert!(first.tas > 0.8 && first.tas < 0.9);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod matrix;
pub mod metrics;
pub mod report;
pub mod scenario;

pub use matrix::{AccuracyMatrix, MatrixError, MatrixFormat, TimeAxis};
pub use metrics::{evaluate_model, MetricConfig, MetricReport};
