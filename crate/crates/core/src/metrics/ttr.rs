//! Temporal transfer ratio.
//!
//! For a present cell `A(t, τ)` with a usable oracle `A(τ, τ) > 0`, the
//! transfer ratio is
//!
//! ```text
//! g(t, τ) = A(t, τ) / A(τ, τ)
//! ```
//!
//! optionally clipped at 1 (`clip_ttr`), so that a model outperforming the
//! period-τ oracle counts as full transfer rather than inflating downstream
//! averages. When the oracle is absent or exactly zero the ratio is
//! *undefined* — never `0` and never `∞` — and the cell carries an explicit
//! [`TtrCell::UndefinedOracle`] marker that every downstream consumer skips.
//!
//! Whenever `A(t, t) > 0`, the diagonal ratio is exactly `1.0` (IEEE division
//! of a finite nonzero value by itself).

use crate::matrix::{AccuracyMatrix, TimeAxis};

use super::config::MetricConfig;

/// One cell of a [`TtrMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TtrCell {
    /// `A(t, τ)` itself is absent.
    Absent,
    /// `A(t, τ)` is present but `A(τ, τ)` is absent or zero, so no ratio is
    /// defined.
    UndefinedOracle,
    /// The (possibly clipped) transfer ratio.
    Ratio(f64),
}

impl TtrCell {
    pub fn ratio(self) -> Option<f64> {
        match self {
            TtrCell::Ratio(g) => Some(g),
            _ => None,
        }
    }
}

/// Transfer ratios over the same axis as the source matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TtrMatrix {
    axis: TimeAxis,
    model_name: String,
    cells: Vec<TtrCell>,
}

impl TtrMatrix {
    pub fn axis(&self) -> &TimeAxis {
        &self.axis
    }

    pub fn model_name(&self) -> &str {
        &self.model_name
    }

    pub fn periods(&self) -> usize {
        self.axis.len()
    }

    /// The cell at `(train, eval)`; out-of-range indices read as absent.
    pub fn get(&self, train: usize, eval: usize) -> TtrCell {
        let periods = self.axis.len();
        if train >= periods || eval >= periods {
            return TtrCell::Absent;
        }
        self.cells[train * periods + eval]
    }

    /// Non-absent cells as `(train, eval, cell)` in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, TtrCell)> + '_ {
        let periods = self.axis.len();
        self.cells.iter().enumerate().filter_map(move |(i, c)| match c {
            TtrCell::Absent => None,
            cell => Some((i / periods, i % periods, *cell)),
        })
    }
}

/// Computes the transfer ratio for every present cell of `matrix`.
///
/// Cells with an unusable oracle are marked [`TtrCell::UndefinedOracle`];
/// absent cells stay absent. With `cfg.clip_ttr` every defined ratio lies in
/// `[0, 1]`.
pub fn compute_ttr(matrix: &AccuracyMatrix, cfg: &MetricConfig) -> TtrMatrix {
    let periods = matrix.periods();
    let mut cells = vec![TtrCell::Absent; periods * periods];
    for (train, eval, value) in matrix.cells() {
        let cell = match matrix.get(eval, eval) {
            None | Some(0.0) => TtrCell::UndefinedOracle,
            Some(oracle) => {
                let mut g = value / oracle;
                if cfg.clip_ttr {
                    g = g.min(1.0);
                }
                TtrCell::Ratio(g)
            }
        };
        cells[train * periods + eval] = cell;
    }
    TtrMatrix { axis: matrix.axis().clone(), model_name: matrix.model_name().to_string(), cells }
}
