//! Seeded random accuracy matrices for the acceptance checks.
//!
//! Values mix exact endpoints (0 and 1) with uniform draws so that clipping,
//! zero-oracle, and absent-cell branches all get exercised; everything is
//! driven by a fixed-seed ChaCha stream, so failures replay exactly.

use std::ops::RangeInclusive;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use temporal_metrics::matrix::{AccuracyMatrix, TimeAxis};

pub struct MatrixSampler {
    rng: ChaCha8Rng,
    counter: usize,
}

impl MatrixSampler {
    pub fn new(seed: u64) -> Self {
        MatrixSampler { rng: ChaCha8Rng::seed_from_u64(seed), counter: 0 }
    }

    /// Uniform draw from `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Draw from `1..=max`.
    pub fn size(&mut self, max: usize) -> usize {
        1 + (self.rng.next_u64() as usize) % max
    }

    /// A value in `[0, 1]`: 10% exactly 0, 10% exactly 1, otherwise uniform.
    fn value(&mut self) -> f64 {
        match self.rng.next_u64() % 10 {
            0 => 0.0,
            1 => 1.0,
            _ => self.unit(),
        }
    }

    /// A random matrix; each cell present with probability `presence`.
    pub fn matrix(
        &mut self,
        periods: RangeInclusive<usize>,
        presence: f64,
    ) -> AccuracyMatrix {
        self.build(periods, presence, Self::value)
    }

    /// A fully present matrix with strictly positive values, so every
    /// transfer ratio in the grid is defined.
    pub fn full_positive_matrix(&mut self, periods: RangeInclusive<usize>) -> AccuracyMatrix {
        self.build(periods, 1.1, |s| {
            if s.rng.next_u64() % 10 == 0 {
                1.0
            } else {
                s.unit().max(1e-6)
            }
        })
    }

    fn build(
        &mut self,
        periods: RangeInclusive<usize>,
        presence: f64,
        mut value: impl FnMut(&mut Self) -> f64,
    ) -> AccuracyMatrix {
        let span = periods.end() - periods.start() + 1;
        let p = periods.start() + (self.rng.next_u64() as usize) % span;
        self.counter += 1;
        let axis = TimeAxis::new((0..p).map(|i| format!("p{i}"))).unwrap();
        let mut cells = Vec::new();
        for train in 0..p {
            for eval in 0..p {
                if self.unit() < presence {
                    let v = value(self);
                    cells.push((train, eval, v));
                }
            }
        }
        AccuracyMatrix::from_cells(axis, format!("r{}", self.counter), cells).unwrap()
    }
}
