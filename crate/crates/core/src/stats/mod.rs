//! Experiment-level statistics: medians, the Friedman test over systems ×
//! topics, and the Nemenyi post-hoc comparison.

mod aggregate;
mod friedman;
mod nemenyi;

pub use aggregate::{aggregate, Aggregate, MedianRow, PairDifference};
pub use friedman::{friedman, FriedmanResult};
pub use nemenyi::{nemenyi, nemenyi_q, NemenyiResult, PairwiseDecision};

use crate::error::{Error, Result};

/// Metric values for `blocks` (rows, e.g. topics) × `systems` (columns, e.g.
/// vectorizers).
#[derive(Debug, Clone, PartialEq)]
pub struct ResultMatrix {
    systems: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ResultMatrix {
    pub fn new(systems: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = systems.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    actual: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidParam {
                    name: "matrix",
                    reason: format!("non-finite value at row {i}, column {j}"),
                });
            }
        }
        Ok(Self { systems, rows })
    }

    /// Matrix with generated system names `s0, s1, ...`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        Self::new((0..k).map(|j| format!("s{j}")).collect(), rows)
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn blocks(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.systems.len()
    }

    pub(crate) fn check_shape(&self) -> Result<()> {
        if self.blocks() < 2 || self.k() < 2 {
            return Err(Error::InvalidParam {
                name: "matrix",
                reason: format!(
                    "need at least 2 blocks and 2 systems, got {} x {}",
                    self.blocks(),
                    self.k()
                ),
            });
        }
        Ok(())
    }

    /// Per-system rank sums; rank 1 is the largest value in a row, ties share
    /// the average rank.
    pub fn rank_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.k()];
        for row in &self.rows {
            for (s, r) in sums.iter_mut().zip(rank_row(row)) {
                *s += r;
            }
        }
        sums
    }

    pub fn mean_ranks(&self) -> Vec<f64> {
        let n = self.blocks() as f64;
        self.rank_sums().into_iter().map(|s| s / n).collect()
    }
}

/// Average ranks of one row, descending (largest value gets rank 1).
pub fn rank_row(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && row[order[j]] == row[order[i]] {
            j += 1;
        }
        // Positions i..j (0-based) share ranks i+1..=j.
        let avg = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = avg;
        }
        i = j;
    }
    ranks
}

/// Median; even counts average the middle two. Reorders `values`.
pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
