use serde::{Deserialize, Serialize};

/// Lower-triangular matrix of test errors: `rows[j][k]` is the error on task
/// `k` after training through task `j` (`k ≤ j`). Rows are only appended.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvalMatrix {
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("evaluation matrix is empty")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },
    #[error("entry ({row}, {col}) is negative or not finite: {value}")]
    BadEntry { row: usize, col: usize, value: f64 },
    #[error("forgetting ratio needs at least two scenarios, got {0}")]
    TooFewTasks(usize),
    #[error("diagonal entry {0} is zero")]
    ZeroDiagonal(usize),
}

impl EvalMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let mut m = Self::new();
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<(), MetricError> {
        let expected = self.rows.len() + 1;
        if row.len() != expected {
            return Err(MetricError::RowLength {
                row: self.rows.len(),
                len: row.len(),
                expected,
            });
        }
        if let Some((col, &value)) = row.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(MetricError::BadEntry {
                row: self.rows.len(),
                col,
                value,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Number of completed scenarios.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.rows.get(row).and_then(|r| r.get(col)).copied()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rows.iter().enumerate().map(|(i, r)| r[i]).collect()
    }

    pub fn last_row(&self) -> Option<&[f64]> {
        self.rows.last().map(Vec::as_slice)
    }

    /// The first `k` scenarios.
    pub fn prefix(&self, k: usize) -> EvalMatrix {
        EvalMatrix {
            rows: self.rows[..k.min(self.rows.len())].to_vec(),
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Mean of the diagonal: error on each task right after learning it.
pub fn plasticity(m: &EvalMatrix) -> Result<f64, MetricError> {
    if m.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(mean(&m.diagonal()))
}

/// Mean of the last row: error on every task after learning all of them.
pub fn stability(m: &EvalMatrix) -> Result<f64, MetricError> {
    m.last_row().map(mean).ok_or(MetricError::Empty)
}

/// Relative growth from plasticity to stability, in percent.
pub fn increase_rate(m: &EvalMatrix) -> Result<f64, MetricError> {
    let p = plasticity(m)?;
    if p == 0.0 {
        return Err(MetricError::ZeroDiagonal(0));
    }
    Ok(100.0 * (stability(m)? - p) / p)
}

/// `(1/K)·Σ_k max(0, L_k^K − L_k^k)/L_k^k` over the first `k` scenarios.
pub fn forgetting_ratio(m: &EvalMatrix, k: usize) -> Result<f64, MetricError> {
    if k < 2 || k > m.len() {
        return Err(MetricError::TooFewTasks(k.min(m.len())));
    }
    let last = &m.rows[k - 1];
    let mut sum = 0.0;
    for (j, &l) in last.iter().enumerate() {
        let d = m.rows[j][j];
        if d == 0.0 {
            return Err(MetricError::ZeroDiagonal(j));
        }
        sum += (l - d).max(0.0) / d;
    }
    Ok(sum / k as f64)
}

/// `(K, F_r)` for every prefix length `K = 2..=len`.
pub fn forgetting_ratio_by_k(m: &EvalMatrix) -> Result<Vec<(usize, f64)>, MetricError> {
    (2..=m.len()).map(|k| Ok((k, forgetting_ratio(m, k)?))).collect()
}

/// Every metric of one completed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub matrix: EvalMatrix,
    pub plasticity: f64,
    pub stability: f64,
    pub increase_rate: f64,
    pub forgetting_ratio_by_k: Vec<(usize, f64)>,
    pub per_task_errors: Vec<f64>,
}

impl MetricsSummary {
    pub fn compute(matrix: &EvalMatrix) -> Result<Self, MetricError> {
        Ok(Self {
            matrix: matrix.clone(),
            plasticity: plasticity(matrix)?,
            stability: stability(matrix)?,
            increase_rate: increase_rate(matrix)?,
            forgetting_ratio_by_k: forgetting_ratio_by_k(matrix)?,
            per_task_errors: matrix.last_row().unwrap_or_default().to_vec(),
        })
    }
}
