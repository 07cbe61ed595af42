//! Aggregation of finished runs across strategies and seeds.

use serde::{Deserialize, Serialize};

use super::{forgetting_ratio_by_k, increase_rate, plasticity, stability, EvalMatrix, MetricError};
use crate::cl::StrategyKind;

/// One finished scenario run as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub matrix: EvalMatrix,
    /// Error on every task (seen or not) after each training step.
    #[serde(default)]
    pub all_errors: Vec<Vec<f64>>,
    /// Wall-clock training seconds per task.
    #[serde(default)]
    pub task_seconds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

pub fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    if values.is_empty() {
        return MeanStd {
            mean: f64::NAN,
            std: f64::NAN,
        };
    }
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    MeanStd { mean, std }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: StrategyKind,
    pub runs: usize,
    pub plasticity: MeanStd,
    pub stability: MeanStd,
    /// Increase rate of each run, then averaged.
    pub increase_rate: MeanStd,
    pub total_seconds: MeanStd,
    pub seconds_per_task: MeanStd,
    pub forgetting_ratio_by_k: Vec<(usize, MeanStd)>,
    /// Error on task 4 after task 1 minus after task 3, when recorded.
    pub indirect_gain_t4: Option<MeanStd>,
}

/// Summaries per strategy, in canonical strategy order.
pub fn summarize(records: &[RunRecord]) -> Result<Vec<StrategySummary>, MetricError> {
    let mut out = Vec::new();
    for kind in StrategyKind::ALL {
        let runs: Vec<&RunRecord> = records.iter().filter(|r| r.strategy == kind).collect();
        if runs.is_empty() {
            continue;
        }
        let collect = |f: &dyn Fn(&EvalMatrix) -> Result<f64, MetricError>| -> Result<Vec<f64>, MetricError> {
            runs.iter().map(|r| f(&r.matrix)).collect()
        };
        let totals: Vec<f64> = runs.iter().map(|r| r.task_seconds.iter().sum()).collect();
        let per_task: Vec<f64> = runs
            .iter()
            .filter(|r| !r.task_seconds.is_empty())
            .map(|r| r.task_seconds.iter().sum::<f64>() / r.task_seconds.len() as f64)
            .collect();

        let curves: Vec<Vec<(usize, f64)>> = runs
            .iter()
            .map(|r| forgetting_ratio_by_k(&r.matrix))
            .collect::<Result<_, _>>()?;
        let k_max = curves.iter().map(Vec::len).min().unwrap_or(0);
        let forgetting_ratio_by_k = (0..k_max)
            .map(|i| {
                (
                    curves[0][i].0,
                    mean_std(&curves.iter().map(|c| c[i].1).collect::<Vec<_>>()),
                )
            })
            .collect();

        let gains: Vec<f64> = runs
            .iter()
            .filter(|r| r.all_errors.len() >= 3 && r.all_errors[0].len() >= 4)
            .map(|r| r.all_errors[0][3] - r.all_errors[2][3])
            .collect();

        out.push(StrategySummary {
            strategy: kind,
            runs: runs.len(),
            plasticity: mean_std(&collect(&plasticity)?),
            stability: mean_std(&collect(&stability)?),
            increase_rate: mean_std(&collect(&increase_rate)?),
            total_seconds: mean_std(&totals),
            seconds_per_task: mean_std(&per_task),
            forgetting_ratio_by_k,
            indirect_gain_t4: (gains.len() == runs.len()).then(|| mean_std(&gains)),
        });
    }
    Ok(out)
}
