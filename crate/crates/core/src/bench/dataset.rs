use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BenchError, TaskSpec};
use crate::arq::{run_ensemble, EnsembleError};
use crate::nn::{Dataset, FeatureVector, Normalizer, FEATURE_COUNT, FEATURE_NAMES};
use crate::seed::{derive_seed, rng_from_seed};

pub const TARGET_COLUMN: &str = "median_rtt";

/// One grid point: raw features and the ensemble median RTT in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub features: FeatureVector,
    pub median_rtt: f64,
}

/// Train/test samples of one task, split once at generation time.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskData {
    pub task_id: String,
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    /// Grid indices dropped because fewer than half of their runs delivered.
    pub dropped: Vec<usize>,
}

/// Runs one ensemble per grid point and splits the valid points.
pub fn generate_dataset(task: &TaskSpec, seed: u64) -> Result<TaskData, BenchError> {
    let grid = task.grid(seed)?;
    let runs = task.runs_per_point as usize;
    let results: Vec<_> = grid.par_iter().map(|s| run_ensemble(s, runs)).collect();

    let mut samples = Vec::new();
    let mut dropped = Vec::new();
    for (i, (s, r)) in grid.iter().zip(results).enumerate() {
        match r {
            Ok(stats) => samples.push(Sample {
                features: FeatureVector::from_settings(s),
                median_rtt: stats.median_rtt.expect("valid ensembles have a median"),
            }),
            Err(EnsembleError::InvalidSample(stats)) => {
                log::warn!(
                    "task {}: dropping grid point {i} (distance {}, noise {}): delivery rate {:.3}",
                    task.task_id,
                    s.tx_rx_distance,
                    s.noise_count,
                    stats.delivery_rate
                );
                dropped.push(i);
            }
            Err(e) => return Err(e.into()),
        }
    }
    if samples.is_empty() {
        return Err(BenchError::EmptyDataset(task.task_id.clone()));
    }
    let (train, test) = split_samples(
        samples,
        task.test_fraction,
        derive_seed(seed, &format!("split/{}", task.task_id), 0),
    );
    Ok(TaskData {
        task_id: task.task_id.clone(),
        train,
        test,
        dropped,
    })
}

/// Seeded shuffle-split; the test part has `round(n·fraction)` samples,
/// at least one and at most `n − 1` when `n ≥ 2`.
pub fn split_samples(mut samples: Vec<Sample>, fraction: f64, seed: u64) -> (Vec<Sample>, Vec<Sample>) {
    let n = samples.len();
    samples.shuffle(&mut rng_from_seed(seed));
    let n_test = if n < 2 {
        0
    } else {
        ((n as f64 * fraction).round() as usize).clamp(1, n - 1)
    };
    let test = samples.split_off(n - n_test);
    (samples, test)
}

pub fn csv_header() -> Vec<&'static str> {
    let mut h = FEATURE_NAMES.to_vec();
    h.push(TARGET_COLUMN);
    h
}

pub fn write_samples_csv(path: &Path, samples: &[Sample]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(csv_header())?;
    for s in samples {
        let mut row: Vec<String> = s.features.0.iter().map(f64::to_string).collect();
        row.push(s.median_rtt.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_csv(path: &Path) -> Result<Vec<Sample>, BenchError> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != csv_header() {
        return Err(BenchError::BadCsv {
            path: path.to_path_buf(),
            reason: format!("unexpected header {header:?}"),
        });
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let vals: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let vals = vals.map_err(|e| BenchError::BadCsv {
            path: path.to_path_buf(),
            reason: format!("row {}: {e}", line + 1),
        })?;
        let mut f = [0.0; FEATURE_COUNT];
        f.copy_from_slice(&vals[..FEATURE_COUNT]);
        out.push(Sample {
            features: FeatureVector(f),
            median_rtt: vals[FEATURE_COUNT],
        });
    }
    Ok(out)
}

pub fn task_paths(dir: &Path, task_id: &str) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("{task_id}.train.csv")),
        dir.join(format!("{task_id}.test.csv")),
    )
}

impl TaskData {
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf), BenchError> {
        let (tr, te) = task_paths(dir, &self.task_id);
        write_samples_csv(&tr, &self.train)?;
        write_samples_csv(&te, &self.test)?;
        Ok((tr, te))
    }

    pub fn read(dir: &Path, task_id: &str) -> Result<Self, BenchError> {
        let (tr, te) = task_paths(dir, task_id);
        for p in [&tr, &te] {
            if !p.exists() {
                return Err(BenchError::MissingDataset(p.clone()));
            }
        }
        Ok(Self {
            task_id: task_id.to_string(),
            train: read_samples_csv(&tr)?,
            test: read_samples_csv(&te)?,
            dropped: Vec::new(),
        })
    }

    /// Normalized train/test sets ready for the network.
    pub fn prepare(&self, norm: &Normalizer) -> PreparedTask {
        let conv = |v: &[Sample]| {
            Dataset::new(
                v.iter().map(|s| norm.normalize_input(s.features.as_slice())).collect(),
                v.iter().map(|s| norm.normalize_output(s.median_rtt)).collect(),
            )
        };
        PreparedTask {
            task_id: self.task_id.clone(),
            train: conv(&self.train),
            test: conv(&self.test),
        }
    }
}

/// A task in network space (normalized features and targets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparedTask {
    pub task_id: String,
    pub train: Dataset,
    pub test: Dataset,
}
