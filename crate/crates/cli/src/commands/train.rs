use std::path::{Path, PathBuf};

use molcl::bench::{MetricsSummary, PreparedTask, Suite, SuiteConfig, TaskData, TaskSequence};
use molcl::cl::{StrategyKind, StrategyState};
use molcl::nn::{Checkpoint, FeatureBounds};
use serde::{Deserialize, Serialize};

use super::relative_to;
use crate::io::{create_dir, read_json, write_json};
use crate::manifest::RunManifest;
use crate::{CliError, TrainArgs};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainRunConfig {
    /// Task-sequence JSON, relative to this file.
    pub sequence: PathBuf,
    /// Directory with the generated CSVs, relative to this file.
    pub data_dir: PathBuf,
    #[serde(default)]
    pub suite: SuiteConfig,
    #[serde(default)]
    pub bounds: FeatureBounds,
}

/// Deterministic result file of a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalFile {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub task_ids: Vec<String>,
    #[serde(flatten)]
    pub metrics: MetricsSummary,
    /// Test error on every task of the sequence after each training step,
    /// including tasks not yet trained.
    pub all_errors: Vec<Vec<f64>>,
}

/// Wall-clock measurements, kept apart from [`EvalFile`] so that file stays
/// reproducible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimingFile {
    pub task_seconds: Vec<f64>,
    pub epochs_run: Vec<usize>,
}

#[derive(Debug)]
pub struct TrainOutput {
    pub eval: EvalFile,
    pub eval_path: PathBuf,
    pub checkpoints: Vec<PathBuf>,
}

pub fn checkpoint_path(out: &Path, task: usize) -> PathBuf {
    out.join("checkpoints").join(format!("task_{task:02}.json"))
}

fn latest_checkpoint(out: &Path, tasks: usize) -> Option<(usize, PathBuf)> {
    (1..=tasks)
        .rev()
        .map(|k| (k, checkpoint_path(out, k)))
        .find(|(_, p)| p.exists())
}

fn load_tasks(config_path: &Path, cfg: &TrainRunConfig) -> Result<Vec<PreparedTask>, CliError> {
    let seq: TaskSequence = read_json(&relative_to(config_path, &cfg.sequence))?;
    if seq.tasks.is_empty() {
        return Err(CliError::Config("task sequence is empty".into()));
    }
    let dir = relative_to(config_path, &cfg.data_dir);
    let norm = cfg.bounds.normalizer();
    seq.tasks
        .iter()
        .map(|t| Ok(TaskData::read(&dir, &t.task_id)?.prepare(&norm)))
        .collect()
}

/// Trains through the sequence, writing one checkpoint per task,
/// `eval_matrix.json` and `timing.json`.
pub fn train(args: &TrainArgs) -> Result<TrainOutput, CliError> {
    let mut cfg: TrainRunConfig = read_json(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.suite.seed = seed;
    }
    let tasks = load_tasks(&args.config, &cfg)?;
    let task_ids: Vec<String> = tasks.iter().map(|t| t.task_id.clone()).collect();
    let mut manifest = RunManifest::start(
        &format!("train --strategy {}", args.strategy),
        &cfg,
        vec![cfg.suite.seed],
    );
    create_dir(&args.out.join("checkpoints"))?;
    let timing_path = args.out.join("timing.json");
    let eval_path = args.out.join("eval_matrix.json");

    let (mut suite, mut timing) = match latest_checkpoint(&args.out, tasks.len()).filter(|_| args.resume) {
        Some((k, path)) => {
            log::info!("resuming after task {k} from {}", path.display());
            let ck = Checkpoint::<StrategyState>::load(&path)?;
            let suite = Suite::resume(cfg.suite.clone(), ck)?;
            if suite.progress().strategy != args.strategy {
                return Err(CliError::Config(format!(
                    "checkpoint was trained with {}, not {}",
                    suite.progress().strategy,
                    args.strategy
                )));
            }
            let mut timing: TimingFile = if timing_path.exists() {
                read_json(&timing_path)?
            } else {
                TimingFile::default()
            };
            timing.task_seconds.truncate(k);
            timing.epochs_run.truncate(k);
            (suite, timing)
        }
        None => (
            Suite::new(args.strategy, cfg.suite.clone(), cfg.bounds.normalizer())?,
            TimingFile::default(),
        ),
    };

    let mut checkpoints: Vec<PathBuf> = (1..=suite.completed()).map(|k| checkpoint_path(&args.out, k)).collect();
    while suite.completed() < tasks.len() {
        let r = suite.step(&tasks)?;
        timing.task_seconds.push(r.seconds);
        timing.epochs_run.push(r.epochs_run);
        let path = checkpoint_path(&args.out, suite.completed());
        suite.checkpoint().save(&path)?;
        write_json(&timing_path, &timing)?;
        checkpoints.push(path);
    }

    let progress = suite.progress();
    let eval = EvalFile {
        strategy: progress.strategy,
        seed: progress.seed,
        task_ids,
        metrics: MetricsSummary::compute(&progress.matrix).map_err(|e| CliError::Data(e.to_string()))?,
        all_errors: progress.all_errors.clone(),
    };
    write_json(&eval_path, &eval)?;
    for p in checkpoints.iter().chain([&eval_path, &timing_path]) {
        manifest.record(&args.out, p);
    }
    manifest.finish(&args.out)?;
    Ok(TrainOutput {
        eval,
        eval_path,
        checkpoints,
    })
}
