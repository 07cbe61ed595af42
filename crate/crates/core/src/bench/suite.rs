//! Sequential scenario runs: one model trained task by task, evaluated on
//! every task seen so far after each one.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{BenchError, EvalMatrix, PreparedTask};
use crate::cl::{Hyperparams, Learner, StrategyKind, StrategyState};
use crate::nn::{train_task, Checkpoint, Dataset, Dims, Model, Normalizer, TrainConfig};
use crate::seed::{derive_seed, rng_from_seed};

fn d_hidden() -> usize {
    Dims::RTT.hidden
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Optimizer settings; the seed field is replaced per task.
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub hyper: Hyperparams,
    #[serde(default = "d_hidden")]
    pub hidden: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            hyper: Hyperparams::default(),
            hidden: d_hidden(),
            seed: 0,
        }
    }
}

/// Progress stored next to the model so a stream can resume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteProgress {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub completed_tasks: usize,
    pub matrix: EvalMatrix,
    /// `all_errors[j][k]`: test error on task `k` (any `k`) after task `j`.
    pub all_errors: Vec<Vec<f64>>,
}

/// Training outcome of one task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskReport {
    pub task_id: String,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub seconds: f64,
}

pub struct Suite {
    config: SuiteConfig,
    learner: Learner,
    model: Model,
    progress: SuiteProgress,
}

/// Test error used in the matrix; falls back to the training split when a
/// task has no test samples.
pub fn task_error(model: &Model, task: &PreparedTask) -> f64 {
    let set: &Dataset = if task.test.is_empty() { &task.train } else { &task.test };
    set.mse(model)
}

impl Suite {
    pub fn new(kind: StrategyKind, config: SuiteConfig, norm: Normalizer) -> Result<Self, BenchError> {
        config
            .hyper
            .validate()
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?;
        config.train.validate()?;
        let dims = Dims {
            input: norm.inputs.len(),
            hidden: config.hidden,
        };
        let model = Model::new(dims, norm, &mut rng_from_seed(derive_seed(config.seed, "init", 0)));
        Ok(Self {
            learner: Learner::new(kind, config.hyper.clone()),
            model,
            progress: SuiteProgress {
                strategy: kind,
                seed: config.seed,
                completed_tasks: 0,
                matrix: EvalMatrix::new(),
                all_errors: Vec::new(),
            },
            config,
        })
    }

    pub fn resume(config: SuiteConfig, checkpoint: Checkpoint<StrategyState>) -> Result<Self, BenchError> {
        let progress: SuiteProgress = serde_json::from_value(checkpoint.progress)
            .map_err(|e| BenchError::InvalidConfig(format!("checkpoint progress: {e}")))?;
        if progress.seed != config.seed {
            return Err(BenchError::InvalidConfig(format!(
                "checkpoint was written with seed {}, not {}",
                progress.seed, config.seed
            )));
        }
        let state = match (progress.strategy, checkpoint.strategy_state) {
            (StrategyKind::Baseline, _) => StrategyState::Baseline,
            (k, Some(s)) if s.kind() == k => s,
            (k, _) => {
                return Err(BenchError::InvalidConfig(format!(
                    "checkpoint lacks {k} strategy state"
                )))
            }
        };
        Ok(Self {
            learner: Learner::from_state(config.hyper.clone(), state),
            model: checkpoint.model,
            progress,
            config,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint<StrategyState> {
        let state = match self.learner.state {
            StrategyState::Baseline => None,
            ref s => Some(s.clone()),
        };
        let mut c = Checkpoint::new(self.model.clone(), state);
        c.progress = serde_json::to_value(&self.progress).expect("progress serializes");
        c
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn learner(&self) -> &Learner {
        &self.learner
    }

    pub fn progress(&self) -> &SuiteProgress {
        &self.progress
    }

    pub fn matrix(&self) -> &EvalMatrix {
        &self.progress.matrix
    }

    pub fn completed(&self) -> usize {
        self.progress.completed_tasks
    }

    /// Trains the next task of `tasks` and appends its matrix row.
    pub fn step(&mut self, tasks: &[PreparedTask]) -> Result<TaskReport, BenchError> {
        let k = self.progress.completed_tasks;
        let task = tasks.get(k).ok_or(BenchError::SequenceExhausted(k))?;
        let cfg = TrainConfig {
            seed: derive_seed(self.config.seed, "train", k as u64),
            ..self.config.train.clone()
        };
        let started = Instant::now();
        let out = train_task(&self.model, &task.train, &mut self.learner, &cfg)?;
        self.model = out.model;
        self.learner.on_task_end(&self.model, &task.train);
        let seconds = started.elapsed().as_secs_f64();

        let all: Vec<f64> = tasks.iter().map(|t| task_error(&self.model, t)).collect();
        self.progress.matrix.push_row(all[..=k].to_vec())?;
        self.progress.all_errors.push(all);
        self.progress.completed_tasks += 1;
        log::info!(
            "{} task {} ({}): best epoch {}, test error {:.6}",
            self.progress.strategy,
            k + 1,
            task.task_id,
            out.best_epoch,
            self.progress.matrix.get(k, k).unwrap_or(f64::NAN)
        );
        Ok(TaskReport {
            task_id: task.task_id.clone(),
            best_epoch: out.best_epoch,
            epochs_run: out.history.len(),
            seconds,
        })
    }
}

/// Everything a complete scenario run produces.
pub struct SuiteRun {
    pub matrix: EvalMatrix,
    pub all_errors: Vec<Vec<f64>>,
    pub reports: Vec<TaskReport>,
    pub model: Model,
    pub learner: Learner,
}

pub fn run_scenario_suite(
    tasks: &[PreparedTask],
    kind: StrategyKind,
    config: &SuiteConfig,
    norm: Normalizer,
) -> Result<SuiteRun, BenchError> {
    let mut suite = Suite::new(kind, config.clone(), norm)?;
    let mut reports = Vec::with_capacity(tasks.len());
    while suite.completed() < tasks.len() {
        reports.push(suite.step(tasks)?);
    }
    Ok(SuiteRun {
        matrix: suite.progress.matrix,
        all_errors: suite.progress.all_errors,
        reports,
        model: suite.model,
        learner: suite.learner,
    })
}

/// Improvement on an unseen `target` from continuing past the first prefix
/// task: error after prefix task 1 minus error after the whole prefix.
pub fn indirect_learning(
    prefix: &[PreparedTask],
    target: &PreparedTask,
    kind: StrategyKind,
    config: &SuiteConfig,
    norm: Normalizer,
) -> Result<f64, BenchError> {
    if prefix.is_empty() {
        return Err(BenchError::InvalidSequence("indirect learning needs a prefix".into()));
    }
    if prefix.iter().any(|t| t.task_id == target.task_id) {
        return Err(BenchError::InvalidSequence(format!(
            "target `{}` is part of the training prefix",
            target.task_id
        )));
    }
    let mut tasks = prefix.to_vec();
    tasks.push(target.clone());
    let mut suite = Suite::new(kind, config.clone(), norm)?;
    for _ in prefix {
        suite.step(&tasks)?;
    }
    let t = prefix.len();
    let e = &suite.progress.all_errors;
    Ok(e[0][t] - e[t - 1][t])
}
