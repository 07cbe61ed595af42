use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{backward, mse_loss, Model, NnError, Objective};
use crate::seed::{rng_from_seed, SimRng};

/// Normalized samples: one feature row and one target per sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>) -> Self {
        assert_eq!(x.len(), y.len(), "feature/target count mismatch");
        Self { x, y }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: idx.iter().map(|&i| self.x[i].clone()).collect(),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    pub fn batch(&self, idx: &[usize]) -> Batch<'_> {
        Batch {
            inputs: idx.iter().map(|&i| self.x[i].as_slice()).collect(),
            targets: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }

    pub fn push(&mut self, x: Vec<f64>, y: f64) {
        self.x.push(x);
        self.y.push(y);
    }

    /// Plain MSE of `model` over every sample.
    pub fn mse(&self, model: &Model) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let pred: Vec<f64> = self.x.iter().map(|x| model.predict(x)).collect();
        mse_loss(&pred, &self.y).expect("non-empty, equal lengths")
    }

    /// Seeded split into (train, validation). With fewer than two samples the
    /// validation set is empty.
    pub fn split(&self, fraction: f64, rng: &mut SimRng) -> (Dataset, Dataset) {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(rng);
        let n_val = if self.len() < 2 {
            0
        } else {
            ((self.len() as f64 * fraction).round() as usize).clamp(1, self.len() - 1)
        };
        let (val, train) = idx.split_at(n_val);
        (self.subset(train), self.subset(val))
    }
}

/// A mini-batch borrowed from a [`Dataset`].
#[derive(Debug, Clone)]
pub struct Batch<'a> {
    pub inputs: Vec<&'a [f64]>,
    pub targets: Vec<f64>,
}

impl Batch<'_> {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Plain squared-error objective on this batch, weighted by `weight`.
    pub fn mse_objective(&self, weight: f64) -> Objective {
        let mut obj = Objective::new();
        let pairs = self
            .inputs
            .iter()
            .zip(&self.targets)
            .map(|(x, &t)| (obj.add_input(x.to_vec()), t))
            .collect();
        obj.add_fit(weight, pairs);
        obj
    }
}

fn d_epochs() -> usize {
    100
}
fn d_batch() -> usize {
    128
}
fn d_lr() -> f64 {
    0.001
}
fn d_patience() -> usize {
    10
}
fn d_val() -> f64 {
    0.2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default = "d_epochs")]
    pub epochs: usize,
    #[serde(default = "d_batch")]
    pub batch_size: usize,
    #[serde(default = "d_lr")]
    pub learning_rate: f64,
    #[serde(default = "d_patience")]
    pub patience: usize,
    #[serde(default = "d_val")]
    pub validation_fraction: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: d_epochs(),
            batch_size: d_batch(),
            learning_rate: d_lr(),
            patience: d_patience(),
            validation_fraction: d_val(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |m: &str| Err(NnError::InvalidConfig(m.to_string()));
        if self.epochs == 0 || self.batch_size == 0 || self.patience == 0 {
            return bad("epochs, batch_size and patience must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad("learning_rate must be finite and nonnegative");
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return bad("validation_fraction must lie in (0, 1)");
        }
        Ok(())
    }
}

/// Mutable context handed to strategy hooks after each update.
pub struct StepContext<'a> {
    pub epoch: usize,
    pub config: &'a TrainConfig,
    pub rng: &'a mut SimRng,
}

/// Hooks through which a learning strategy shapes task training.
pub trait TrainingStrategy {
    /// Called once before the first epoch of a task.
    fn begin_task(&mut self, _model: &Model, _train: &Dataset, _validation: &Dataset) {}

    /// Loss to minimise on `batch`.
    fn objective(&mut self, model: &Model, batch: &Batch<'_>, rng: &mut SimRng) -> Objective;

    /// Called after every parameter update with the batch just used.
    fn after_update(&mut self, _model: &mut Model, _batch: &Batch<'_>, _ctx: &mut StepContext<'_>) {}
}

/// Plain MSE on the current batch.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlainMse;

impl TrainingStrategy for PlainMse {
    fn objective(&mut self, _model: &Model, batch: &Batch<'_>, _rng: &mut SimRng) -> Objective {
        batch.mse_objective(1.0)
    }
}

/// One gradient-descent update; returns the loss before the step.
pub fn sgd_update(model: &mut Model, objective: &Objective, learning_rate: f64) -> f64 {
    let g = backward(model, objective);
    for (p, d) in model.params_mut().iter_mut().zip(&g.grad) {
        *p -= learning_rate * d;
    }
    g.loss
}

/// Shuffled mini-batch passes over `data` with a caller-supplied objective.
pub fn sgd_epochs(
    model: &mut Model,
    data: &Dataset,
    epochs: usize,
    config: &TrainConfig,
    rng: &mut SimRng,
    mut objective: impl FnMut(&Model, &Batch<'_>) -> Objective,
) {
    let mut order: Vec<usize> = (0..data.len()).collect();
    for _ in 0..epochs {
        order.shuffle(rng);
        for chunk in order.chunks(config.batch_size) {
            let batch = data.batch(chunk);
            let obj = objective(model, &batch);
            sgd_update(model, &obj, config.learning_rate);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_mse: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Snapshot with the lowest validation MSE.
    pub model: Model,
    pub best_epoch: usize,
    pub best_val_mse: f64,
    pub history: Vec<EpochRecord>,
}

/// Trains `model` on one task with early stopping on a held-out split.
pub fn train_task(
    model: &Model,
    data: &Dataset,
    strategy: &mut dyn TrainingStrategy,
    config: &TrainConfig,
) -> Result<TrainOutcome, NnError> {
    if data.is_empty() {
        return Err(NnError::EmptyDataset);
    }
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let (train, mut validation) = data.split(config.validation_fraction, &mut rng);
    if validation.is_empty() {
        validation = train.clone();
    }
    strategy.begin_task(model, &train, &validation);

    let mut current = model.clone();
    let mut best: Option<(Model, usize, f64)> = None;
    let mut since_best = 0;
    let mut history = Vec::with_capacity(config.epochs);
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(config.batch_size) {
            let batch = train.batch(chunk);
            let obj = strategy.objective(&current, &batch, &mut rng);
            loss_sum += sgd_update(&mut current, &obj, config.learning_rate);
            batches += 1;
            let mut ctx = StepContext {
                epoch,
                config,
                rng: &mut rng,
            };
            strategy.after_update(&mut current, &batch, &mut ctx);
        }
        if !current.is_finite() {
            return Err(NnError::Diverged { epoch });
        }
        let val_mse = validation.mse(&current);
        history.push(EpochRecord {
            epoch,
            train_loss: loss_sum / batches as f64,
            val_mse,
        });
        match &best {
            Some((_, _, b)) if val_mse >= *b => {
                since_best += 1;
                if since_best >= config.patience {
                    break;
                }
            }
            _ => {
                best = Some((current.clone(), epoch, val_mse));
                since_best = 0;
            }
        }
    }
    let (model, best_epoch, best_val_mse) = best.expect("at least one epoch ran");
    Ok(TrainOutcome {
        model,
        best_epoch,
        best_val_mse,
        history,
    })
}
