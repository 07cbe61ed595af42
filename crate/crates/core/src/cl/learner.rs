use serde::{Deserialize, Serialize};

use super::{
    baseline_objective, der_objective, ewc_objective, fisher_diagonal, lwf_objective, Anchor, ClearState, Hyperparams,
    Reservoir, StrategyKind,
};
use crate::nn::{sgd_epochs, Batch, Dataset, Model, Objective, StepContext, TrainingStrategy};
use crate::seed::SimRng;

/// Everything a strategy carries from one task to the next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategyState {
    Baseline,
    /// Frozen parameter vectors, one per finished task.
    Lwf {
        snapshots: Vec<Vec<f64>>,
    },
    Ewc {
        anchors: Vec<Anchor>,
    },
    Clear(ClearState),
    Der {
        reservoir: Reservoir,
    },
}

impl StrategyState {
    pub fn new(kind: StrategyKind, hyper: &Hyperparams) -> Self {
        match kind {
            StrategyKind::Baseline => Self::Baseline,
            StrategyKind::Lwf => Self::Lwf { snapshots: Vec::new() },
            StrategyKind::Ewc => Self::Ewc { anchors: Vec::new() },
            StrategyKind::Clear => Self::Clear(ClearState::new(hyper.clear_alpha, hyper.clear_buffer)),
            StrategyKind::Der => Self::Der {
                reservoir: Reservoir::new(hyper.der_buffer),
            },
        }
    }

    pub fn kind(&self) -> StrategyKind {
        match self {
            Self::Baseline => StrategyKind::Baseline,
            Self::Lwf { .. } => StrategyKind::Lwf,
            Self::Ewc { .. } => StrategyKind::Ewc,
            Self::Clear(_) => StrategyKind::Clear,
            Self::Der { .. } => StrategyKind::Der,
        }
    }
}

/// A strategy with its hyperparameters and accumulated state.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    pub hyper: Hyperparams,
    pub state: StrategyState,
}

impl Learner {
    pub fn new(kind: StrategyKind, hyper: Hyperparams) -> Self {
        let state = StrategyState::new(kind, &hyper);
        Self { hyper, state }
    }

    pub fn from_state(hyper: Hyperparams, state: StrategyState) -> Self {
        Self { hyper, state }
    }

    pub fn kind(&self) -> StrategyKind {
        self.state.kind()
    }

    /// Loss used for a batch given fixed replay draws; exposed so callers can
    /// evaluate exactly what training differentiates.
    pub fn objective_with_rng(&self, model: &Model, batch: &Batch<'_>, rng: &mut SimRng) -> Objective {
        let h = &self.hyper;
        match &self.state {
            StrategyState::Baseline => baseline_objective(batch),
            StrategyState::Lwf { snapshots } => {
                let frozen: Vec<Model> = snapshots
                    .iter()
                    .map(|p| Model::from_params(model.dims(), p.clone(), model.norm.clone()))
                    .collect();
                lwf_objective(batch, &frozen, h.lwf_lambda)
            }
            StrategyState::Ewc { anchors } => ewc_objective(batch, anchors, h.ewc_lambda),
            StrategyState::Clear(c) => ewc_objective(batch, c.anchor.as_slice(), h.clear_lambda),
            StrategyState::Der { reservoir } => {
                let logits = reservoir.draw(batch.len(), rng);
                let targets = reservoir.draw(batch.len(), rng);
                der_objective(batch, &logits, &targets, h.der_alpha, h.der_beta)
            }
        }
    }

    /// Consolidates what was learned on the task that just finished.
    pub fn on_task_end(&mut self, model: &Model, data: &Dataset) {
        match &mut self.state {
            StrategyState::Baseline | StrategyState::Der { .. } => {}
            StrategyState::Lwf { snapshots } => {
                if self.hyper.lwf_previous_only {
                    snapshots.clear();
                }
                snapshots.push(model.params().to_vec());
            }
            StrategyState::Ewc { anchors } => anchors.push(Anchor {
                params: model.params().to_vec(),
                importance: fisher_diagonal(model, data),
            }),
            StrategyState::Clear(c) => {
                c.anchor = Some(Anchor {
                    params: model.params().to_vec(),
                    importance: fisher_diagonal(model, data),
                });
            }
        }
    }

    fn clear_after_update(&mut self, model: &mut Model, batch: &Batch<'_>, ctx: &mut StepContext<'_>) {
        let lambda = self.hyper.clear_lambda;
        let epochs = self.hyper.clear_retrain_epochs;
        let StrategyState::Clear(c) = &mut self.state else {
            return;
        };
        for (x, &y) in batch.inputs.iter().zip(&batch.targets) {
            let penalty = super::ewc_penalty(model.params(), c.anchor.as_slice(), lambda);
            let loss = (model.predict(x) - y).powi(2) + penalty;
            let Some(flush) = c.observe(x, y, loss) else {
                continue;
            };
            if !flush.novelty.is_empty() {
                let (xs, ys) = flush.novelty.into_iter().unzip();
                let novel = Dataset::new(xs, ys);
                let anchor = c.anchor.clone();
                sgd_epochs(model, &novel, epochs, ctx.config, ctx.rng, |_, b| {
                    ewc_objective(b, anchor.as_slice(), lambda)
                });
            }
            c.offer_min(flush.familiarity.iter().map(|(x, y)| (model.predict(x) - y).powi(2)));
        }
    }
}

impl TrainingStrategy for Learner {
    fn begin_task(&mut self, model: &Model, _train: &Dataset, validation: &Dataset) {
        if let StrategyState::Clear(c) = &mut self.state {
            c.clear_buffers();
            if c.mse_min.is_none() {
                c.mse_min = Some(validation.mse(model));
            }
        }
    }

    fn objective(&mut self, model: &Model, batch: &Batch<'_>, rng: &mut SimRng) -> Objective {
        self.objective_with_rng(model, batch, rng)
    }

    fn after_update(&mut self, model: &mut Model, batch: &Batch<'_>, ctx: &mut StepContext<'_>) {
        match &mut self.state {
            StrategyState::Der { reservoir } if ctx.epoch == 0 => {
                for (x, &y) in batch.inputs.iter().zip(&batch.targets) {
                    reservoir.offer(x, y, || model.predict(x), ctx.rng);
                }
            }
            StrategyState::Clear(_) => self.clear_after_update(model, batch, ctx),
            _ => {}
        }
    }
}
