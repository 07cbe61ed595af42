//! Strategy losses as [`Objective`]s over the current batch.
//!
//! Each `*_objective` builds the composite loss so that one backward pass
//! yields its gradient; the matching `*_loss` evaluates it.

use crate::nn::{Batch, Model, Objective, Penalty};

use super::{Anchor, ReplayEntry};

pub fn baseline_objective(batch: &Batch<'_>) -> Objective {
    batch.mse_objective(1.0)
}

pub fn baseline_loss(model: &Model, batch: &Batch<'_>) -> f64 {
    baseline_objective(batch).value(model)
}

/// `(1−λ)·MSE + λ/(K−1)·Σ_k MSE(y, y_old^k)` with every frozen model
/// evaluated on the current batch inputs.
///
/// With no frozen models there is nothing to distil and the plain MSE is used.
pub fn lwf_objective(batch: &Batch<'_>, snapshots: &[Model], lambda: f64) -> Objective {
    if snapshots.is_empty() {
        return batch.mse_objective(1.0);
    }
    let mut obj = batch.mse_objective(1.0 - lambda);
    let w = lambda / snapshots.len() as f64;
    for old in snapshots {
        let pairs = batch
            .inputs
            .iter()
            .enumerate()
            .map(|(i, x)| (i, old.predict(x)))
            .collect();
        obj.add_fit(w, pairs);
    }
    obj
}

pub fn lwf_loss(model: &Model, batch: &Batch<'_>, snapshots: &[Model], lambda: f64) -> f64 {
    lwf_objective(batch, snapshots, lambda).value(model)
}

/// `MSE + λ/2·Σ_k Σ_i F_i^k (θ_i − θ̂_i^k)²`.
pub fn ewc_objective(batch: &Batch<'_>, anchors: &[Anchor], lambda: f64) -> Objective {
    let mut obj = batch.mse_objective(1.0);
    for a in anchors {
        obj.add_penalty(Penalty {
            weight: lambda / 2.0,
            importance: a.importance.clone(),
            anchor: a.params.clone(),
        });
    }
    obj
}

pub fn ewc_loss(model: &Model, batch: &Batch<'_>, anchors: &[Anchor], lambda: f64) -> f64 {
    ewc_objective(batch, anchors, lambda).value(model)
}

/// The penalty part of [`ewc_loss`] alone.
pub fn ewc_penalty(params: &[f64], anchors: &[Anchor], lambda: f64) -> f64 {
    anchors
        .iter()
        .map(|a| {
            Penalty {
                weight: lambda / 2.0,
                importance: a.importance.clone(),
                anchor: a.params.clone(),
            }
            .value(params)
        })
        .sum()
}

/// `MSE + α·MSE(z′, raw(x′)) + β·MSE(y″, y(x″))` over two replay draws.
///
/// Output and raw output coincide for this network, so both replay terms fit
/// the same head, one against stored outputs and one against stored targets.
pub fn der_objective(
    batch: &Batch<'_>,
    logit_replay: &[&ReplayEntry],
    target_replay: &[&ReplayEntry],
    alpha: f64,
    beta: f64,
) -> Objective {
    let mut obj = batch.mse_objective(1.0);
    let fit = |obj: &mut Objective, weight: f64, draw: &[&ReplayEntry], target: fn(&ReplayEntry) -> f64| {
        let pairs = draw.iter().map(|e| (obj.add_input(e.x.clone()), target(e))).collect();
        obj.add_fit(weight, pairs);
    };
    fit(&mut obj, alpha, logit_replay, |e| e.z);
    fit(&mut obj, beta, target_replay, |e| e.y);
    obj
}

pub fn der_loss(
    model: &Model,
    batch: &Batch<'_>,
    logit_replay: &[&ReplayEntry],
    target_replay: &[&ReplayEntry],
    alpha: f64,
    beta: f64,
) -> f64 {
    der_objective(batch, logit_replay, target_replay, alpha, beta).value(model)
}
