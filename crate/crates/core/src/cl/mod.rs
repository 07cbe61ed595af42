//! Continual-learning strategies over the [`crate::nn`] regressor.
//!
//! A strategy contributes two things: a training loss (built as an
//! [`crate::nn::Objective`]) and a consolidation hook run when a task ends.
//! [`Learner`] bundles both behind the [`crate::nn::TrainingStrategy`] trait.

mod clear;
mod fisher;
mod learner;
mod losses;
mod reservoir;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use clear::{ClearState, Flush};
pub use fisher::fisher_diagonal;
pub use learner::{Learner, StrategyState};
pub use losses::{
    baseline_loss, baseline_objective, der_loss, der_objective, ewc_loss, ewc_objective, ewc_penalty, lwf_loss,
    lwf_objective,
};
pub use reservoir::{ReplayEntry, Reservoir};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Baseline,
    Lwf,
    Ewc,
    Clear,
    Der,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [Self::Baseline, Self::Lwf, Self::Ewc, Self::Clear, Self::Der];

    pub fn name(self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::Lwf => "lwf",
            Self::Ewc => "ewc",
            Self::Clear => "clear",
            Self::Der => "der",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy `{0}` (expected baseline, lwf, ewc, clear or der)")]
pub struct UnknownStrategy(pub String);

impl FromStr for StrategyKind {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// Parameters at the end of a task and their per-parameter importance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub params: Vec<f64>,
    pub importance: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    pub lwf_lambda: f64,
    /// Keep only the most recent frozen model instead of one per task.
    pub lwf_previous_only: bool,
    pub ewc_lambda: f64,
    pub clear_lambda: f64,
    pub clear_alpha: f64,
    pub clear_buffer: usize,
    /// Epoch cap for each retraining pass on the novelty buffer.
    pub clear_retrain_epochs: usize,
    pub der_alpha: f64,
    pub der_beta: f64,
    pub der_buffer: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            lwf_lambda: 0.9,
            lwf_previous_only: false,
            ewc_lambda: 0.75,
            clear_lambda: 2.0,
            clear_alpha: 0.5,
            clear_buffer: 50,
            clear_retrain_epochs: 10,
            der_alpha: 200.0,
            der_beta: 200.0,
            der_buffer: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid hyperparameter `{0}`")]
pub struct InvalidHyperparams(pub &'static str);

impl Hyperparams {
    pub fn validate(&self) -> Result<(), InvalidHyperparams> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(0.0..=1.0).contains(&self.lwf_lambda) {
            return Err(InvalidHyperparams("lwf_lambda"));
        }
        for (name, v) in [
            ("ewc_lambda", self.ewc_lambda),
            ("clear_lambda", self.clear_lambda),
            ("clear_alpha", self.clear_alpha),
            ("der_alpha", self.der_alpha),
            ("der_beta", self.der_beta),
        ] {
            if !ok(v) {
                return Err(InvalidHyperparams(name));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_published_settings() {
        let h = Hyperparams::default();
        assert_eq!((h.lwf_lambda, h.ewc_lambda), (0.9, 0.75));
        assert_eq!((h.clear_lambda, h.clear_alpha, h.clear_buffer), (2.0, 0.5, 50));
        assert_eq!((h.der_alpha, h.der_beta, h.der_buffer), (200.0, 200.0, 5));
        h.validate().unwrap();
    }

    #[test]
    fn strategy_names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.to_string().parse::<StrategyKind>().unwrap(), k);
        }
        assert!("sgd".parse::<StrategyKind>().is_err());
    }

    #[test]
    fn lambda_out_of_range_rejected() {
        let h = Hyperparams {
            lwf_lambda: 1.5,
            ..Hyperparams::default()
        };
        assert_eq!(h.validate(), Err(InvalidHyperparams("lwf_lambda")));
    }
}
