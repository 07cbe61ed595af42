//! Central finite-difference check of [`backward`].

use super::{backward, Model, Objective};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    /// Largest `|analytic − numeric| / max(|analytic|, |numeric|, floor)`.
    pub max_rel_error: f64,
    pub checked: usize,
    /// Parameters whose perturbation flips a ReLU; the loss has a kink there.
    pub skipped: usize,
}

/// Compares analytic and numeric gradients for every parameter.
pub fn gradient_check(model: &Model, objective: &Objective, h: f64, floor: f64) -> GradCheck {
    let analytic = backward(model, objective).grad;
    let signs = |m: &Model| -> Vec<bool> {
        objective
            .inputs
            .iter()
            .flat_map(|x| m.pre_activations(x))
            .map(|a| a > 0.0)
            .collect()
    };
    let base = signs(model);
    let mut out = GradCheck {
        max_rel_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for (k, &a) in analytic.iter().enumerate() {
        let mut plus = model.clone();
        plus.params_mut()[k] += h;
        let mut minus = model.clone();
        minus.params_mut()[k] -= h;
        if signs(&plus) != base || signs(&minus) != base {
            out.skipped += 1;
            continue;
        }
        let n = (objective.value(&plus) - objective.value(&minus)) / (2.0 * h);
        let rel = (a - n).abs() / a.abs().max(n.abs()).max(floor);
        out.max_rel_error = out.max_rel_error.max(rel);
        out.checked += 1;
    }
    out
}
