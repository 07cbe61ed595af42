use super::{Model, NnError};

/// Mean squared error between two equally long, nonempty slices.
pub fn mse_loss(pred: &[f64], truth: &[f64]) -> Result<f64, NnError> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(NnError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let sum: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sum / pred.len() as f64)
}

/// `weight · mean_j (f(x_{input_j}) − target_j)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTerm {
    pub weight: f64,
    /// (index into [`Objective::inputs`], target) pairs.
    pub pairs: Vec<(usize, f64)>,
}

/// `weight · Σ_i importance_i · (θ_i − anchor_i)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Penalty {
    pub weight: f64,
    pub importance: Vec<f64>,
    pub anchor: Vec<f64>,
}

impl Penalty {
    pub fn value(&self, params: &[f64]) -> f64 {
        self.weight
            * params
                .iter()
                .zip(&self.importance)
                .zip(&self.anchor)
                .map(|((p, f), a)| f * (p - a) * (p - a))
                .sum::<f64>()
    }
}

/// A composite training loss: weighted squared-error fits over a shared pool
/// of inputs plus quadratic parameter penalties.
///
/// Every strategy loss is built from these two pieces; the pool lets several
/// fits (e.g. distillation against several frozen models) share one forward
/// pass per input.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Objective {
    pub inputs: Vec<Vec<f64>>,
    pub fits: Vec<FitTerm>,
    pub penalties: Vec<Penalty>,
}

/// Loss value and its gradient with respect to every model parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub loss: f64,
    pub grad: Vec<f64>,
}

impl Objective {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_input(&mut self, x: Vec<f64>) -> usize {
        self.inputs.push(x);
        self.inputs.len() - 1
    }

    pub fn add_fit(&mut self, weight: f64, pairs: Vec<(usize, f64)>) {
        self.fits.push(FitTerm { weight, pairs });
    }

    pub fn add_penalty(&mut self, penalty: Penalty) {
        self.penalties.push(penalty);
    }

    pub fn value(&self, model: &Model) -> f64 {
        let outputs: Vec<f64> = self.inputs.iter().map(|x| model.predict(x)).collect();
        self.value_with_outputs(model, &outputs)
    }

    fn value_with_outputs(&self, model: &Model, outputs: &[f64]) -> f64 {
        let fit: f64 = self
            .fits
            .iter()
            .filter(|f| !f.pairs.is_empty())
            .map(|f| {
                let sse: f64 = f.pairs.iter().map(|&(i, t)| (outputs[i] - t).powi(2)).sum();
                f.weight * sse / f.pairs.len() as f64
            })
            .sum();
        let pen: f64 = self.penalties.iter().map(|p| p.value(model.params())).sum();
        fit + pen
    }
}

/// Analytic gradient of `objective` at `model` by backpropagation.
pub fn backward(model: &Model, objective: &Objective) -> Gradients {
    let d = model.dims();
    let params = model.params();
    let passes: Vec<_> = objective.inputs.iter().map(|x| model.forward(x)).collect();
    let outputs: Vec<f64> = passes.iter().map(|f| f.y).collect();

    // dL/dy for each pooled input.
    let mut dy = vec![0.0; objective.inputs.len()];
    for f in objective.fits.iter().filter(|f| !f.pairs.is_empty()) {
        let scale = 2.0 * f.weight / f.pairs.len() as f64;
        for &(i, t) in &f.pairs {
            dy[i] += scale * (outputs[i] - t);
        }
    }

    let mut grad = vec![0.0; d.param_count()];
    for ((x, pass), &g) in objective.inputs.iter().zip(&passes).zip(&dy) {
        if g == 0.0 {
            continue;
        }
        grad[d.b2()] += g;
        for h in 0..d.hidden {
            let a = pass.hidden[h];
            grad[d.w2(h)] += g * a;
            if a > 0.0 {
                let gz = g * params[d.w2(h)];
                grad[d.b1(h)] += gz;
                let row = d.w1(h, 0);
                for (gi, xi) in grad[row..row + d.input].iter_mut().zip(x) {
                    *gi += gz * xi;
                }
            }
        }
    }
    for p in &objective.penalties {
        for (k, g) in grad.iter_mut().enumerate() {
            *g += 2.0 * p.weight * p.importance[k] * (params[k] - p.anchor[k]);
        }
    }
    Gradients {
        loss: objective.value_with_outputs(model, &outputs),
        grad,
    }
}
