use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::SimRng;

/// Layer widths of the two-layer network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub input: usize,
    pub hidden: usize,
}

impl Dims {
    /// The RTT estimator: 12 inputs, 20 hidden ReLU units, one output.
    pub const RTT: Dims = Dims { input: 12, hidden: 20 };

    pub fn param_count(&self) -> usize {
        self.hidden * self.input + 2 * self.hidden + 1
    }

    pub fn w1(&self, h: usize, i: usize) -> usize {
        h * self.input + i
    }

    pub fn b1(&self, h: usize) -> usize {
        self.hidden * self.input + h
    }

    pub fn w2(&self, h: usize) -> usize {
        self.hidden * self.input + self.hidden + h
    }

    pub fn b2(&self) -> usize {
        self.hidden * self.input + 2 * self.hidden
    }
}

/// Closed interval used for min-max scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const UNIT: Range = Range { min: 0.0, max: 1.0 };

    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    /// Maps `v` to `[0, 1]` when it lies in the range. A degenerate range
    /// marks an inactive feature and maps everything to 0.
    pub fn normalize(&self, v: f64) -> f64 {
        let span = self.max - self.min;
        if span > 0.0 {
            (v - self.min) / span
        } else {
            0.0
        }
    }

    pub fn denormalize(&self, v: f64) -> f64 {
        self.min + v * (self.max - self.min)
    }
}

/// Global min-max constants for every input feature and the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub inputs: Vec<Range>,
    pub output: Range,
}

impl Normalizer {
    /// No-op scaling for data that is already in `[0, 1]`.
    pub fn identity(input: usize) -> Self {
        Self {
            inputs: vec![Range::UNIT; input],
            output: Range::UNIT,
        }
    }

    pub fn normalize_input(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.inputs).map(|(&v, r)| r.normalize(v)).collect()
    }

    pub fn normalize_output(&self, y: f64) -> f64 {
        self.output.normalize(y)
    }

    pub fn denormalize_output(&self, y: f64) -> f64 {
        self.output.denormalize(y)
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    /// Regression output; identical to `raw` for this network.
    pub y: f64,
    pub hidden: Vec<f64>,
    /// Output before any final transform, the "logits" replayed by DER.
    pub raw: f64,
}

/// A `input → hidden (ReLU) → 1` regression network.
///
/// Parameters live in one flat vector: `W1` row-major, then `b1`, `W2`, `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    dims: Dims,
    params: Vec<f64>,
    pub norm: Normalizer,
}

impl Model {
    pub fn zeros(dims: Dims, norm: Normalizer) -> Self {
        Self {
            dims,
            params: vec![0.0; dims.param_count()],
            norm,
        }
    }

    /// He-style uniform initialization, `U(−√(6/fan_in), √(6/fan_in))` for
    /// both weight matrices and zero biases.
    pub fn new(dims: Dims, norm: Normalizer, rng: &mut SimRng) -> Self {
        let mut m = Self::zeros(dims, norm);
        let a1 = (6.0 / dims.input as f64).sqrt();
        let a2 = (6.0 / dims.hidden as f64).sqrt();
        for h in 0..dims.hidden {
            for i in 0..dims.input {
                m.params[dims.w1(h, i)] = rng.random_range(-a1..a1);
            }
        }
        for h in 0..dims.hidden {
            m.params[dims.w2(h)] = rng.random_range(-a2..a2);
        }
        m
    }

    pub fn from_params(dims: Dims, params: Vec<f64>, norm: Normalizer) -> Self {
        assert_eq!(params.len(), dims.param_count(), "parameter vector length");
        Self { dims, params, norm }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Hidden pre-activations `W1·x + b1`.
    pub fn pre_activations(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dims;
        debug_assert_eq!(x.len(), d.input);
        (0..d.hidden)
            .map(|h| {
                let row = &self.params[d.w1(h, 0)..d.w1(h, 0) + d.input];
                row.iter().zip(x).fold(self.params[d.b1(h)], |acc, (w, v)| acc + w * v)
            })
            .collect()
    }

    pub fn forward(&self, x: &[f64]) -> Forward {
        let d = self.dims;
        let hidden: Vec<f64> = self.pre_activations(x).into_iter().map(|z| z.max(0.0)).collect();
        let raw = hidden
            .iter()
            .enumerate()
            .fold(self.params[d.b2()], |acc, (h, a)| acc + self.params[d.w2(h)] * a);
        Forward { y: raw, hidden, raw }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.forward(x).y
    }

    /// Predicts an RTT in seconds from raw (unnormalized) features.
    pub fn predict_raw(&self, features: &[f64]) -> f64 {
        self.norm
            .denormalize_output(self.predict(&self.norm.normalize_input(features)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    /// Straight matrix arithmetic over explicitly separated weights.
    fn oracle_forward(w1: &[Vec<f64>], b1: &[f64], w2: &[f64], b2: f64, x: &[f64]) -> f64 {
        let mut out = b2;
        for h in 0..w1.len() {
            let mut z = b1[h];
            for i in 0..x.len() {
                z += w1[h][i] * x[i];
            }
            out += w2[h] * if z > 0.0 { z } else { 0.0 };
        }
        out
    }

    #[test]
    fn zero_network_outputs_zero() {
        let m = Model::zeros(Dims::RTT, Normalizer::identity(12));
        assert_eq!(m.predict(&[0.3; 12]), 0.0);
    }

    #[test]
    fn constant_head() {
        let mut m = Model::new(Dims::RTT, Normalizer::identity(12), &mut rng_from_seed(1));
        let d = m.dims();
        for h in 0..d.hidden {
            m.params_mut()[d.w2(h)] = 0.0;
        }
        m.params_mut()[d.b2()] = 0.37;
        for x in [[0.0; 12], [1.0; 12], [0.5; 12]] {
            assert_eq!(m.predict(&x), 0.37);
        }
    }

    #[test]
    fn forward_matches_matrix_oracle() {
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let mut m = Model::new(Dims::RTT, Normalizer::identity(12), &mut rng);
            let d = m.dims();
            for p in m.params_mut() {
                *p += rng.random_range(-0.1..0.1);
            }
            let w1: Vec<Vec<f64>> = (0..d.hidden)
                .map(|h| (0..d.input).map(|i| m.params()[d.w1(h, i)]).collect())
                .collect();
            let b1: Vec<f64> = (0..d.hidden).map(|h| m.params()[d.b1(h)]).collect();
            let w2: Vec<f64> = (0..d.hidden).map(|h| m.params()[d.w2(h)]).collect();
            let x: Vec<f64> = (0..12).map(|_| rng.random_range(0.0..1.0)).collect();
            let expected = oracle_forward(&w1, &b1, &w2, m.params()[d.b2()], &x);
            let got = m.forward(&x);
            assert!((got.y - expected).abs() < 1e-12);
            assert_eq!(got.y, got.raw);
        }
    }

    #[test]
    fn normalization_round_trip() {
        let r = Range::new(10.0, 90.0);
        for v in [10.0, 33.3, 90.0] {
            let n = r.normalize(v);
            assert!((0.0..=1.0).contains(&n));
            assert!((r.denormalize(n) - v).abs() < 1e-12);
        }
        assert_eq!(Range::new(5.0, 5.0).normalize(5.0), 0.0);
    }

    #[test]
    fn init_is_seeded() {
        let a = Model::new(Dims::RTT, Normalizer::identity(12), &mut rng_from_seed(3));
        let b = Model::new(Dims::RTT, Normalizer::identity(12), &mut rng_from_seed(3));
        assert_eq!(a, b);
        let bound = (6.0f64 / 12.0).sqrt();
        let d = a.dims();
        assert!((0..d.hidden).all(|h| a.params()[d.w1(h, 0)].abs() <= bound));
        assert_eq!(a.params()[d.b2()], 0.0);
    }
}
