//! Versioned JSON checkpoints.
//!
//! Layout: `{version, dims, w1, b1, w2, b2, norm, strategy_state, progress}`,
//! with `w1` as `hidden` rows of `input` weights. Floats are written in
//! shortest round-trip form, so a save/load cycle is bit-exact.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Dims, Model, NnError, Normalizer};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CheckpointFile<S> {
    version: u32,
    dims: Dims,
    w1: Vec<Vec<f64>>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
    norm: Normalizer,
    strategy_state: Option<S>,
    #[serde(default)]
    progress: serde_json::Value,
}

/// A model with optional strategy state and free-form progress metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<S> {
    pub model: Model,
    pub strategy_state: Option<S>,
    pub progress: serde_json::Value,
}

impl<S: Serialize + DeserializeOwned> Checkpoint<S> {
    pub fn new(model: Model, strategy_state: Option<S>) -> Self {
        Self {
            model,
            strategy_state,
            progress: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> Result<String, NnError> {
        let m = &self.model;
        let d = m.dims();
        let p = m.params();
        let file = CheckpointFile {
            version: CHECKPOINT_VERSION,
            dims: d,
            w1: (0..d.hidden)
                .map(|h| p[d.w1(h, 0)..d.w1(h, 0) + d.input].to_vec())
                .collect(),
            b1: (0..d.hidden).map(|h| p[d.b1(h)]).collect(),
            w2: (0..d.hidden).map(|h| p[d.w2(h)]).collect(),
            b2: p[d.b2()],
            norm: m.norm.clone(),
            strategy_state: self.strategy_state.as_ref(),
            progress: self.progress.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self, NnError> {
        let probe: serde_json::Value = serde_json::from_str(text)?;
        let version = probe.get("version").and_then(|v| v.as_u64());
        if version != Some(u64::from(CHECKPOINT_VERSION)) {
            return Err(NnError::SchemaVersion {
                found: version,
                expected: CHECKPOINT_VERSION,
            });
        }
        let f: CheckpointFile<S> = serde_json::from_value(probe)?;
        let d = f.dims;
        let shape_err = |what: &str| Err(NnError::ShapeMismatch(what.to_string()));
        if f.w1.len() != d.hidden || f.w1.iter().any(|r| r.len() != d.input) {
            return shape_err("w1");
        }
        if f.b1.len() != d.hidden {
            return shape_err("b1");
        }
        if f.w2.len() != d.hidden {
            return shape_err("w2");
        }
        if f.norm.inputs.len() != d.input {
            return shape_err("norm.inputs");
        }
        let mut params = Vec::with_capacity(d.param_count());
        for row in &f.w1 {
            params.extend_from_slice(row);
        }
        params.extend_from_slice(&f.b1);
        params.extend_from_slice(&f.w2);
        params.push(f.b2);
        Ok(Self {
            model: Model::from_params(d, params, f.norm),
            strategy_state: f.strategy_state,
            progress: f.progress,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
