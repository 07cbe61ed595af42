//! Novelty/familiarity buffering with an adaptive loss threshold.

use serde::{Deserialize, Serialize};

use super::Anchor;

/// Buffers handed back when their combined size reaches the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Flush {
    pub novelty: Vec<(Vec<f64>, f64)>,
    pub familiarity: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearState {
    /// Parameters and importance of the most recent finished task only.
    pub anchor: Option<Anchor>,
    /// `None` until the first validation error is known.
    pub mse_min: Option<f64>,
    pub alpha: f64,
    pub buffer_limit: usize,
    pub novelty: Vec<(Vec<f64>, f64)>,
    pub familiarity: Vec<(Vec<f64>, f64)>,
    pub retrains: u64,
}

impl ClearState {
    pub fn new(alpha: f64, buffer_limit: usize) -> Self {
        Self {
            anchor: None,
            mse_min: None,
            alpha,
            buffer_limit,
            novelty: Vec::new(),
            familiarity: Vec::new(),
            retrains: 0,
        }
    }

    /// `α · mse_min`; unbounded before `mse_min` is set.
    pub fn threshold(&self) -> f64 {
        self.mse_min.map_or(f64::INFINITY, |m| self.alpha * m)
    }

    pub fn buffered(&self) -> usize {
        self.novelty.len() + self.familiarity.len()
    }

    /// Sorts one sample by its loss. Losses above the threshold are novel;
    /// ties count as familiar. Returns the emptied buffers once full.
    pub fn observe(&mut self, x: &[f64], y: f64, loss: f64) -> Option<Flush> {
        if loss > self.threshold() {
            self.novelty.push((x.to_vec(), y));
        } else {
            self.familiarity.push((x.to_vec(), y));
        }
        if self.buffer_limit == 0 || self.buffered() < self.buffer_limit {
            return None;
        }
        if !self.novelty.is_empty() {
            self.retrains += 1;
        }
        Some(Flush {
            novelty: std::mem::take(&mut self.novelty),
            familiarity: std::mem::take(&mut self.familiarity),
        })
    }

    /// Lowers `mse_min` (and with it the threshold) to the smallest loss seen
    /// on the familiarity buffer, if that is lower.
    pub fn offer_min(&mut self, losses: impl IntoIterator<Item = f64>) {
        for l in losses {
            if self.mse_min.is_none_or(|m| l < m) {
                self.mse_min = Some(l);
            }
        }
    }

    pub fn clear_buffers(&mut self) {
        self.novelty.clear();
        self.familiarity.clear();
    }
}
