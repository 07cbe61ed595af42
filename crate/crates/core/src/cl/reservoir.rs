use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::seed::SimRng;

/// A stored sample: normalized input, target and the model's raw output at
/// the moment it was stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub x: Vec<f64>,
    pub y: f64,
    pub z: f64,
}

/// Fixed-capacity uniform sample of a stream (Vitter's algorithm R).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reservoir {
    pub capacity: usize,
    pub seen: u64,
    pub entries: Vec<ReplayEntry>,
}

impl Reservoir {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            seen: 0,
            entries: Vec::with_capacity(capacity),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Offers one stream element; `z` is only evaluated if it gets stored.
    /// Returns the slot written, if any.
    pub fn offer(&mut self, x: &[f64], y: f64, z: impl FnOnce() -> f64, rng: &mut SimRng) -> Option<usize> {
        self.seen += 1;
        if self.capacity == 0 {
            return None;
        }
        let slot = if self.entries.len() < self.capacity {
            self.entries.push(ReplayEntry {
                x: Vec::new(),
                y: 0.0,
                z: 0.0,
            });
            self.entries.len() - 1
        } else {
            let j = rng.random_range(0..self.seen);
            if j >= self.capacity as u64 {
                return None;
            }
            j as usize
        };
        self.entries[slot] = ReplayEntry {
            x: x.to_vec(),
            y,
            z: z(),
        };
        Some(slot)
    }

    /// `count` entries drawn uniformly with replacement.
    pub fn draw(&self, count: usize, rng: &mut SimRng) -> Vec<&ReplayEntry> {
        if self.entries.is_empty() {
            return Vec::new();
        }
        (0..count)
            .map(|_| &self.entries[rng.random_range(0..self.entries.len())])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn feed(r: &mut Reservoir, n: usize, rng: &mut SimRng) {
        for i in 0..n {
            r.offer(&[i as f64], i as f64, || -(i as f64), rng);
        }
    }

    #[test]
    fn under_capacity_keeps_everything() {
        let mut r = Reservoir::new(5);
        feed(&mut r, 5, &mut rng_from_seed(0));
        let ys: Vec<f64> = r.entries.iter().map(|e| e.y).collect();
        assert_eq!(ys, [0.0, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(r.entries[3].z, -3.0);
    }

    #[test]
    fn zero_capacity_stays_empty() {
        let mut r = Reservoir::new(0);
        feed(&mut r, 100, &mut rng_from_seed(0));
        assert!(r.is_empty());
        assert_eq!(r.seen, 100);
        assert!(r.draw(4, &mut rng_from_seed(1)).is_empty());
    }

    #[test]
    fn never_exceeds_capacity() {
        let mut r = Reservoir::new(5);
        let mut rng = rng_from_seed(2);
        for i in 0..500 {
            r.offer(&[0.0], i as f64, || 0.0, &mut rng);
            assert!(r.entries.len() <= 5);
        }
    }

    #[test]
    fn inclusion_is_uniform() {
        const N: usize = 200;
        const TRIALS: usize = 20_000;
        let mut hits = vec![0u32; N];
        let mut rng = rng_from_seed(11);
        for _ in 0..TRIALS {
            let mut r = Reservoir::new(5);
            feed(&mut r, N, &mut rng);
            for e in &r.entries {
                hits[e.y as usize] += 1;
            }
        }
        let p = 5.0 / N as f64;
        let sigma = (TRIALS as f64 * p * (1.0 - p)).sqrt();
        let mean = TRIALS as f64 * p;
        let worst = hits
            .iter()
            .map(|&h| (h as f64 - mean).abs() / sigma)
            .fold(0.0, f64::max);
        // max of 200 standard normals rarely exceeds 4
        assert!(worst < 4.5, "{worst}");
    }
}
