use rand::Rng;

use super::PreparedTask;
use crate::nn::Dataset;
use crate::seed::{derive_seed, rng_from_seed};

/// A stream of `k` regression tasks on disjoint slices of the unit cube.
///
/// Task `j` draws `x_0` from `[j/k, (j+1)/k)` and the other `dim − 1`
/// coordinates from `[0, 1)`. Every task samples the same smooth nonlinear
/// target, so tasks differ only in which region of input space they cover —
/// the domain-incremental setting. Useful for measuring forgetting without
/// running the simulator.
pub fn synthetic_tasks(k: usize, n_train: usize, n_test: usize, dim: usize, seed: u64) -> Vec<PreparedTask> {
    assert!(dim >= 3, "synthetic tasks need at least three inputs");
    (0..k)
        .map(|j| {
            let mut rng = rng_from_seed(derive_seed(seed, "synthetic", j as u64));
            let lo = j as f64 / k as f64;
            let hi = (j + 1) as f64 / k as f64;
            let mut draw = |n: usize| {
                let mut d = Dataset::default();
                for _ in 0..n {
                    let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
                    x[0] = rng.random_range(lo..hi);
                    let y = target(&x);
                    d.push(x, y);
                }
                d
            };
            let train = draw(n_train);
            let test = draw(n_test);
            PreparedTask {
                task_id: format!("S{}", j + 1),
                train,
                test,
            }
        })
        .collect()
}

/// The shared target, bounded within `[0, 1]` on the unit cube.
pub fn target(x: &[f64]) -> f64 {
    0.1 + 0.5 * x[0] * x[0] + 0.2 * x[1] * (1.0 - x[0]) + 0.15 * (3.0 * x[2]).sin()
}
