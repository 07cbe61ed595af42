use crate::nn::{backward, Dataset, Model, Objective};

/// Per-parameter population variance of single-sample squared-error
/// gradients over `data`.
pub fn fisher_diagonal(model: &Model, data: &Dataset) -> Vec<f64> {
    let n_params = model.dims().param_count();
    let mut mean = vec![0.0; n_params];
    let mut m2 = vec![0.0; n_params];
    for (k, (x, &y)) in data.x.iter().zip(&data.y).enumerate() {
        let mut obj = Objective::new();
        let i = obj.add_input(x.clone());
        obj.add_fit(1.0, vec![(i, y)]);
        let g = backward(model, &obj).grad;
        let n = (k + 1) as f64;
        for ((m, s), gi) in mean.iter_mut().zip(m2.iter_mut()).zip(g) {
            let delta = gi - *m;
            *m += delta / n;
            *s += delta * (gi - *m);
        }
    }
    if data.is_empty() {
        return m2;
    }
    let n = data.len() as f64;
    m2.into_iter().map(|s| (s / n).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Dims, Normalizer};
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    /// Hand-written per-sample gradient of (y − t)² for the two-layer net.
    fn sample_grad(m: &Model, x: &[f64], t: f64) -> Vec<f64> {
        let d = m.dims();
        let p = m.params();
        let z: Vec<f64> = (0..d.hidden)
            .map(|h| p[d.b1(h)] + (0..d.input).map(|i| p[d.w1(h, i)] * x[i]).sum::<f64>())
            .collect();
        let y = p[d.b2()] + (0..d.hidden).map(|h| p[d.w2(h)] * z[h].max(0.0)).sum::<f64>();
        let e = 2.0 * (y - t);
        let mut g = vec![0.0; d.param_count()];
        g[d.b2()] = e;
        for h in 0..d.hidden {
            g[d.w2(h)] = e * z[h].max(0.0);
            if z[h] > 0.0 {
                g[d.b1(h)] = e * p[d.w2(h)];
                for i in 0..d.input {
                    g[d.w1(h, i)] = e * p[d.w2(h)] * x[i];
                }
            }
        }
        g
    }

    fn two_pass_variance(grads: &[Vec<f64>]) -> Vec<f64> {
        let n = grads.len() as f64;
        (0..grads[0].len())
            .map(|k| {
                let mean = grads.iter().map(|g| g[k]).sum::<f64>() / n;
                grads.iter().map(|g| (g[k] - mean).powi(2)).sum::<f64>() / n
            })
            .collect()
    }

    fn setup(seed: u64, n: usize) -> (Model, Dataset) {
        let mut rng = rng_from_seed(seed);
        let dims = Dims { input: 3, hidden: 4 };
        let m = Model::new(dims, Normalizer::identity(3), &mut rng);
        let mut d = Dataset::default();
        for _ in 0..n {
            d.push(
                (0..3).map(|_| rng.random_range(0.0..1.0)).collect(),
                rng.random_range(0.0..1.0),
            );
        }
        (m, d)
    }

    #[test]
    fn matches_brute_force_variance() {
        let (m, d) = setup(8, 5);
        let grads: Vec<_> = d.x.iter().zip(&d.y).map(|(x, &t)| sample_grad(&m, x, t)).collect();
        let oracle = two_pass_variance(&grads);
        for (a, b) in fisher_diagonal(&m, &d).iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn single_and_duplicated_samples_have_zero_variance() {
        let (m, d) = setup(9, 1);
        assert!(fisher_diagonal(&m, &d).iter().all(|&f| f == 0.0));
        let dup = d.subset(&[0, 0, 0, 0]);
        assert!(fisher_diagonal(&m, &dup).iter().all(|&f| f.abs() < 1e-15));
    }

    proptest! {
        #[test]
        fn nonnegative(seed in 0u64..1000, n in 1usize..20) {
            let (m, d) = setup(seed, n);
            prop_assert!(fisher_diagonal(&m, &d).iter().all(|&f| f >= 0.0));
        }
    }
}
