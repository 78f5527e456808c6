use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{AxisBox, MomentMatrix};
use crate::{parallel, seed};

/// Samples per independently seeded block.
const BLOCK: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSampler {
    pub region: AxisBox,
    pub sample_count: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: MomentMatrix,
    pub stderr: MomentMatrix,
    pub samples: u64,
}

/// Running mean and centered second moment per entry.
#[derive(Clone)]
struct Moments {
    count: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Moments {
            count: 0.0,
            mean: vec![0.0; k],
            m2: vec![0.0; k],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.count += 1.0;
        for (i, &v) in x.iter().enumerate() {
            let d = v - self.mean[i];
            self.mean[i] += d / self.count;
            self.m2[i] += d * (v - self.mean[i]);
        }
    }

    fn merge(&mut self, other: &Moments) {
        let total = self.count + other.count;
        if other.count == 0.0 {
            return;
        }
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * other.count / total;
            self.m2[i] += other.m2[i] + d * d * self.count * other.count / total;
        }
        self.count = total;
    }
}

/// Uniform-sampling estimate of `int_region density(x) x x^t dx` with the
/// per-entry standard error. Blocks of samples are seeded independently
/// and merged in order, so the result does not depend on scheduling.
pub fn moment_monte_carlo<F>(density: F, sampler: &MonteCarloSampler) -> Result<MonteCarloEstimate>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    let region = &sampler.region;
    let n = region.dim();
    if sampler.sample_count < 2 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least two samples".into()));
    }
    let vol = region.volume();
    let blocks: Vec<u64> = (0..sampler.sample_count.div_ceil(BLOCK)).collect();
    let parts = parallel::map(blocks, false, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(&[sampler.seed, b]));
        let count = BLOCK.min(sampler.sample_count - b * BLOCK);
        let mut acc = Moments::new(n * n);
        let mut x = vec![0.0; n];
        let mut g = vec![0.0; n * n];
        for _ in 0..count {
            for k in 0..n {
                x[k] = if region.upper[k] > region.lower[k] {
                    rng.random_range(region.lower[k]..region.upper[k])
                } else {
                    region.lower[k]
                };
            }
            let w = density(&x) * vol;
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = w * x[i] * x[j];
                }
            }
            acc.push(&g);
        }
        acc
    });
    let mut total = Moments::new(n * n);
    for part in &parts {
        total.merge(part);
    }
    let count = total.count;
    let mean = MomentMatrix::from_matrix(nalgebra::DMatrix::from_fn(n, n, |i, j| total.mean[i * n + j]));
    let stderr = MomentMatrix::from_matrix(nalgebra::DMatrix::from_fn(n, n, |i, j| {
        (total.m2[i * n + j] / (count - 1.0) / count).sqrt()
    }));
    Ok(MonteCarloEstimate {
        mean,
        stderr,
        samples: sampler.sample_count,
    })
}
