//! Monte Carlo estimates of ball moments, sharded for deterministic
//! parallel reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

pub const MIN_SAMPLES: u64 = 10_000;
const SHARD: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// `|estimate - exact| <= k * std_error`.
    pub fn within(&self, exact: f64, k: f64) -> bool {
        (self.estimate - exact).abs() <= k * self.std_error
    }
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.count == 0 {
            return o;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        let mean = self.mean + d * o.count as f64 / count as f64;
        let m2 = self.m2 + o.m2 + d * d * self.count as f64 * o.count as f64 / count as f64;
        Moments { count, mean, m2 }
    }
}

fn ball_volume(n: usize, eps: f64) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    std::f64::consts::PI.powi(n as i32) * eps.powi(2 * n as i32) / fact
}

fn shard(alpha: &MultiIndex, eps: f64, seed: u64, index: u64, len: u64) -> Moments {
    let n = alpha.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut acc = Moments::default();
    let mut g = vec![0.0f64; 2 * n];
    for _ in 0..len {
        // uniform direction on the sphere S^{2n-1}, radius eps U^{1/(2n)}
        let mut norm2 = 0.0;
        for x in g.iter_mut() {
            *x = rng.sample(StandardNormal);
            norm2 += *x * *x;
        }
        let u: f64 = rng.random();
        let r = eps * u.powf(1.0 / (2 * n) as f64);
        let scale2 = r * r / norm2;
        let mut value = 1.0;
        for (j, &a) in alpha.exponents().iter().enumerate() {
            let mod2 = (g[2 * j] * g[2 * j] + g[2 * j + 1] * g[2 * j + 1]) * scale2;
            value *= mod2.powi(a as i32);
        }
        acc.push(value);
    }
    acc
}

/// Estimate of `int_{|w| < eps} |w^alpha|^2` from uniform samples of the
/// ball in `C^n` (`n = alpha.dim()`). Identical for a fixed seed regardless
/// of the thread count.
pub fn mc_moment(alpha: &MultiIndex, eps: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    if alpha.dim() == 0 {
        return Err(Error::EmptyDimension);
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::InvalidRadius(eps));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("{samples} samples < {MIN_SAMPLES}")));
    }
    let shards = samples.div_ceil(SHARD);
    let parts: Vec<Moments> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let len = SHARD.min(samples - i * SHARD);
            shard(alpha, eps, seed, i, len)
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let vol = ball_volume(alpha.dim(), eps);
    let var = total.m2 / (total.count - 1) as f64;
    Ok(McEstimate {
        estimate: vol * total.mean,
        std_error: vol * (var / total.count as f64).sqrt(),
        samples,
    })
}

/// [`mc_moment`] for several indices; each index uses its own seed `seed + position`.
pub fn mc_moment_batch(alphas: &[MultiIndex], eps: f64, samples: u64, seed: u64) -> Result<Vec<McEstimate>> {
    alphas
        .iter()
        .enumerate()
        .map(|(i, a)| mc_moment(a, eps, samples, seed.wrapping_add(i as u64)))
        .collect()
}
