//! Shannon and Simpson indices with seeded bootstrap / rarefaction estimates.
//!
//! Replicate `i` draws from a ChaCha8 stream selected by `i` on a generator
//! keyed by the caller's seed, so every replicate is a pure function of
//! `(seed, i)` and the estimate does not depend on how replicates are
//! scheduled across threads.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Hypergeometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{DistributionError, TypeDistribution};
use crate::exec::Execution;

/// Upper bound on bootstrap iterations.
pub const MAX_ITERATIONS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Shannon,
    Simpson,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Shannon => "shannon",
            Metric::Simpson => "simpson",
        }
    }

    /// Index value over raw counts; zero counts are ignored.
    pub fn of_counts(self, counts: &[u64]) -> f64 {
        match self {
            Metric::Shannon => shannon_counts(counts),
            Metric::Simpson => simpson_counts(counts),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How replicates draw their tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resampling {
    /// Without replacement below N, with replacement at N.
    #[default]
    Auto,
    WithoutReplacement,
    WithReplacement,
}

impl Resampling {
    fn with_replacement(self, target_n: u64, total: u64) -> bool {
        match self {
            Resampling::Auto => target_n == total,
            Resampling::WithoutReplacement => false,
            Resampling::WithReplacement => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiversityError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("target_n {target_n} outside 1..={total}")]
    BadTargetN { target_n: u64, total: u64 },
    #[error("iterations {0} outside 1..={MAX_ITERATIONS}")]
    BadIterations(u32),
}

fn nonempty(counts: &[u64]) -> Result<(), DistributionError> {
    if counts.iter().all(|&c| c == 0) {
        Err(DistributionError::EmptyDistribution)
    } else {
        Ok(())
    }
}

pub fn shannon_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let h: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum();
    // a single type gives -0.0
    (-h).max(0.0)
}

pub fn simpson_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let sum_sq: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p
        })
        .sum();
    1.0 - sum_sq
}

/// Shannon entropy in nats.
pub fn shannon(dist: &TypeDistribution) -> Result<f64, DistributionError> {
    let counts = dist.count_vec();
    nonempty(&counts)?;
    Ok(shannon_counts(&counts))
}

/// Plug-in Simpson index, 1 - sum p^2.
pub fn simpson(dist: &TypeDistribution) -> Result<f64, DistributionError> {
    let counts = dist.count_vec();
    nonempty(&counts)?;
    Ok(simpson_counts(&counts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapParams {
    pub metric: Metric,
    pub target_n: u64,
    pub iterations: u32,
    pub seed: u64,
    #[serde(default)]
    pub resampling: Resampling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityEstimate {
    pub metric: Metric,
    pub point: f64,
    pub boot_mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub iterations: u32,
    pub target_n: u64,
    pub seed: u64,
    pub with_replacement: bool,
}

impl DiversityEstimate {
    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

/// Resample `dist` and summarize the metric over replicates.
pub fn bootstrap_diversity(
    dist: &TypeDistribution,
    params: &BootstrapParams,
) -> Result<DiversityEstimate, DiversityError> {
    bootstrap_diversity_with(dist, params, Execution::default())
}

pub fn bootstrap_diversity_with(
    dist: &TypeDistribution,
    params: &BootstrapParams,
    execution: Execution,
) -> Result<DiversityEstimate, DiversityError> {
    let counts = dist.count_vec();
    nonempty(&counts)?;
    let total: u64 = counts.iter().sum();
    if params.target_n == 0 || params.target_n > total {
        return Err(DiversityError::BadTargetN {
            target_n: params.target_n,
            total,
        });
    }
    if params.iterations == 0 || params.iterations > MAX_ITERATIONS {
        return Err(DiversityError::BadIterations(params.iterations));
    }

    let sampler = Sampler::new(&counts, params);
    let replicates = sampler.run(params.iterations, execution);

    let boot_mean = replicates.iter().sum::<f64>() / replicates.len() as f64;
    let mut sorted = replicates;
    sorted.sort_by(f64::total_cmp);
    Ok(DiversityEstimate {
        metric: params.metric,
        point: params.metric.of_counts(&counts),
        boot_mean,
        ci_low: percentile(&sorted, 0.025),
        ci_high: percentile(&sorted, 0.975),
        iterations: params.iterations,
        target_n: params.target_n,
        seed: params.seed,
        with_replacement: sampler.with_replacement,
    })
}

/// Linear interpolation between closest ranks over sorted data.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Smallest N among the given distributions: the common rarefaction size.
pub fn common_target_n<'a>(dists: impl IntoIterator<Item = &'a TypeDistribution>) -> Option<u64> {
    dists.into_iter().map(TypeDistribution::total).min()
}

struct Sampler {
    counts: Vec<u64>,
    total: u64,
    metric: Metric,
    target_n: u64,
    seed: u64,
    with_replacement: bool,
}

impl Sampler {
    fn new(counts: &[u64], params: &BootstrapParams) -> Self {
        let total: u64 = counts.iter().sum();
        Sampler {
            counts: counts.to_vec(),
            total,
            metric: params.metric,
            target_n: params.target_n,
            seed: params.seed,
            with_replacement: params.resampling.with_replacement(params.target_n, total),
        }
    }

    /// Draws the per-label counts of one replicate label by label: a
    /// multinomial as a chain of binomials, or a multivariate hypergeometric
    /// as a chain of hypergeometrics. Cost is O(S), independent of N.
    fn replicate(&self, index: u32, sample: &mut [u64]) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let mut remaining_pool = self.total;
        let mut remaining_draws = self.target_n;
        for (slot, &c) in sample.iter_mut().zip(&self.counts) {
            let x = if remaining_draws == 0 {
                0
            } else if c == remaining_pool {
                remaining_draws
            } else if self.with_replacement {
                let p = c as f64 / remaining_pool as f64;
                Binomial::new(remaining_draws, p)
                    .expect("probability in [0, 1]")
                    .sample(&mut rng)
            } else {
                Hypergeometric::new(remaining_pool, c, remaining_draws)
                    .expect("draws never exceed the pool")
                    .sample(&mut rng)
            };
            *slot = x;
            remaining_pool -= c;
            remaining_draws -= x;
        }
        self.metric.of_counts(sample)
    }

    fn run(&self, iterations: u32, execution: Execution) -> Vec<f64> {
        let scratch = || vec![0u64; self.counts.len()];
        match execution {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..iterations)
                    .into_par_iter()
                    .map_init(scratch, |sample, i| self.replicate(i, sample))
                    .collect()
            }
            _ => {
                let mut sample = scratch();
                (0..iterations)
                    .map(|i| self.replicate(i, &mut sample))
                    .collect()
            }
        }
    }
}
