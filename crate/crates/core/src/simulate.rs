//! Monte-Carlo engine: random-walk maxima and Lindley-recursion waiting
//! times, used to validate bounds by sandwiching and to produce reference
//! values.
//!
//! Replications run on independent ChaCha streams keyed by (seed,
//! replication index), so parallel execution is reproducible; reductions use
//! pairwise summation in fixed index order for bit-stable results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extremal::DiscreteDistribution;

/// Traffic intensity above which steady-state runs stretch their horizon to
/// cover the longer relaxation time.
const HEAVY_TRAFFIC_RHO: f64 = 0.95;

/// Fraction of each steady-state run discarded as warmup.
const WARMUP_FRACTION: f64 = 0.2;

/// Monte-Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    pub replications: usize,
    /// Walk/recursion length per replication; steady-state runs may stretch
    /// it in heavy traffic.
    pub horizon: usize,
    pub seed: u64,
    /// Number of batches for steady-state batch means.
    pub batch_count: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { replications: 10_000, horizon: 10_000, seed: 0x6d61_6421, batch_count: 32 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::BadParameter("replications must be >= 1".into()));
        }
        if self.batch_count < 2 {
            return Err(Error::BadParameter("batch_count must be >= 2".into()));
        }
        Ok(())
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SimEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replications_used: usize,
}

/// Source of i.i.d. draws for the simulator.
pub trait Sampler: Sync {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64;
}

impl Sampler for DiscreteDistribution {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self.sample(rng)
    }
}

impl<F: Fn(&mut ChaCha8Rng) -> f64 + Sync> Sampler for F {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        self(rng)
    }
}

/// Exponential with the given mean (inverse-transform draw).
#[derive(Debug, Clone, Copy)]
pub struct ExpSampler {
    pub mean: f64,
}

impl Sampler for ExpSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        -self.mean * u.ln()
    }
}

/// Uniform on [a, b].
#[derive(Debug, Clone, Copy)]
pub struct UniformSampler {
    pub a: f64,
    pub b: f64,
}

impl Sampler for UniformSampler {
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(self.a..self.b)
    }
}

fn stream_rng(seed: u64, replication: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication as u64 + 1);
    rng
}

/// Pairwise summation in fixed index order.
fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn mean_and_se(samples: &[f64]) -> SimEstimate {
    let n = samples.len();
    let mean = pairwise_sum(samples) / n as f64;
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = if n > 1 { pairwise_sum(&sq) / (n as f64 - 1.0) } else { 0.0 };
    SimEstimate { mean, std_error: (var / n as f64).sqrt(), replications_used: n }
}

/// Estimates E[M_n] = E[max(0, S_1, ..., S_n)] for the walk with i.i.d.
/// increments from `sampler`.
pub fn simulate_max<S: Sampler>(sampler: &S, n: usize, cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    let maxima: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(cfg.seed, rep);
            let mut s = 0.0;
            let mut m = 0.0f64;
            for _ in 0..n {
                s += sampler.draw(&mut rng);
                m = m.max(s);
            }
            m
        })
        .collect();
    Ok(mean_and_se(&maxima))
}

/// Estimates the m-th cumulant of M_n (m in 1..=3) with a grouped standard
/// error: replications are split into `batch_count` groups, the cumulant is
/// computed per group, and the spread across groups gives the error bar.
pub fn simulate_max_cumulant<S: Sampler>(
    sampler: &S,
    n: usize,
    m: u32,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    cfg.validate()?;
    if !(1..=3).contains(&m) {
        return Err(Error::BadParameter(format!("cumulant order {m} not in 1..=3")));
    }
    let maxima: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(cfg.seed, rep);
            let mut s = 0.0;
            let mut peak = 0.0f64;
            for _ in 0..n {
                s += sampler.draw(&mut rng);
                peak = peak.max(s);
            }
            peak
        })
        .collect();
    let groups = cfg.batch_count.min(maxima.len());
    let group_len = maxima.len() / groups;
    let per_group: Vec<f64> = (0..groups)
        .map(|g| sample_cumulant(&maxima[g * group_len..(g + 1) * group_len], m))
        .collect();
    let overall = sample_cumulant(&maxima, m);
    let spread = mean_and_se(&per_group);
    Ok(SimEstimate {
        mean: overall,
        std_error: spread.std_error,
        replications_used: maxima.len(),
    })
}

fn sample_cumulant(xs: &[f64], m: u32) -> f64 {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    match m {
        1 => mean,
        2 => {
            let sq: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
            pairwise_sum(&sq) / (n - 1.0)
        }
        _ => {
            // Third k-statistic: unbiased for the third cumulant.
            let cu: Vec<f64> = xs.iter().map(|x| (x - mean).powi(3)).collect();
            n * pairwise_sum(&cu) / ((n - 1.0) * (n - 2.0))
        }
    }
}

/// Transient Lindley recursion: estimates E[W_n] from independent
/// replications started at W_0 = 0.
pub fn simulate_lindley_transient<A: Sampler, V: Sampler>(
    arrival: &A,
    service: &V,
    n: usize,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    cfg.validate()?;
    let finals: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(cfg.seed, rep);
            let mut w = 0.0f64;
            for _ in 0..n {
                w = (w + service.draw(&mut rng) - arrival.draw(&mut rng)).max(0.0);
            }
            w
        })
        .collect();
    Ok(mean_and_se(&finals))
}

/// Steady-state Lindley recursion via batch means.
///
/// Each replication runs one long trajectory, discards the first 20% as
/// warmup, and contributes `batch_count` batch means; the standard error is
/// taken across all batch means. `rho` (E[V]/E[U]) gates stability and, when
/// at least 0.95, stretches the horizon by 1/(1-rho)^2 to cover the longer
/// relaxation time.
pub fn simulate_lindley_steady<A: Sampler, V: Sampler>(
    arrival: &A,
    service: &V,
    rho: f64,
    cfg: &SimConfig,
) -> Result<SimEstimate> {
    cfg.validate()?;
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }
    let horizon = if rho >= HEAVY_TRAFFIC_RHO {
        let stretch = 1.0 / ((1.0 - rho) * (1.0 - rho));
        ((cfg.horizon as f64) * stretch).min(1e9) as usize
    } else {
        cfg.horizon
    };
    let warmup = ((horizon as f64) * WARMUP_FRACTION) as usize;
    let kept = horizon - warmup;
    let batch_len = (kept / cfg.batch_count).max(1);

    let batch_means: Vec<f64> = (0..cfg.replications)
        .into_par_iter()
        .flat_map_iter(|rep| {
            let mut rng = stream_rng(cfg.seed, rep);
            let mut w = 0.0f64;
            for _ in 0..warmup {
                w = (w + service.draw(&mut rng) - arrival.draw(&mut rng)).max(0.0);
            }
            let mut means = Vec::with_capacity(cfg.batch_count);
            for _ in 0..cfg.batch_count {
                let mut acc = 0.0;
                for _ in 0..batch_len {
                    w = (w + service.draw(&mut rng) - arrival.draw(&mut rng)).max(0.0);
                    acc += w;
                }
                means.push(acc / batch_len as f64);
            }
            means
        })
        .collect();
    Ok(mean_and_se(&batch_means))
}
