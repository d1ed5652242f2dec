//! Data-driven construction of ambiguity sets from raw samples and the
//! accuracy (MAPE) experiment for bounds built from estimated parameters.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ambiguity::{range_from_rule, AmbiguitySet, QueueSpec};
use crate::error::{Error, Result};
use crate::simulate::Sampler;
use crate::steady_state::{gg1_cumulant_lower, gg1_cumulant_upper, ContourConfig};

/// A batch of raw observations (e.g. service times).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
}

impl SampleSet {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewSamples(values.len()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::BadParameter(format!("non-finite observation {bad}")));
        }
        Ok(SampleSet { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Reads observations from a text file: one number per line, blank lines
    /// and '#' comment lines skipped. A CSV file is accepted through
    /// [`SampleSet::from_csv`].
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut values = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line.parse().map_err(|e| {
                Error::Io(format!("{} line {}: {e}", path.display(), idx + 1))
            })?;
            values.push(v);
        }
        SampleSet::new(values)
    }

    /// Reads one named column of a headered CSV file.
    pub fn from_csv(path: &Path, column: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut lines = text.lines().enumerate().filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        });
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Io(format!("{}: empty file", path.display())))?;
        let col = header
            .split(',')
            .position(|name| name.trim() == column)
            .ok_or_else(|| {
                Error::Io(format!("{}: no column named {column:?}", path.display()))
            })?;
        let mut values = Vec::new();
        for (idx, line) in lines {
            let cell = line.split(',').nth(col).ok_or_else(|| {
                Error::Io(format!("{} line {}: missing column {col}", path.display(), idx + 1))
            })?;
            let v: f64 = cell.trim().parse().map_err(|e| {
                Error::Io(format!("{} line {}: {e}", path.display(), idx + 1))
            })?;
            values.push(v);
        }
        SampleSet::new(values)
    }
}

/// Point estimates (mu_hat, d_hat, beta_hat) of the ambiguity parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParameterEstimates {
    pub mu_hat: f64,
    pub d_hat: f64,
    pub beta_hat: f64,
}

/// Sample mean, mean absolute deviation about the sample mean, and the
/// fraction of observations at or above the sample mean (ties count as
/// above).
pub fn estimate_parameters(samples: &SampleSet) -> ParameterEstimates {
    let n = samples.len() as f64;
    let mean = samples.values().iter().sum::<f64>() / n;
    let d_hat = samples.values().iter().map(|v| (v - mean).abs()).sum::<f64>() / n;
    let above = samples.values().iter().filter(|v| **v >= mean).count();
    ParameterEstimates { mu_hat: mean, d_hat, beta_hat: above as f64 / n }
}

/// How the support [a, b] is chosen when building a set from data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangeMode {
    /// Sample min/max, widened by 1e-9 (max-min) so boundary observations
    /// stay interior.
    ObservedMinMax,
    /// Mean plus or minus k times the MAD.
    RuleK(f64),
    /// A fixed, externally known range.
    Explicit(f64, f64),
}

/// Builds a validated ambiguity set (with beta) from the sample estimators
/// and the chosen range mode. Infeasible estimates are reported, never
/// clipped.
pub fn build_ambiguity(samples: &SampleSet, mode: RangeMode) -> Result<AmbiguitySet> {
    let est = estimate_parameters(samples);
    let (a, b) = match mode {
        RangeMode::ObservedMinMax => {
            let min = samples.values().iter().cloned().fold(f64::INFINITY, f64::min);
            let max = samples.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let pad = 1e-9 * (max - min);
            (min - pad, max + pad)
        }
        RangeMode::RuleK(k) => range_from_rule(est.mu_hat, est.d_hat, k)?,
        RangeMode::Explicit(a, b) => (a, b),
    };
    AmbiguitySet::with_beta(a, est.mu_hat, b, est.d_hat, est.beta_hat)
}

/// Parameters of the MAPE experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MapeConfig {
    pub sample_sizes: Vec<usize>,
    pub paths: usize,
    pub seed: u64,
    /// Range mode applied to both estimated sets.
    pub range_mode_arrival: RangeMode,
    pub range_mode_service: RangeMode,
    /// Contour settings used for every bound in the experiment.
    pub contour: ContourConfig,
}

impl MapeConfig {
    /// Contour settings loose enough for experiment throughput: the 1e-6
    /// truncation tolerance is orders of magnitude below the statistical
    /// error of any percentage-error estimate.
    pub fn experiment_contour() -> ContourConfig {
        ContourConfig { tail_tol: 1e-6, quad_tol: 1e-7, ..ContourConfig::default() }
    }
}

/// Mean absolute percentage errors of the estimated bounds at one sample
/// size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapeRow {
    pub n: usize,
    pub upper_mape: f64,
    pub lower_mape: f64,
    /// Sample paths that were redrawn because the estimated system was
    /// unstable.
    pub redraws: usize,
}

const MAX_REDRAWS: usize = 1_000;

/// For each sample size, draws `paths` independent (arrivals, services)
/// sample pairs from the true laws, rebuilds both bounds from the estimated
/// ambiguity sets, and reports the mean |relative error| against the bounds
/// of the true sets. Paths whose estimated traffic intensity reaches 1 are
/// redrawn.
pub fn mape_experiment<A: Sampler, V: Sampler>(
    arrival_sampler: &A,
    service_sampler: &V,
    true_spec: &QueueSpec,
    cfg: &MapeConfig,
) -> Result<Vec<MapeRow>> {
    true_spec.require_stable()?;
    let contour = cfg.contour;
    let true_upper = gg1_cumulant_upper(true_spec, 1, &contour)?.value;
    let true_lower = gg1_cumulant_lower(true_spec, 1, &contour)?.value;

    let mut rows = Vec::with_capacity(cfg.sample_sizes.len());
    for (size_idx, &n) in cfg.sample_sizes.iter().enumerate() {
        let per_path: Vec<Result<(f64, f64, usize)>> = (0..cfg.paths)
            .into_par_iter()
            .map(|path| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream((size_idx * cfg.paths + path) as u64 + 1);
                let mut redraws = 0;
                let spec = loop {
                    let arrivals: Vec<f64> =
                        (0..n).map(|_| arrival_sampler.draw(&mut rng)).collect();
                    let services: Vec<f64> =
                        (0..n).map(|_| service_sampler.draw(&mut rng)).collect();
                    let arrival = build_ambiguity(
                        &SampleSet::new(arrivals)?,
                        cfg.range_mode_arrival,
                    )?;
                    let service = build_ambiguity(
                        &SampleSet::new(services)?,
                        cfg.range_mode_service,
                    )?;
                    if service.mu < arrival.mu {
                        break QueueSpec::new(arrival, service)?;
                    }
                    redraws += 1;
                    if redraws > MAX_REDRAWS {
                        return Err(Error::BadParameter(format!(
                            "path {path} unstable after {MAX_REDRAWS} redraws"
                        )));
                    }
                };
                let upper = gg1_cumulant_upper(&spec, 1, &contour)?.value;
                let lower = gg1_cumulant_lower(&spec, 1, &contour)?.value;
                Ok((
                    (upper - true_upper).abs() / true_upper,
                    (lower - true_lower).abs() / true_lower,
                    redraws,
                ))
            })
            .collect();
        let mut upper_sum = 0.0;
        let mut lower_sum = 0.0;
        let mut redraws = 0;
        for r in per_path {
            let (u, l, k) = r?;
            upper_sum += u;
            lower_sum += l;
            redraws += k;
        }
        rows.push(MapeRow {
            n,
            upper_mape: upper_sum / cfg.paths as f64,
            lower_mape: lower_sum / cfg.paths as f64,
            redraws,
        });
    }
    Ok(rows)
}
