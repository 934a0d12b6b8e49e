//! Reproducible sampling of the monic and general Gaussian ensembles, and
//! the empirical estimators built on it.
//!
//! Every trial draws from its own substream keyed by `(seed, trial_index)`,
//! and per-trial results are gathered in trial order before any reduction,
//! so every result here is a pure function of its arguments no matter how
//! many worker threads execute the trials.

pub mod rng;
pub mod stats;

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::EnsembleKind;
use crate::error::{Error, Result};
use crate::polynomial::{is_real, Polynomial, RootFinder, RootSet};

pub use rng::{rng_substream, NormalStream};

/// Maximum `n · trials` accepted by [`root_cloud`].
pub const ROOT_CLOUD_LIMIT: u64 = 10_000_000;
/// Largest degree accepted by [`degree_sweep`].
pub const SWEEP_MAX_DEGREE: usize = 100;
/// Number of histogram bins produced by [`max_modulus_distribution`].
pub const HISTOGRAM_BINS: usize = 64;
/// Upper edge of the histogram, as a quantile of the sample.
pub const HISTOGRAM_QUANTILE: f64 = 0.995;
/// Initial-guess rotations tried by [`run_trial`] before giving up.
const RETRY_OFFSETS: [f64; 3] = [0.4, 1.7, 2.9];

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub ensemble: EnsembleKind,
    pub degree: usize,
    pub trials: usize,
    pub seed: u64,
    /// Strictly increasing radii at which to report empirical probabilities.
    pub c_grid: Vec<f64>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degree < 1 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.c_grid.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("c grid values must be finite".into()));
        }
        if self.c_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("c grid must be strictly increasing".into()));
        }
        Ok(())
    }
}

/// Empirical `P(max|ξ| ≤ c)` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityRow {
    pub c: f64,
    pub probability: f64,
    /// Binomial standard error of `probability`.
    pub se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `HISTOGRAM_BINS + 1` equal-width edges over `[0, q99.5]`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Samples beyond the last edge.
    pub overflow: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalSummary {
    /// Per-trial maximum root moduli, in trial order (failed trials omitted).
    pub samples: Vec<f64>,
    pub rows: Vec<ProbabilityRow>,
    pub mean: f64,
    pub median: f64,
    /// 10%, 20%, …, 90% quantiles.
    pub deciles: Vec<f64>,
    pub trial_failures: usize,
    /// Leading coefficients redrawn because they came out exactly zero.
    pub redraws: u64,
    pub histogram: Option<Histogram>,
}

impl EmpiricalSummary {
    fn from_samples(samples: Vec<f64>, c_grid: &[f64], failures: usize, redraws: u64) -> Self {
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let rows = c_grid
            .iter()
            .map(|&c| {
                let hits = sorted.partition_point(|&s| s <= c);
                let probability = hits as f64 / n as f64;
                let (ci_low, ci_high) = stats::wilson_interval(hits, n, stats::Z_95);
                ProbabilityRow {
                    c,
                    probability,
                    se: stats::proportion_se(probability, n),
                    ci_low,
                    ci_high,
                }
            })
            .collect();
        let (mean, _) = stats::mean_and_se(&samples);
        let (median, deciles) = if n == 0 {
            (f64::NAN, vec![f64::NAN; 9])
        } else {
            (
                stats::quantile_sorted(&sorted, 0.5),
                (1..=9).map(|k| stats::quantile_sorted(&sorted, k as f64 / 10.0)).collect(),
            )
        };
        EmpiricalSummary {
            samples,
            rows,
            mean,
            median,
            deciles,
            trial_failures: failures,
            redraws,
            histogram: None,
        }
    }

    /// Fraction of samples `≤ c`.
    pub fn ecdf(&self, c: f64) -> f64 {
        let mut sorted = self.samples.clone();
        sorted.sort_by(f64::total_cmp);
        stats::ecdf_sorted(&sorted, c)
    }
}

/// Mean maximum modulus and mean Cauchy bound at one degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeSweepRow {
    pub degree: usize,
    pub mean_max_modulus: f64,
    pub se_max_modulus: f64,
    pub mean_cauchy_bound: f64,
    pub se_cauchy_bound: f64,
}

/// Mean number of roots strictly inside and strictly outside the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitDiskEstimate {
    pub degree: usize,
    pub mean_inside: f64,
    pub se_inside: f64,
    pub mean_outside: f64,
    pub se_outside: f64,
    pub trial_failures: usize,
}

/// Draws one polynomial from `ensemble`. Coefficients are drawn in
/// ascending degree order. Returns the polynomial and the number of times an
/// exactly-zero leading coefficient had to be redrawn.
pub fn sample_polynomial(
    ensemble: EnsembleKind,
    n: usize,
    stream: &mut NormalStream,
) -> Result<(Polynomial, u32)> {
    if n < 1 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let mut c: Vec<f64> = (0..n).map(|_| stream.next_normal()).collect();
    let mut redraws = 0;
    let lead = match ensemble {
        EnsembleKind::MonicNormal => 1.0,
        EnsembleKind::GeneralNormal => loop {
            let a = stream.next_normal();
            if a != 0.0 {
                break a;
            }
            redraws += 1;
        },
    };
    c.push(lead);
    Ok((Polynomial::new(c)?, redraws))
}

/// One sampled polynomial with its roots.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub polynomial: Polynomial,
    pub roots: RootSet,
    pub redraws: u32,
}

/// Samples trial `index` of a run and solves for its roots, retrying with
/// rotated initial guesses if the root finder does not converge.
pub fn run_trial(ensemble: EnsembleKind, n: usize, seed: u64, index: u64) -> Result<TrialOutcome> {
    let mut stream = rng_substream(seed, index);
    let (polynomial, redraws) = sample_polynomial(ensemble, n, &mut stream)?;
    let mut last = None;
    for offset in RETRY_OFFSETS {
        let finder = RootFinder {
            angle_offset: offset,
            ..RootFinder::default()
        };
        match finder.solve(&polynomial) {
            Ok(roots) => {
                return Ok(TrialOutcome {
                    polynomial,
                    roots,
                    redraws,
                })
            }
            Err(e @ Error::NoConvergence { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Result of mapping a per-trial function over a run.
struct TrialBatch<T> {
    values: Vec<T>,
    failures: usize,
    redraws: u64,
}

/// Runs `trials` trials in parallel, keeping trial order, and enforces the
/// 0.1% failure-rate limit.
fn map_trials<T, F>(
    ensemble: EnsembleKind,
    n: usize,
    trials: usize,
    seed: u64,
    f: F,
) -> Result<TrialBatch<T>>
where
    T: Send,
    F: Fn(TrialOutcome) -> T + Sync,
{
    let outcomes: Vec<Result<(T, u32)>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(ensemble, n, seed, i).map(|o| {
            let r = o.redraws;
            (f(o), r)
        }))
        .collect();
    let mut values = Vec::with_capacity(trials);
    let mut failures = 0;
    let mut redraws = 0u64;
    for outcome in outcomes {
        match outcome {
            Ok((v, r)) => {
                values.push(v);
                redraws += u64::from(r);
            }
            Err(Error::NoConvergence { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    // more than 0.1% failed
    if failures * 1000 > trials {
        return Err(Error::FailureRate { failures, trials });
    }
    Ok(TrialBatch {
        values,
        failures,
        redraws,
    })
}

/// Empirical probability that all roots lie in `|z| ≤ c`, for each `c` in
/// the configured grid, with Wilson 95% intervals.
pub fn estimate_bound_probability(config: &SimConfig) -> Result<EmpiricalSummary> {
    config.validate()?;
    if config.c_grid.is_empty() {
        return Err(Error::Domain("c grid must not be empty".into()));
    }
    max_modulus_summary(config)
}

fn max_modulus_summary(config: &SimConfig) -> Result<EmpiricalSummary> {
    let batch = map_trials(config.ensemble, config.degree, config.trials, config.seed, |o| {
        o.roots.max_modulus()
    })?;
    Ok(EmpiricalSummary::from_samples(
        batch.values,
        &config.c_grid,
        batch.failures,
        batch.redraws,
    ))
}

/// The full max-modulus sample with deciles and a 64-bin histogram over
/// `[0, q99.5]`. Rows are filled for any radii in `config.c_grid`.
pub fn max_modulus_distribution(config: &SimConfig) -> Result<EmpiricalSummary> {
    config.validate()?;
    if config.trials < 100 {
        return Err(Error::Domain("max-modulus distribution needs at least 100 trials".into()));
    }
    let mut summary = max_modulus_summary(config)?;
    let mut sorted = summary.samples.clone();
    sorted.sort_by(f64::total_cmp);
    let top = stats::quantile_sorted(&sorted, HISTOGRAM_QUANTILE);
    let width = top / HISTOGRAM_BINS as f64;
    let edges: Vec<f64> = (0..=HISTOGRAM_BINS).map(|k| k as f64 * width).collect();
    let mut counts = vec![0u64; HISTOGRAM_BINS];
    let mut overflow = 0;
    for &s in &sorted {
        if s > top {
            overflow += 1;
        } else {
            let bin = if width > 0.0 {
                ((s / width) as usize).min(HISTOGRAM_BINS - 1)
            } else {
                0
            };
            counts[bin] += 1;
        }
    }
    summary.histogram = Some(Histogram {
        edges,
        counts,
        overflow,
    });
    Ok(summary)
}

/// All roots of `trials` general-ensemble draws of degree `n`, in trial order.
pub fn root_cloud(n: usize, trials: usize, seed: u64) -> Result<Vec<Complex64>> {
    let requested = n as u64 * trials as u64;
    if requested > ROOT_CLOUD_LIMIT {
        return Err(Error::MemoryGuard {
            requested,
            limit: ROOT_CLOUD_LIMIT,
        });
    }
    if n < 1 || trials < 1 {
        return Err(Error::Domain("degree and trials must be at least 1".into()));
    }
    let batch = map_trials(EnsembleKind::GeneralNormal, n, trials, seed, |o| o.roots.into_roots())?;
    Ok(batch.values.into_iter().flatten().collect())
}

/// Mean maximum root modulus and mean Cauchy bound of the general
/// ensemble, per degree.
pub fn degree_sweep(
    degrees: RangeInclusive<usize>,
    trials: usize,
    seed: u64,
) -> Result<Vec<DegreeSweepRow>> {
    if *degrees.start() < 1 || *degrees.end() > SWEEP_MAX_DEGREE || degrees.is_empty() {
        return Err(Error::Domain(format!(
            "degree range must be a non-empty subrange of 1..={SWEEP_MAX_DEGREE}"
        )));
    }
    if trials < 1 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    degrees
        .map(|degree| {
            let batch = map_trials(EnsembleKind::GeneralNormal, degree, trials, seed, |o| {
                (o.roots.max_modulus(), o.polynomial.cauchy_bound_general())
            })?;
            let (moduli, cauchy): (Vec<f64>, Vec<f64>) = batch.values.into_iter().unzip();
            let (mean_max_modulus, se_max_modulus) = stats::mean_and_se(&moduli);
            let (mean_cauchy_bound, se_cauchy_bound) = stats::mean_and_se(&cauchy);
            Ok(DegreeSweepRow {
                degree,
                mean_max_modulus,
                se_max_modulus,
                mean_cauchy_bound,
                se_cauchy_bound,
            })
        })
        .collect()
}

/// Mean number of roots inside (and outside) the unit circle for the
/// general ensemble.
pub fn unit_disk_count(n: usize, trials: usize, seed: u64) -> Result<UnitDiskEstimate> {
    if n < 1 || trials < 1 {
        return Err(Error::Domain("degree and trials must be at least 1".into()));
    }
    let batch = map_trials(EnsembleKind::GeneralNormal, n, trials, seed, |o| {
        let (inside, outside) = o.roots.unit_disk_split();
        (inside as f64, outside as f64)
    })?;
    let (inside, outside): (Vec<f64>, Vec<f64>) = batch.values.into_iter().unzip();
    let (mean_inside, se_inside) = stats::mean_and_se(&inside);
    let (mean_outside, se_outside) = stats::mean_and_se(&outside);
    Ok(UnitDiskEstimate {
        degree: n,
        mean_inside,
        se_inside,
        mean_outside,
        se_outside,
        trial_failures: batch.failures,
    })
}

/// Per-trial real-root counts for the general ensemble, with the number of
/// failed trials.
pub(crate) fn real_root_counts(n: usize, trials: usize, seed: u64) -> Result<(Vec<usize>, usize)> {
    let batch = map_trials(EnsembleKind::GeneralNormal, n, trials, seed, |o| {
        o.roots.roots().iter().filter(|r| is_real(**r)).count()
    })?;
    Ok((batch.values, batch.failures))
}
