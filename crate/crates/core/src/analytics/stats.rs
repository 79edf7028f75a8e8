use statrs::distribution::{ContinuousCDF, StudentsT};

use super::AnalyticsError;

pub const MIN_BATCHES: usize = 10;
pub const MIN_PER_BATCH: usize = 10;

/// Batch-means estimate of a steady-state mean with a 95% Student-t
/// confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchMeansResult {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub n_batches: usize,
}

impl BatchMeansResult {
    pub fn covers(&self, value: f64) -> bool {
        (self.mean - value).abs() <= self.ci_halfwidth
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.ci_halfwidth
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci_halfwidth
    }

    /// True when the two intervals do not overlap.
    pub fn separated_from(&self, other: &BatchMeansResult) -> bool {
        self.upper() < other.lower() || other.upper() < self.lower()
    }
}

/// Means of `n_batches` equal contiguous batches of `samples`.
pub fn batch_averages(samples: &[f64], n_batches: usize) -> Result<Vec<f64>, AnalyticsError> {
    if n_batches < MIN_BATCHES {
        return Err(AnalyticsError::TooFewBatches(n_batches));
    }
    let needed = MIN_PER_BATCH * n_batches;
    if samples.len() < needed {
        return Err(AnalyticsError::TooFewSamples {
            needed,
            got: samples.len(),
        });
    }
    // Trailing remainder is dropped so that all batches have equal size.
    let size = samples.len() / n_batches;
    Ok(samples
        .chunks_exact(size)
        .take(n_batches)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect())
}

/// Interval from already computed batch means; needs at least 10 of them.
pub fn summarize_batches(means: &[f64]) -> Result<BatchMeansResult, AnalyticsError> {
    if means.len() < MIN_BATCHES {
        return Err(AnalyticsError::TooFewBatches(means.len()));
    }
    let b = means.len() as f64;
    let mean = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    let t = StudentsT::new(0.0, 1.0, b - 1.0)
        .expect("at least 9 degrees of freedom")
        .inverse_cdf(0.975);
    Ok(BatchMeansResult {
        mean,
        ci_halfwidth: t * (var / b).sqrt(),
        n_batches: means.len(),
    })
}

/// Splits `samples` (in arrival order) into `n_batches` contiguous batches.
pub fn batch_means(samples: &[f64], n_batches: usize) -> Result<BatchMeansResult, AnalyticsError> {
    summarize_batches(&batch_averages(samples, n_batches)?)
}

/// Pools the batch means of independent replications into one interval
/// with `runs * n_batches - 1` degrees of freedom.
pub fn pooled_batch_means<S: AsRef<[f64]>>(runs: &[S], n_batches: usize) -> Result<BatchMeansResult, AnalyticsError> {
    let mut means = Vec::with_capacity(runs.len() * n_batches);
    for run in runs {
        means.extend(batch_averages(run.as_ref(), n_batches)?);
    }
    if means.is_empty() {
        return Err(AnalyticsError::EmptySample);
    }
    summarize_batches(&means)
}

/// Empirical survival function `P(R > x)` of a sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCcdf {
    sorted: Vec<f64>,
}

impl EmpiricalCcdf {
    pub fn new(sample: &[f64]) -> Result<Self, AnalyticsError> {
        if sample.is_empty() {
            return Err(AnalyticsError::EmptySample);
        }
        if sample.iter().any(|x| x.is_nan()) {
            return Err(AnalyticsError::NonFiniteSample);
        }
        let mut sorted = sample.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalCcdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of the sample strictly above `x`.
    pub fn at(&self, x: f64) -> f64 {
        let above = self.sorted.len() - self.sorted.partition_point(|&v| v <= x);
        above as f64 / self.sorted.len() as f64
    }

    /// Nearest-rank quantile.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.sorted.len();
        let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
        self.sorted[rank - 1]
    }

    /// `n_points` log-spaced points from the median to the 99.9th percentile.
    pub fn log_grid(&self, n_points: usize) -> Vec<(f64, f64)> {
        let lo = self.quantile(0.5);
        let hi = self.quantile(0.999);
        if n_points == 0 {
            return Vec::new();
        }
        if n_points == 1 || lo <= 0.0 || lo >= hi {
            return vec![(lo, self.at(lo))];
        }
        let (a, b) = (lo.ln(), hi.ln());
        (0..n_points)
            .map(|i| {
                let x = (a + (b - a) * i as f64 / (n_points - 1) as f64).exp();
                (x, self.at(x))
            })
            .collect()
    }
}

pub fn empirical_ccdf(sample: &[f64], n_points: usize) -> Result<Vec<(f64, f64)>, AnalyticsError> {
    Ok(EmpiricalCcdf::new(sample)?.log_grid(n_points))
}
