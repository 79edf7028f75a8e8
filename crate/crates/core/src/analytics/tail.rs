use super::AnalyticsError;

pub const MIN_TAIL_SAMPLE: usize = 1000;
pub const MIN_EXCEEDANCES: usize = 10;
pub const DEFAULT_K_FRACTION: f64 = 0.05;

/// Estimated decay exponent `nu` of `P(R > x) ~ x^-nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailIndexEstimate {
    pub index: f64,
    pub k_used: usize,
    pub ci_halfwidth: f64,
}

/// Hill estimator over the `k = ceil(k_fraction * n)` largest values:
/// `k / sum_{i<k} ln(x_(i) / x_(k))` with the sample sorted descending.
pub fn hill_tail_index(sample: &[f64], k_fraction: f64) -> Result<TailIndexEstimate, AnalyticsError> {
    let n = sample.len();
    if n < MIN_TAIL_SAMPLE {
        return Err(AnalyticsError::TooFewSamples {
            needed: MIN_TAIL_SAMPLE,
            got: n,
        });
    }
    if !(k_fraction > 0.0 && k_fraction <= 0.2) {
        return Err(AnalyticsError::BadKFraction(k_fraction));
    }
    if sample.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(AnalyticsError::NonPositiveSample);
    }
    let k = (k_fraction * n as f64).ceil() as usize;
    if k < MIN_EXCEEDANCES {
        return Err(AnalyticsError::TooFewExceedances(k));
    }

    let mut sorted = sample.to_vec();
    // Only the top k + 1 order statistics matter.
    sorted.select_nth_unstable_by(k, |a, b| b.total_cmp(a));
    let threshold = sorted[k];
    let log_sum: f64 = sorted[..k].iter().map(|&x| (x / threshold).ln()).sum();
    if log_sum <= 0.0 {
        return Err(AnalyticsError::DegenerateTail);
    }
    let index = k as f64 / log_sum;
    Ok(TailIndexEstimate {
        index,
        k_used: k,
        ci_halfwidth: 1.96 * index / (k as f64).sqrt(),
    })
}
