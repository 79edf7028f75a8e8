//! Empirical stability probing.
//!
//! A run is classified unstable when its total unfinished work grows
//! linearly: the least-squares slope of the backlog over the second half of
//! the horizon exceeds a threshold (default `0.01 N`). Work backlog is used
//! rather than queue length because the number of PS jobs under heavy tails
//! fluctuates too much to show a clean drift.

use rayon::prelude::*;

use crate::des::{run_simulation, BacklogSample, SimConfig};

use super::AnalyticsError;

pub const DEFAULT_SLOPE_PER_SERVER: f64 = 0.01;
pub const DEFAULT_BISECTION_STEPS: usize = 4;

/// Least-squares slope of backlog against time for samples at or after
/// `from`.
pub fn backlog_slope(trace: &[BacklogSample], from: f64) -> Option<f64> {
    let points: Vec<_> = trace.iter().filter(|s| s.time >= from).collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mt = points.iter().map(|s| s.time).sum::<f64>() / n;
    let mb = points.iter().map(|s| s.backlog).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for s in points {
        sxy += (s.time - mt) * (s.backlog - mb);
        sxx += (s.time - mt).powi(2);
    }
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    /// Unstable when the backlog slope exceeds this; `None` means `0.01 N`.
    pub slope_threshold: Option<f64>,
    pub bisection_steps: usize,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            slope_threshold: None,
            bisection_steps: DEFAULT_BISECTION_STEPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbePoint {
    pub lambda: f64,
    pub slope: f64,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub lambda_star: f64,
    /// Final bracket: classified stable at `stable_at`, unstable at `unstable_at`.
    pub stable_at: f64,
    pub unstable_at: f64,
    /// Grid points first, then bisection points, in evaluation order.
    pub points: Vec<ProbePoint>,
}

/// Runs `base` at `lambda` and classifies it by backlog drift.
pub fn classify_lambda(base: &SimConfig, lambda: f64, threshold: f64) -> Result<ProbePoint, AnalyticsError> {
    let cfg = base.clone().with_lambda(lambda);
    let out = run_simulation(&cfg)?;
    let slope = backlog_slope(&out.backlog_trace, cfg.horizon / 2.0).unwrap_or(0.0);
    Ok(ProbePoint {
        lambda,
        slope,
        stable: slope <= threshold,
    })
}

/// Brackets the critical arrival rate on `grid`, then bisects.
///
/// The bracket is the smallest unstable grid point and the largest stable
/// point below it, so noisy non-monotone classifications still give a valid
/// bracket.
pub fn stability_probe(base: &SimConfig, grid: &[f64], opts: ProbeOptions) -> Result<ProbeResult, AnalyticsError> {
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|&l| l.is_nan() || l <= 0.0) {
        return Err(AnalyticsError::BadGrid);
    }
    let threshold = opts
        .slope_threshold
        .unwrap_or(DEFAULT_SLOPE_PER_SERVER * base.servers as f64);

    let mut points = grid
        .par_iter()
        .map(|&l| classify_lambda(base, l, threshold))
        .collect::<Result<Vec<_>, _>>()?;

    let first_unstable = points
        .iter()
        .position(|p| !p.stable)
        .ok_or(AnalyticsError::GridAllStable)?;
    let stable_below = points[..first_unstable]
        .iter()
        .rev()
        .find(|p| p.stable)
        .ok_or(AnalyticsError::GridAllUnstable)?;
    let (mut lo, mut hi) = (stable_below.lambda, points[first_unstable].lambda);

    for _ in 0..opts.bisection_steps {
        let mid = 0.5 * (lo + hi);
        let p = classify_lambda(base, mid, threshold)?;
        if p.stable {
            lo = mid;
        } else {
            hi = mid;
        }
        points.push(p);
    }
    Ok(ProbeResult {
        lambda_star: 0.5 * (lo + hi),
        stable_at: lo,
        unstable_at: hi,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::des::Discipline;
    use crate::distributions::JobSizeDistribution;

    #[test]
    fn slope_of_line() {
        let trace: Vec<_> = (0..100)
            .map(|i| BacklogSample {
                time: i as f64,
                backlog: 3.0 + 0.5 * i as f64,
            })
            .collect();
        assert!((backlog_slope(&trace, 50.0).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(backlog_slope(&trace, 99.0), None);
    }

    #[test]
    fn grid_sides_reported() {
        let det = JobSizeDistribution::deterministic(1.0).unwrap();
        let base = SimConfig::new(1, 1.0, 1, Discipline::Fcfs, det).with_horizon(2e3);
        let opts = ProbeOptions {
            bisection_steps: 0,
            ..Default::default()
        };
        assert_eq!(
            stability_probe(&base, &[0.2, 0.4], opts),
            Err(AnalyticsError::GridAllStable)
        );
        assert_eq!(
            stability_probe(&base, &[2.0, 3.0], opts),
            Err(AnalyticsError::GridAllUnstable)
        );
        assert_eq!(stability_probe(&base, &[0.5, 0.4], opts), Err(AnalyticsError::BadGrid));
    }
}
