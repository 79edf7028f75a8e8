//! Closed-form expected latency for no and full replication, where the
//! redundancy system reduces to an M/G/1 queue with service time `X_min`.

use crate::distributions::{JobSizeDistribution, Moment, ReplicaDependence};

use super::AnalyticsError;

/// Pollaczek-Khinchine mean sojourn time of the FCFS system:
/// `rho E[X_min^2] / (2 (1 - rho) E[X_min]) + E[X_min]`.
pub fn pk_fcfs_latency(rho_tilde: f64, e_min: f64, e_min2: Moment) -> Result<f64, AnalyticsError> {
    check_load(rho_tilde)?;
    let e_min2 = e_min2.finite().ok_or(AnalyticsError::InfiniteSecondMoment)?;
    Ok(rho_tilde * e_min2 / (2.0 * (1.0 - rho_tilde) * e_min) + e_min)
}

/// Mean sojourn time of the PS system: `E[X_min] / (1 - rho)`.
pub fn ps_latency(rho_tilde: f64, e_min: f64) -> Result<f64, AnalyticsError> {
    check_load(rho_tilde)?;
    Ok(e_min / (1.0 - rho_tilde))
}

fn check_load(rho_tilde: f64) -> Result<(), AnalyticsError> {
    if !(0.0..1.0).contains(&rho_tilde) {
        return Err(AnalyticsError::Unstable { rho_tilde });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSummary {
    /// `lambda d E[X_min] / N`.
    pub rho_tilde: f64,
    /// `lambda E[X] / N`.
    pub rho_plain: f64,
    /// PS is stable iff `rho_tilde < 1`.
    pub stable_ps: bool,
}

pub fn load_summary(
    servers: usize,
    lambda: f64,
    d: usize,
    dist: &JobSizeDistribution,
    dep: ReplicaDependence,
) -> Result<LoadSummary, AnalyticsError> {
    let e_min = dist.expected_min(d, dep)?;
    let n = servers as f64;
    let rho_tilde = lambda * d as f64 * e_min / n;
    Ok(LoadSummary {
        rho_tilde,
        rho_plain: lambda * dist.mean() / n,
        stable_ps: rho_tilde < 1.0,
    })
}

/// Largest arrival rate the PS system sustains: `N / (d E[X_min])`.
pub fn ps_critical_lambda(
    servers: usize,
    d: usize,
    dist: &JobSizeDistribution,
    dep: ReplicaDependence,
) -> Result<f64, AnalyticsError> {
    Ok(servers as f64 / (d as f64 * dist.expected_min(d, dep)?))
}

/// Mean latency of both disciplines at `d = 1` or `d = N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticLatency {
    pub load: LoadSummary,
    pub fcfs: f64,
    pub ps: f64,
}

/// Evaluates both latency formulas; rejects `1 < d < N`, where the system is
/// not an M/G/1 queue.
pub fn analytic_latency(
    servers: usize,
    lambda: f64,
    d: usize,
    dist: &JobSizeDistribution,
    dep: ReplicaDependence,
) -> Result<AnalyticLatency, AnalyticsError> {
    if d != 1 && d != servers {
        return Err(AnalyticsError::FormulaRange { d, servers });
    }
    let load = load_summary(servers, lambda, d, dist, dep)?;
    let e_min = dist.expected_min(d, dep)?;
    let e_min2 = dist.second_moment_min(d, dep)?;
    Ok(AnalyticLatency {
        load,
        fcfs: pk_fcfs_latency(load.rho_tilde, e_min, e_min2)?,
        ps: ps_latency(load.rho_tilde, e_min)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReplicationPreference {
    NoReplication,
    FullReplication,
    Indifferent,
}

/// Tolerance on `N E[min(X_1..X_N)] - E[X]` below which neither extreme wins.
pub const PREFERENCE_TOLERANCE: f64 = 1e-9;

/// No replication wins when `N E[min(X_1..X_N)] > E[X]`, full replication
/// when it is smaller; i.i.d. replicas.
pub fn replication_preference(
    dist: &JobSizeDistribution,
    servers: usize,
) -> Result<ReplicationPreference, AnalyticsError> {
    let full = servers as f64 * dist.expected_min(servers, ReplicaDependence::Iid)?;
    let gap = full - dist.mean();
    Ok(if gap.abs() <= PREFERENCE_TOLERANCE {
        ReplicationPreference::Indifferent
    } else if gap > 0.0 {
        ReplicationPreference::NoReplication
    } else {
        ReplicationPreference::FullReplication
    })
}
