//! Closed-form oracles, steady-state statistics and tail estimation for
//! interpreting simulation output.

mod formulas;
mod stability;
mod stats;
mod tail;

use thiserror::Error;

use crate::des::SimError;
use crate::distributions::DistributionError;

pub use formulas::{
    analytic_latency, load_summary, pk_fcfs_latency, ps_critical_lambda, ps_latency, replication_preference,
    AnalyticLatency, LoadSummary, ReplicationPreference, PREFERENCE_TOLERANCE,
};
pub use stability::{
    backlog_slope, classify_lambda, stability_probe, ProbeOptions, ProbePoint, ProbeResult, DEFAULT_BISECTION_STEPS,
    DEFAULT_SLOPE_PER_SERVER,
};
pub use stats::{
    batch_averages, batch_means, empirical_ccdf, pooled_batch_means, summarize_batches, BatchMeansResult,
    EmpiricalCcdf, MIN_BATCHES,
};
pub use tail::{hill_tail_index, TailIndexEstimate, DEFAULT_K_FRACTION, MIN_EXCEEDANCES, MIN_TAIL_SAMPLE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("load rho~ = {rho_tilde} is outside [0, 1): the system is unstable")]
    Unstable { rho_tilde: f64 },
    #[error("E[X_min^2] is infinite (heavy tail): the FCFS mean latency diverges")]
    InfiniteSecondMoment,
    #[error("latency formulas hold only for d = 1 or d = N (got d = {d}, N = {servers})")]
    FormulaRange { d: usize, servers: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("need at least 10 batches, got {0}")]
    TooFewBatches(usize),
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains NaN")]
    NonFiniteSample,
    #[error("Hill estimation needs positive finite samples")]
    NonPositiveSample,
    #[error("k fraction must lie in (0, 0.2], got {0}")]
    BadKFraction(f64),
    #[error("only {0} exceedances; need at least 10")]
    TooFewExceedances(usize),
    #[error("top order statistics are all equal; the Hill sum is zero")]
    DegenerateTail,
    #[error("arrival-rate grid must be positive and strictly increasing")]
    BadGrid,
    #[error("every grid point is stable; extend the grid upwards")]
    GridAllStable,
    #[error("every grid point is unstable; extend the grid downwards")]
    GridAllUnstable,
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}
