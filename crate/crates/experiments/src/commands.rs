use std::path::{Path, PathBuf};

use rayon::prelude::*;
use redsim_core::analytics::{
    analytic_latency, backlog_slope, batch_averages, hill_tail_index, load_summary, ps_critical_lambda,
    replication_preference, stability_probe, summarize_batches, AnalyticsError, BatchMeansResult, ProbeOptions,
    TailIndexEstimate, DEFAULT_SLOPE_PER_SERVER,
};
use redsim_core::{run_simulation, Discipline, JobSizeDistribution, ReplicaDependence, SimOutput};

use crate::config::ExperimentSpec;
use crate::error::{config, infeasible, ExperimentError};
use crate::table::{Cell, Table};

/// CSV files to write plus lines for the terminal.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<(String, Table)>,
    pub messages: Vec<String>,
}

impl Report {
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (name, table) in &self.files {
            let path = dir.join(name);
            table.write_to(&path)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn discipline_name(d: Discipline) -> &'static str {
    match d {
        Discipline::Fcfs => "fcfs",
        Discipline::Ps => "ps",
    }
}

// ---------------------------------------------------------------- analytic

pub fn cmd_analytic(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    let (n, d) = (spec.servers, spec.d);
    if d != 1 && d != n {
        return Err(ExperimentError::Config(format!(
            "the latency formulas are exact only without replication (d = 1) or with full replication (d = N); got d = {d}, N = {n}"
        )));
    }
    let header = || std::iter::once("lambda".to_string()).chain(spec.distributions.iter().map(|l| l.label.clone()));
    let mut fcfs = Table::new(header());
    let mut ps = Table::new(header());
    let mut any = false;
    for &lambda in &spec.lambda_grid {
        let mut row_f = vec![Cell::from(lambda)];
        let mut row_p = vec![Cell::from(lambda)];
        for ld in &spec.distributions {
            match analytic_latency(n, lambda, d, &ld.dist, spec.dependence) {
                Ok(a) => {
                    any = true;
                    row_f.push(a.fcfs.into());
                    row_p.push(a.ps.into());
                }
                // PS can be finite while FCFS diverges on an infinite second moment.
                Err(AnalyticsError::InfiniteSecondMoment) => {
                    let load = load_summary(n, lambda, d, &ld.dist, spec.dependence).map_err(config)?;
                    let e_min = ld.dist.expected_min(d, spec.dependence).map_err(config)?;
                    let p = redsim_core::analytics::ps_latency(load.rho_tilde, e_min).ok();
                    any |= p.is_some();
                    row_f.push(Cell::Empty);
                    row_p.push(p.into());
                }
                Err(AnalyticsError::Unstable { .. }) => {
                    row_f.push(Cell::Empty);
                    row_p.push(Cell::Empty);
                }
                Err(e) => return Err(config(e)),
            }
        }
        fcfs.push(row_f);
        ps.push(row_p);
    }
    if !any {
        return Err(ExperimentError::Infeasible(
            "every grid point has rho~ >= 1; no latency is finite".into(),
        ));
    }
    let mut messages = Vec::new();
    for ld in &spec.distributions {
        let verdict = replication_preference(&ld.dist, n).map_err(config)?;
        messages.push(format!("replication preference {} (N = {n}): {verdict:?}", ld.label));
    }
    Ok(Report {
        files: vec![("analytic_fcfs.csv".into(), fcfs), ("analytic_ps.csv".into(), ps)],
        messages,
    })
}

// ---------------------------------------------------------------- simulate

/// One run with the base configuration and the single distribution.
pub fn simulate(spec: &ExperimentSpec) -> Result<SimOutput, ExperimentError> {
    if spec.distributions.len() != 1 {
        return Err(ExperimentError::Config(format!(
            "simulate takes exactly one distribution, got {}",
            spec.distributions.len()
        )));
    }
    let cfg = spec.sim_config(spec.lambda, spec.d, spec.discipline, spec.distributions[0].dist, 0);
    run_simulation(&cfg).map_err(config)
}

pub fn cmd_simulate(spec: &ExperimentSpec) -> Result<(Vec<u8>, Vec<String>), ExperimentError> {
    let out = simulate(spec)?;
    let mut csv = Vec::new();
    out.write_csv(&mut csv)?;
    let mut messages = vec![format!(
        "{} jobs arrived, {} recorded after warm-up",
        out.jobs_observed,
        out.latencies.len()
    )];
    if let Ok(r) = redsim_core::analytics::batch_means(&out.latency_values(), spec.batches) {
        messages.push(format!("mean latency {} +/- {}", r.mean, r.ci_halfwidth));
    }
    Ok((csv, messages))
}

// ---------------------------------------------------------------- sweeps

/// Estimated mean latency per grid point and distribution, for both
/// disciplines. `None` marks an unstable configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub labels: Vec<String>,
    pub fcfs: Vec<Vec<Option<BatchMeansResult>>>,
    pub ps: Vec<Vec<Option<BatchMeansResult>>>,
}

impl SweepResult {
    pub fn cell(&self, discipline: Discipline, point: usize, dist: usize) -> Option<BatchMeansResult> {
        match discipline {
            Discipline::Fcfs => self.fcfs[point][dist],
            Discipline::Ps => self.ps[point][dist],
        }
    }

    /// `{prefix}_fcfs.csv`, `{prefix}_fcfs_ci.csv`, `{prefix}_ps.csv`, `{prefix}_ps_ci.csv`.
    pub fn tables(&self, prefix: &str) -> Vec<(String, Table)> {
        let mut files = Vec::new();
        for (name, cells) in [("fcfs", &self.fcfs), ("ps", &self.ps)] {
            let mut mean = Table::new(std::iter::once(self.axis_name.clone()).chain(self.labels.iter().cloned()));
            let mut ci = Table::new(
                std::iter::once(self.axis_name.clone()).chain(self.labels.iter().map(|l| format!("{l}_ci"))),
            );
            for (x, row) in self.axis.iter().zip(cells) {
                mean.push(
                    std::iter::once(Cell::from(*x))
                        .chain(row.iter().map(|c| c.map(|r| r.mean).into()))
                        .collect(),
                );
                ci.push(
                    std::iter::once(Cell::from(*x))
                        .chain(row.iter().map(|c| c.map(|r| r.ci_halfwidth).into()))
                        .collect(),
                );
            }
            files.push((format!("{prefix}_{name}.csv"), mean));
            files.push((format!("{prefix}_{name}_ci.csv"), ci));
        }
        files
    }

    fn empty_cells(&self) -> usize {
        self.fcfs
            .iter()
            .chain(&self.ps)
            .flatten()
            .filter(|c| c.is_none())
            .count()
    }
}

#[derive(Debug, Clone, Copy)]
struct Task {
    point: usize,
    dist: usize,
    discipline: Discipline,
    rep: usize,
}

struct RunSummary {
    batch_means: Vec<f64>,
    slope: f64,
}

/// Cells whose pooled CI half-width exceeds this fraction of the mean are
/// treated as not converged (typically a critically loaded system).
pub const MAX_RELATIVE_HALFWIDTH: f64 = 0.1;

/// Runs every `(lambda, d)` point for every distribution and both
/// disciplines, `replications` seeds each, on the rayon pool. PS points with
/// `rho~ >= 1` are skipped; FCFS points whose backlog drifts upwards (mean
/// slope above `0.01 N`) and non-converged cells are reported empty.
pub fn run_sweep(
    spec: &ExperimentSpec,
    axis_name: &str,
    points: &[(f64, usize)],
) -> Result<SweepResult, ExperimentError> {
    let mut tasks = Vec::new();
    let mut ps_stable = vec![vec![false; spec.distributions.len()]; points.len()];
    for (pi, &(lambda, d)) in points.iter().enumerate() {
        for (di, ld) in spec.distributions.iter().enumerate() {
            let load = load_summary(spec.servers, lambda, d, &ld.dist, spec.dependence).map_err(config)?;
            ps_stable[pi][di] = load.stable_ps;
            for discipline in [Discipline::Fcfs, Discipline::Ps] {
                if discipline == Discipline::Ps && !load.stable_ps {
                    continue;
                }
                for rep in 0..spec.replications {
                    tasks.push(Task {
                        point: pi,
                        dist: di,
                        discipline,
                        rep,
                    });
                }
            }
        }
    }

    let summaries = tasks
        .par_iter()
        .map(|t| {
            let (lambda, d) = points[t.point];
            let cfg = spec.sim_config(lambda, d, t.discipline, spec.distributions[t.dist].dist, t.rep);
            let out = run_simulation(&cfg).map_err(config)?;
            let slope = backlog_slope(&out.backlog_trace, cfg.horizon / 2.0).unwrap_or(0.0);
            let batch_means = batch_averages(&out.latency_values(), spec.batches).map_err(|e| {
                ExperimentError::Infeasible(format!(
                    "{axis_name} = {}: {e}; increase the horizon",
                    points[t.point].0
                ))
            })?;
            Ok(RunSummary { batch_means, slope })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let threshold = DEFAULT_SLOPE_PER_SERVER * spec.servers as f64;
    let mut fcfs = vec![vec![None; spec.distributions.len()]; points.len()];
    let mut ps = fcfs.clone();
    // Tasks were generated grouped by (point, dist, discipline) in order.
    let mut i = 0;
    while i < tasks.len() {
        let t = tasks[i];
        let group = &summaries[i..i + spec.replications];
        i += spec.replications;
        let mean_slope = group.iter().map(|s| s.slope).sum::<f64>() / group.len() as f64;
        let cell = match t.discipline {
            Discipline::Fcfs if mean_slope > threshold => None,
            Discipline::Ps if !ps_stable[t.point][t.dist] => None,
            _ => {
                let pooled: Vec<f64> = group.iter().flat_map(|s| s.batch_means.iter().copied()).collect();
                let r = summarize_batches(&pooled).map_err(infeasible)?;
                (r.ci_halfwidth <= MAX_RELATIVE_HALFWIDTH * r.mean).then_some(r)
            }
        };
        match t.discipline {
            Discipline::Fcfs => fcfs[t.point][t.dist] = cell,
            Discipline::Ps => ps[t.point][t.dist] = cell,
        }
    }
    let result = SweepResult {
        axis_name: axis_name.to_string(),
        axis: points
            .iter()
            .map(|&(l, d)| if axis_name == "d" { d as f64 } else { l })
            .collect(),
        labels: spec.distributions.iter().map(|l| l.label.clone()).collect(),
        fcfs,
        ps,
    };
    if result.empty_cells() == 2 * points.len() * spec.distributions.len() {
        return Err(ExperimentError::Infeasible(
            "every configuration on the grid is unstable".into(),
        ));
    }
    Ok(result)
}

pub fn figure1_left(spec: &ExperimentSpec) -> Result<SweepResult, ExperimentError> {
    let points: Vec<_> = spec.lambda_grid.iter().map(|&l| (l, spec.d)).collect();
    run_sweep(spec, "lambda", &points)
}

pub fn figure1_right(spec: &ExperimentSpec) -> Result<SweepResult, ExperimentError> {
    let points: Vec<_> = spec.d_grid.iter().map(|&d| (spec.lambda, d)).collect();
    run_sweep(spec, "d", &points)
}

fn sweep_report(sweep: SweepResult, prefix: &str) -> Report {
    let empty = sweep.empty_cells();
    let mut messages = Vec::new();
    if empty > 0 {
        messages.push(format!("{empty} unstable cell(s) left empty"));
    }
    Report {
        files: sweep.tables(prefix),
        messages,
    }
}

pub fn cmd_figure1_left(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    Ok(sweep_report(figure1_left(spec)?, "figure1_left"))
}

pub fn cmd_figure1_right(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    Ok(sweep_report(figure1_right(spec)?, "figure1_right"))
}

// ---------------------------------------------------------------- stability

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRow {
    pub discipline: Discipline,
    pub label: String,
    pub d: usize,
    /// `None` when the grid did not bracket the threshold.
    pub lambda_star: Option<f64>,
    /// `N / (d E[X_min])`; known in closed form for PS only.
    pub analytic: Option<f64>,
}

impl StabilityRow {
    pub fn relative_gap(&self) -> Option<f64> {
        Some((self.lambda_star? - self.analytic?) / self.analytic?)
    }
}

/// Default probe grid: `N/8, 2N/8, ..., 2N`.
pub fn default_probe_grid(servers: usize) -> Vec<f64> {
    (1..=16).map(|i| servers as f64 * 0.125 * i as f64).collect()
}

pub fn stability_scan(spec: &ExperimentSpec) -> Result<Vec<StabilityRow>, ExperimentError> {
    let grid = if spec.lambda_grid.is_empty() {
        default_probe_grid(spec.servers)
    } else {
        spec.lambda_grid.clone()
    };
    let opts = ProbeOptions {
        slope_threshold: None,
        bisection_steps: spec.bisection_steps,
    };
    let mut combos = Vec::new();
    for ld in &spec.distributions {
        for &d in &spec.d_grid {
            for discipline in [Discipline::Fcfs, Discipline::Ps] {
                combos.push((ld, d, discipline));
            }
        }
    }
    let rows = combos
        .par_iter()
        .map(|&(ld, d, discipline)| {
            let base = spec.sim_config(grid[0], d, discipline, ld.dist, 0);
            let lambda_star = match stability_probe(&base, &grid, opts) {
                Ok(r) => Some(r.lambda_star),
                Err(AnalyticsError::GridAllStable | AnalyticsError::GridAllUnstable) => None,
                Err(e) => return Err(config(e)),
            };
            let analytic = match discipline {
                Discipline::Ps => Some(ps_critical_lambda(spec.servers, d, &ld.dist, spec.dependence).map_err(config)?),
                Discipline::Fcfs => None,
            };
            Ok(StabilityRow {
                discipline,
                label: ld.label.clone(),
                d,
                lambda_star,
                analytic,
            })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    if rows.iter().all(|r| r.lambda_star.is_none()) {
        return Err(ExperimentError::Infeasible(
            "the probe grid never brackets the stability threshold".into(),
        ));
    }
    Ok(rows)
}

pub fn cmd_stability_scan(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    let rows = stability_scan(spec)?;
    let mut table = Table::new([
        "discipline",
        "distribution",
        "d",
        "lambda_star",
        "analytic_lambda_star",
        "relative_gap",
    ]);
    let mut messages = Vec::new();
    for r in &rows {
        table.push(vec![
            discipline_name(r.discipline).into(),
            r.label.as_str().into(),
            r.d.into(),
            r.lambda_star.into(),
            r.analytic.into(),
            r.relative_gap().into(),
        ]);
        if r.lambda_star.is_none() {
            messages.push(format!(
                "{} {} d={}: grid did not bracket the threshold",
                discipline_name(r.discipline),
                r.label,
                r.d
            ));
        }
    }
    // FCFS and PS rows come in adjacent pairs.
    for pair in rows.chunks(2) {
        if let [f, p] = pair {
            if let (Some(lf), Some(lp)) = (f.lambda_star, p.lambda_star) {
                let verdict = if lf >= lp { "yes" } else { "no" };
                messages.push(format!(
                    "{} d={}: FCFS lambda* {lf} vs PS lambda* {lp}; FCFS >= PS: {verdict}",
                    f.label, f.d
                ));
            }
        }
    }
    Ok(Report {
        files: vec![("stability_scan.csv".into(), table)],
        messages,
    })
}

// ---------------------------------------------------------------- tails

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub label: String,
    pub discipline: Discipline,
    pub estimate: TailIndexEstimate,
    /// `d nu` (or `nu` for identical replicas) under PS, one less under FCFS.
    pub predicted: f64,
    pub samples: usize,
}

pub fn tail_scan(spec: &ExperimentSpec) -> Result<Vec<TailRow>, ExperimentError> {
    let mut rows = Vec::new();
    for ld in &spec.distributions {
        let JobSizeDistribution::Pareto { index, .. } = ld.dist else {
            return Err(ExperimentError::Config(format!(
                "tail scan needs a power-law tail; '{}' is {} (light-tailed, Hill estimation does not apply)",
                ld.label,
                ld.dist.family()
            )));
        };
        let load = load_summary(spec.servers, spec.lambda, spec.d, &ld.dist, spec.dependence).map_err(config)?;
        if !load.stable_ps {
            return Err(ExperimentError::Infeasible(format!(
                "'{}' at lambda = {}: rho~ = {} >= 1",
                ld.label, spec.lambda, load.rho_tilde
            )));
        }
        let nu_min = match spec.dependence {
            ReplicaDependence::Iid => spec.d as f64 * index,
            ReplicaDependence::Identical => index,
        };
        let runs: Vec<(Discipline, usize)> = [Discipline::Fcfs, Discipline::Ps]
            .into_iter()
            .flat_map(|disc| (0..spec.replications).map(move |r| (disc, r)))
            .collect();
        let outputs = runs
            .par_iter()
            .map(|&(disc, rep)| {
                let cfg = spec.sim_config(spec.lambda, spec.d, disc, ld.dist, rep);
                run_simulation(&cfg).map(|o| o.latency_values()).map_err(config)
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (disc, chunk) in [Discipline::Fcfs, Discipline::Ps]
            .into_iter()
            .zip(outputs.chunks(spec.replications))
        {
            let pooled: Vec<f64> = chunk.concat();
            let estimate = hill_tail_index(&pooled, spec.k_fraction).map_err(infeasible)?;
            rows.push(TailRow {
                label: ld.label.clone(),
                discipline: disc,
                estimate,
                predicted: if disc == Discipline::Ps { nu_min } else { nu_min - 1.0 },
                samples: pooled.len(),
            });
        }
    }
    Ok(rows)
}

pub fn cmd_tail_scan(spec: &ExperimentSpec) -> Result<Report, ExperimentError> {
    let rows = tail_scan(spec)?;
    let mut table = Table::new([
        "distribution",
        "discipline",
        "index",
        "ci_halfwidth",
        "k_used",
        "samples",
        "predicted_index",
    ]);
    let mut messages = Vec::new();
    for r in &rows {
        table.push(vec![
            r.label.as_str().into(),
            discipline_name(r.discipline).into(),
            r.estimate.index.into(),
            r.estimate.ci_halfwidth.into(),
            r.estimate.k_used.into(),
            r.samples.into(),
            r.predicted.into(),
        ]);
    }
    for pair in rows.chunks(2) {
        if let [f, p] = pair {
            messages.push(format!(
                "{}: PS index {} - FCFS index {} = {}",
                f.label,
                p.estimate.index,
                f.estimate.index,
                p.estimate.index - f.estimate.index
            ));
        }
    }
    Ok(Report {
        files: vec![("tail_scan.csv".into(), table)],
        messages,
    })
}
