//! Experiment configuration: built-in defaults per scenario, an optional
//! TOML file, then command-line overrides, in that order of precedence.
//!
//! ```toml
//! [scenario]
//! servers = 3
//! d = 2
//! lambda_grid = [0.5, 1.0, 1.5]
//! horizon = 2e5
//! replications = 5
//!
//! [[distribution]]
//! label = "WeibullNBU"
//! kind = "weibull"
//! shape = 1.2
//! unit_mean = true
//! ```

use std::path::{Path, PathBuf};

use redsim_core::{Discipline, JobSizeDistribution, ReplicaDependence, SimConfig};
use serde::Deserialize;

use crate::error::{config, ExperimentError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Analytic,
    Single,
    Figure1Left,
    Figure1Right,
    StabilityScan,
    TailScan,
}

/// `[scenario]` table. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub servers: Option<usize>,
    pub lambda: Option<f64>,
    pub d: Option<usize>,
    pub discipline: Option<String>,
    pub dependence: Option<String>,
    pub horizon: Option<f64>,
    pub warmup: Option<f64>,
    pub seed: Option<u64>,
    pub replications: Option<usize>,
    pub lambda_grid: Option<Vec<f64>>,
    pub d_grid: Option<Vec<usize>>,
    pub batches: Option<usize>,
    pub k_fraction: Option<f64>,
    pub bisection_steps: Option<usize>,
    pub out: Option<PathBuf>,
}

/// One `[[distribution]]` entry. Parameters not used by `kind` are rejected.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSection {
    pub label: Option<String>,
    pub kind: String,
    pub rate: Option<f64>,
    pub shape: Option<f64>,
    pub scale: Option<f64>,
    pub index: Option<f64>,
    pub min: Option<f64>,
    pub value: Option<f64>,
    #[serde(default)]
    pub unit_mean: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub distribution: Vec<DistributionSection>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(config)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

impl DistributionSection {
    pub fn build(&self) -> Result<LabeledDistribution, ExperimentError> {
        let allowed: &[&str] = match self.kind.as_str() {
            "exponential" | "exp" => &["rate"],
            "weibull" => &["shape", "scale"],
            "pareto" => &["index", "min"],
            "deterministic" | "det" => &["value"],
            other => {
                return Err(ExperimentError::Config(format!(
                    "unknown distribution kind '{other}' (expected exponential, weibull, pareto or deterministic)"
                )))
            }
        };
        let given = [
            ("rate", self.rate),
            ("shape", self.shape),
            ("scale", self.scale),
            ("index", self.index),
            ("min", self.min),
            ("value", self.value),
        ];
        for (name, v) in given {
            if v.is_some() && !allowed.contains(&name) {
                return Err(ExperimentError::Config(format!(
                    "parameter '{name}' does not apply to kind '{}'",
                    self.kind
                )));
            }
        }
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| ExperimentError::Config(format!("kind '{}' needs '{name}'", self.kind)))
        };
        let dist = match allowed[0] {
            "rate" => JobSizeDistribution::exponential(self.rate.unwrap_or(1.0)),
            "shape" => JobSizeDistribution::weibull(need("shape", self.shape)?, self.scale.unwrap_or(1.0)),
            "index" => JobSizeDistribution::pareto(need("index", self.index)?, self.min.unwrap_or(1.0)),
            _ => JobSizeDistribution::deterministic(self.value.unwrap_or(1.0)),
        }
        .map_err(config)?;
        let dist = if self.unit_mean {
            dist.normalize_to_unit_mean()
        } else {
            dist
        };
        let label = self.label.clone().unwrap_or_else(|| default_label(&dist));
        Ok(LabeledDistribution { label, dist })
    }

    /// Parses the command-line form `[label=]kind[:key=value,...]`, e.g.
    /// `NBU=weibull:shape=1.2,unit_mean=true`.
    pub fn parse_flag(s: &str) -> Result<Self, ExperimentError> {
        let (head, params) = s.split_once(':').unwrap_or((s, ""));
        let (label, kind) = match head.split_once('=') {
            Some((l, k)) => (Some(l.trim().to_string()), k.trim()),
            None => (None, head.trim()),
        };
        let mut sec = DistributionSection {
            label,
            kind: kind.to_string(),
            ..Default::default()
        };
        for kv in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| ExperimentError::Config(format!("expected key=value in '{kv}'")))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "unit_mean" {
                sec.unit_mean = v
                    .parse()
                    .map_err(|_| ExperimentError::Config(format!("unit_mean must be true or false, got '{v}'")))?;
                continue;
            }
            let x: f64 = v
                .parse()
                .map_err(|_| ExperimentError::Config(format!("'{k}' must be a number, got '{v}'")))?;
            let slot = match k {
                "rate" => &mut sec.rate,
                "shape" => &mut sec.shape,
                "scale" => &mut sec.scale,
                "index" => &mut sec.index,
                "min" => &mut sec.min,
                "value" => &mut sec.value,
                _ => return Err(ExperimentError::Config(format!("unknown distribution key '{k}'"))),
            };
            *slot = Some(x);
        }
        Ok(sec)
    }
}

fn default_label(dist: &JobSizeDistribution) -> String {
    match *dist {
        JobSizeDistribution::Exponential { .. } => "Exp".into(),
        JobSizeDistribution::Weibull { shape, .. } => format!("Weibull_{shape}"),
        JobSizeDistribution::Pareto { index, .. } => format!("Pareto_{index}"),
        JobSizeDistribution::Deterministic { .. } => "Det".into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDistribution {
    pub label: String,
    pub dist: JobSizeDistribution,
}

/// Values supplied on the command line; they win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub replications: Option<usize>,
    pub horizon: Option<f64>,
    pub warmup: Option<f64>,
    pub full: bool,
    pub servers: Option<usize>,
    pub lambda: Option<f64>,
    pub d: Option<usize>,
    pub discipline: Option<String>,
    pub dependence: Option<String>,
    pub distributions: Vec<String>,
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub servers: usize,
    pub lambda: f64,
    pub d: usize,
    pub discipline: Discipline,
    pub dependence: ReplicaDependence,
    pub distributions: Vec<LabeledDistribution>,
    pub horizon: f64,
    pub warmup: f64,
    pub seed: u64,
    pub replications: usize,
    pub lambda_grid: Vec<f64>,
    pub d_grid: Vec<usize>,
    pub batches: usize,
    pub k_fraction: f64,
    pub bisection_steps: usize,
    pub out: PathBuf,
    pub full: bool,
}

fn unit_mean_weibull(shape: f64) -> JobSizeDistribution {
    JobSizeDistribution::weibull(shape, 1.0)
        .expect("valid shape")
        .normalize_to_unit_mean()
}

fn figure_distributions(labels: [&str; 3]) -> Vec<LabeledDistribution> {
    let dists = [
        unit_mean_weibull(1.2),
        JobSizeDistribution::exponential(1.0).unwrap(),
        unit_mean_weibull(0.8),
    ];
    labels
        .into_iter()
        .zip(dists)
        .map(|(l, dist)| LabeledDistribution { label: l.into(), dist })
        .collect()
}

fn step_grid(step: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|i| step * i as f64).collect()
}

impl ExperimentSpec {
    /// Built-in defaults for a scenario.
    pub fn defaults(scenario: Scenario) -> Self {
        let mut spec = ExperimentSpec {
            scenario,
            servers: 1,
            lambda: 0.5,
            d: 1,
            discipline: Discipline::Fcfs,
            dependence: ReplicaDependence::Iid,
            distributions: figure_distributions(["WeibullNBU", "Exp", "WeibullNWU"]),
            horizon: 2e5,
            warmup: 2e4,
            seed: 1,
            replications: 5,
            lambda_grid: Vec::new(),
            d_grid: Vec::new(),
            batches: 20,
            k_fraction: redsim_core::analytics::DEFAULT_K_FRACTION,
            bisection_steps: redsim_core::analytics::DEFAULT_BISECTION_STEPS,
            out: PathBuf::from("."),
            full: false,
        };
        match scenario {
            Scenario::Analytic => {
                spec.servers = 3;
                spec.d = 3;
                spec.lambda_grid = step_grid(0.25, 15);
            }
            Scenario::Single => {
                spec.distributions = vec![LabeledDistribution {
                    label: "Exp".into(),
                    dist: JobSizeDistribution::exponential(1.0).unwrap(),
                }];
                spec.horizon = 1e5;
                spec.warmup = 1e4;
                spec.replications = 1;
            }
            Scenario::Figure1Left => {
                spec.servers = 3;
                spec.d = 2;
                spec.lambda_grid = step_grid(0.25, 12);
            }
            Scenario::Figure1Right => {
                spec.servers = 100;
                spec.lambda = 75.0;
                spec.d_grid = (1..=10).collect();
                spec.horizon = 1e4;
                spec.warmup = 1e3;
                spec.distributions = figure_distributions(["WeibullNBU_1.2", "Exp", "WeibullNWU_0.8"]);
            }
            Scenario::StabilityScan => {
                spec.servers = 3;
                spec.d_grid = vec![1, 2, 3];
                spec.horizon = 5e4;
                spec.warmup = 5e3;
                spec.replications = 1;
            }
            Scenario::TailScan => {
                spec.servers = 2;
                spec.d = 2;
                spec.lambda = 0.8;
                spec.horizon = 1.5e6;
                spec.warmup = 1.5e5;
                spec.replications = 1;
                spec.distributions = vec![LabeledDistribution {
                    label: "Pareto_2.5".into(),
                    dist: JobSizeDistribution::pareto(2.5, 1.0).unwrap().normalize_to_unit_mean(),
                }];
            }
        }
        spec
    }

    /// Defaults, then `file`, then `cli`; validated.
    pub fn resolve(scenario: Scenario, file: Option<&ConfigFile>, cli: &Overrides) -> Result<Self, ExperimentError> {
        let mut spec = Self::defaults(scenario);
        let empty = ScenarioSection::default();
        let sc = file.map_or(&empty, |f| &f.scenario);

        if scenario == Scenario::Figure1Right && cli.full {
            // Full scale: every d up to N and the long horizon.
            spec.d_grid = (1..=spec.servers).collect();
            spec.horizon = 2e5;
            spec.warmup = 2e4;
        }
        spec.full = cli.full;

        let servers = cli.servers.or(sc.servers);
        if let Some(n) = servers {
            spec.servers = n;
            if scenario == Scenario::StabilityScan {
                spec.d_grid = (1..=n).collect();
            }
            if scenario == Scenario::Analytic && cli.d.or(sc.d).is_none() {
                spec.d = n;
            }
            if scenario == Scenario::Figure1Right && spec.full {
                spec.d_grid = (1..=n).collect();
            }
        }
        if let Some(l) = cli.lambda.or(sc.lambda) {
            spec.lambda = l;
            if matches!(scenario, Scenario::Analytic | Scenario::Figure1Left) {
                spec.lambda_grid = vec![l];
            }
        }
        if let Some(d) = cli.d.or(sc.d) {
            spec.d = d;
            if matches!(scenario, Scenario::StabilityScan | Scenario::Figure1Right) {
                spec.d_grid = vec![d];
            }
        }
        if let Some(g) = &sc.lambda_grid {
            spec.lambda_grid = g.clone();
        }
        if let Some(g) = &sc.d_grid {
            spec.d_grid = g.clone();
        }
        if let Some(s) = cli.discipline.as_deref().or(sc.discipline.as_deref()) {
            spec.discipline = parse_discipline(s)?;
        }
        if let Some(s) = cli.dependence.as_deref().or(sc.dependence.as_deref()) {
            spec.dependence = parse_dependence(s)?;
        }
        let horizon = cli.horizon.or(sc.horizon);
        if let Some(h) = horizon {
            spec.horizon = h;
            spec.warmup = h * redsim_core::des::DEFAULT_WARMUP_FRACTION;
        }
        if let Some(w) = cli.warmup.or(sc.warmup) {
            spec.warmup = w;
        }
        if let Some(s) = cli.seed.or(sc.seed) {
            spec.seed = s;
        }
        if let Some(r) = cli.replications.or(sc.replications) {
            spec.replications = r;
        }
        if let Some(b) = sc.batches {
            spec.batches = b;
        }
        if let Some(k) = sc.k_fraction {
            spec.k_fraction = k;
        }
        if let Some(b) = sc.bisection_steps {
            spec.bisection_steps = b;
        }
        if let Some(o) = cli.out.clone().or_else(|| sc.out.clone()) {
            spec.out = o;
        }

        let sections: Vec<DistributionSection> = if !cli.distributions.is_empty() {
            cli.distributions
                .iter()
                .map(|s| DistributionSection::parse_flag(s))
                .collect::<Result<_, _>>()?
        } else {
            file.map(|f| f.distribution.clone()).unwrap_or_default()
        };
        if !sections.is_empty() {
            spec.distributions = sections.iter().map(|s| s.build()).collect::<Result<_, _>>()?;
        }

        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.servers == 0 {
            return bad("servers must be at least 1".into());
        }
        if self.replications == 0 {
            return bad("replications must be a positive integer".into());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive and finite, got {}", self.horizon));
        }
        if !(self.warmup >= 0.0 && self.warmup < self.horizon) {
            return bad(format!("warmup must lie in [0, horizon), got {}", self.warmup));
        }
        if self.distributions.is_empty() {
            return bad("at least one distribution is required".into());
        }
        for (i, a) in self.distributions.iter().enumerate() {
            if a.label.is_empty() {
                return bad("distribution labels must be non-empty".into());
            }
            if self.distributions[..i].iter().any(|b| b.label == a.label) {
                return bad(format!("duplicate distribution label '{}'", a.label));
            }
        }
        let increasing = |g: &[f64]| g.windows(2).all(|w| w[1] > w[0]) && g.iter().all(|&x| x > 0.0 && x.is_finite());
        if matches!(self.scenario, Scenario::Analytic | Scenario::Figure1Left) {
            if self.lambda_grid.is_empty() || !increasing(&self.lambda_grid) {
                return bad("lambda_grid must be non-empty, positive and strictly increasing".into());
            }
        } else if !self.lambda_grid.is_empty() && !increasing(&self.lambda_grid) {
            return bad("lambda_grid must be positive and strictly increasing".into());
        }
        let uses_d_grid = matches!(self.scenario, Scenario::Figure1Right | Scenario::StabilityScan);
        if uses_d_grid {
            if self.d_grid.is_empty()
                || self.d_grid.windows(2).any(|w| w[1] <= w[0])
                || self.d_grid[0] == 0
                || *self.d_grid.last().unwrap() > self.servers
            {
                return bad(format!(
                    "d_grid must be non-empty, strictly increasing and within 1..={}",
                    self.servers
                ));
            }
        } else if self.d == 0 || self.d > self.servers {
            return bad(format!("d must lie in 1..={} (got {})", self.servers, self.d));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.batches < redsim_core::analytics::MIN_BATCHES {
            return bad(format!("batches must be at least 10, got {}", self.batches));
        }
        if !(self.k_fraction > 0.0 && self.k_fraction <= 0.2) {
            return bad(format!("k_fraction must lie in (0, 0.2], got {}", self.k_fraction));
        }
        Ok(())
    }

    /// Base simulation configuration for distribution `dist` and replication `rep`.
    /// Replication `r` uses seed `seed + r`, so every grid point shares the
    /// same random streams.
    pub fn sim_config(
        &self,
        lambda: f64,
        d: usize,
        discipline: Discipline,
        dist: JobSizeDistribution,
        rep: usize,
    ) -> SimConfig {
        SimConfig::new(self.servers, lambda, d, discipline, dist)
            .with_horizon(self.horizon)
            .with_warmup(self.warmup)
            .with_dependence(self.dependence)
            .with_seed(self.seed.wrapping_add(rep as u64))
    }
}

pub fn parse_discipline(s: &str) -> Result<Discipline, ExperimentError> {
    match s.to_ascii_lowercase().as_str() {
        "fcfs" => Ok(Discipline::Fcfs),
        "ps" => Ok(Discipline::Ps),
        _ => Err(ExperimentError::Config(format!(
            "discipline must be fcfs or ps, got '{s}'"
        ))),
    }
}

pub fn parse_dependence(s: &str) -> Result<ReplicaDependence, ExperimentError> {
    match s.to_ascii_lowercase().as_str() {
        "iid" => Ok(ReplicaDependence::Iid),
        "identical" => Ok(ReplicaDependence::Identical),
        _ => Err(ExperimentError::Config(format!(
            "dependence must be iid or identical, got '{s}'"
        ))),
    }
}
