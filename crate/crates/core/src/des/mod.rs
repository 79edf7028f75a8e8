//! Discrete-event simulation of the `N`-server cancel-on-completion
//! redundancy system.
//!
//! Each arriving job sends replicas to `d` distinct servers chosen uniformly
//! at random. The first replica to finish completes the job, and at that
//! instant every sibling replica is removed from its server, whether it was
//! waiting or in service.

mod calendar;
mod server;

use std::collections::{HashMap, VecDeque};
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::distributions::{DistributionError, JobSizeDistribution, ReplicaDependence};

pub use calendar::{Event, EventCalendar, Scheduled};
pub use server::{Discipline, ServerError, ServerState, WORK_EPSILON};

pub type JobId = u64;

/// Number of evenly spaced backlog samples recorded over `[0, horizon]`.
pub const BACKLOG_SAMPLES: usize = 1000;

/// Default warm-up as a fraction of the horizon.
pub const DEFAULT_WARMUP_FRACTION: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("need at least one server")]
    NoServers,
    #[error("replicas per job d = {d} must satisfy 1 <= d <= N = {servers}")]
    BadReplicaCount { d: usize, servers: usize },
    #[error("arrival rate must be positive and finite, got {0}")]
    BadArrivalRate(f64),
    #[error("horizon must be positive and finite, got {0}")]
    BadHorizon(f64),
    #[error("warm-up {warmup} must be nonnegative and below the horizon {horizon}")]
    BadWarmup { warmup: f64, horizon: f64 },
    #[error("job size distribution: {0}")]
    Distribution(#[from] DistributionError),
    #[error("scripted job {index}: {reason}")]
    BadScript { index: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub servers: usize,
    pub lambda: f64,
    pub d: usize,
    pub discipline: Discipline,
    pub dist: JobSizeDistribution,
    pub dep: ReplicaDependence,
    pub horizon: f64,
    pub warmup: f64,
    pub seed: u64,
}

impl SimConfig {
    /// Configuration with i.i.d. replicas, horizon `1e5`, the default
    /// warm-up and seed 0.
    pub fn new(servers: usize, lambda: f64, d: usize, discipline: Discipline, dist: JobSizeDistribution) -> Self {
        let horizon = 1e5;
        SimConfig {
            servers,
            lambda,
            d,
            discipline,
            dist,
            dep: ReplicaDependence::Iid,
            horizon,
            warmup: horizon * DEFAULT_WARMUP_FRACTION,
            seed: 0,
        }
    }

    /// Sets the horizon and resets the warm-up to its default fraction.
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self.warmup = horizon * DEFAULT_WARMUP_FRACTION;
        self
    }

    pub fn with_warmup(mut self, warmup: f64) -> Self {
        self.warmup = warmup;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dependence(mut self, dep: ReplicaDependence) -> Self {
        self.dep = dep;
        self
    }

    pub fn with_discipline(mut self, discipline: Discipline) -> Self {
        self.discipline = discipline;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.servers == 0 {
            return Err(SimError::NoServers);
        }
        if self.d == 0 || self.d > self.servers {
            return Err(SimError::BadReplicaCount {
                d: self.d,
                servers: self.servers,
            });
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(SimError::BadArrivalRate(self.lambda));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(SimError::BadHorizon(self.horizon));
        }
        if !(self.warmup >= 0.0 && self.warmup < self.horizon) {
            return Err(SimError::BadWarmup {
                warmup: self.warmup,
                horizon: self.horizon,
            });
        }
        self.dist.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencySample {
    pub arrival_time: f64,
    pub latency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklogSample {
    pub time: f64,
    pub backlog: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Latencies of jobs completing after the warm-up, in arrival order.
    pub latencies: Vec<LatencySample>,
    pub jobs_completed: u64,
    /// Jobs that arrived during `[0, horizon]`.
    pub jobs_observed: u64,
    /// Fraction of `[0, horizon]` each server spent non-empty.
    pub busy_fraction: Vec<f64>,
    /// Largest total unfinished work seen, over all servers.
    pub max_backlog: f64,
    pub backlog_trace: Vec<BacklogSample>,
    pub events_scheduled: u64,
    /// Sibling replicas removed because another replica finished first.
    pub cancellations: u64,
    /// Time at which the last job left (arrivals stop at the horizon and the
    /// system drains).
    pub end_time: f64,
}

impl SimOutput {
    pub fn latency_values(&self) -> Vec<f64> {
        self.latencies.iter().map(|s| s.latency).collect()
    }

    pub fn mean_latency(&self) -> Option<f64> {
        if self.latencies.is_empty() {
            None
        } else {
            Some(self.latencies.iter().map(|s| s.latency).sum::<f64>() / self.latencies.len() as f64)
        }
    }

    /// Flat `arrival_time,latency` CSV with shortest round-trip numbers.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "arrival_time,latency")?;
        for s in &self.latencies {
            writeln!(w, "{},{}", s.arrival_time, s.latency)?;
        }
        Ok(())
    }
}

/// A job injected at a fixed time on fixed servers, for driving the kernel
/// without the random arrival process.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedJob {
    pub arrival_time: f64,
    pub servers: Vec<usize>,
    pub sizes: Vec<f64>,
}

#[derive(Debug)]
struct Job {
    arrival_time: f64,
    servers: Vec<usize>,
}

enum Arrivals {
    Poisson(Box<RandomStreams>),
    Scripted(VecDeque<ScriptedJob>),
}

struct RandomStreams {
    arrivals: ChaCha8Rng,
    selection: ChaCha8Rng,
    sizes: ChaCha8Rng,
    permutation: Vec<usize>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

impl RandomStreams {
    fn new(seed: u64, servers: usize) -> Self {
        RandomStreams {
            arrivals: stream(seed, 0),
            selection: stream(seed, 1),
            sizes: stream(seed, 2),
            permutation: (0..servers).collect(),
        }
    }

    fn interarrival(&mut self, lambda: f64) -> f64 {
        -(1.0 - self.arrivals.random::<f64>()).ln() / lambda
    }

    /// Partial Fisher-Yates: exactly `d` draws, `d` distinct servers.
    fn select(&mut self, d: usize) -> Vec<usize> {
        let n = self.permutation.len();
        for i in 0..d {
            let u: f64 = self.selection.random();
            let j = i + ((u * (n - i) as f64) as usize).min(n - i - 1);
            self.permutation.swap(i, j);
        }
        self.permutation[..d].to_vec()
    }

    fn sizes(&mut self, dist: &JobSizeDistribution, dep: ReplicaDependence, d: usize) -> Vec<f64> {
        match dep {
            ReplicaDependence::Iid => (0..d).map(|_| dist.sample(&mut self.sizes)).collect(),
            ReplicaDependence::Identical => vec![dist.sample(&mut self.sizes); d],
        }
    }
}

/// Runs the Poisson-arrival simulation described by `cfg`.
pub fn run_simulation(cfg: &SimConfig) -> Result<SimOutput, SimError> {
    cfg.validate()?;
    let arrivals = Arrivals::Poisson(Box::new(RandomStreams::new(cfg.seed, cfg.servers)));
    Ok(Simulation::new(cfg, arrivals).run())
}

/// Runs the kernel on a fixed list of jobs instead of Poisson arrivals.
/// `cfg.lambda`, `cfg.dist` and `cfg.seed` are ignored.
pub fn run_scripted(cfg: &SimConfig, jobs: Vec<ScriptedJob>) -> Result<SimOutput, SimError> {
    cfg.validate()?;
    let mut last = 0.0;
    for (index, job) in jobs.iter().enumerate() {
        let bad = |reason: &str| SimError::BadScript {
            index,
            reason: reason.to_string(),
        };
        if !(job.arrival_time >= last && job.arrival_time <= cfg.horizon) {
            return Err(bad("arrival times must be nondecreasing and within the horizon"));
        }
        last = job.arrival_time;
        if job.servers.len() != cfg.d || job.sizes.len() != cfg.d {
            return Err(bad("need exactly d servers and d sizes"));
        }
        let mut sorted = job.servers.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cfg.d || sorted.iter().any(|&s| s >= cfg.servers) {
            return Err(bad("servers must be distinct indices below N"));
        }
        if job.sizes.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(bad("replica sizes must be positive"));
        }
    }
    Ok(Simulation::new(cfg, Arrivals::Scripted(jobs.into())).run())
}

struct Simulation<'a> {
    cfg: &'a SimConfig,
    arrivals: Arrivals,
    calendar: EventCalendar,
    servers: Vec<ServerState>,
    jobs: HashMap<JobId, Job>,
    next_job: JobId,
    completed: Vec<(JobId, LatencySample)>,
    jobs_completed: u64,
    cancellations: u64,

    // Work accounting: total unfinished work drains at one unit per busy
    // server between events.
    clock: f64,
    backlog: f64,
    max_backlog: f64,
    busy_count: usize,
    busy_since: Vec<f64>,
    busy_time: Vec<f64>,
    trace: Vec<BacklogSample>,
}

impl<'a> Simulation<'a> {
    fn new(cfg: &'a SimConfig, arrivals: Arrivals) -> Self {
        Simulation {
            cfg,
            arrivals,
            calendar: EventCalendar::new(),
            servers: (0..cfg.servers).map(|_| ServerState::new(cfg.discipline)).collect(),
            jobs: HashMap::new(),
            next_job: 0,
            completed: Vec::new(),
            jobs_completed: 0,
            cancellations: 0,
            clock: 0.0,
            backlog: 0.0,
            max_backlog: 0.0,
            busy_count: 0,
            busy_since: vec![0.0; cfg.servers],
            busy_time: vec![0.0; cfg.servers],
            trace: Vec::with_capacity(BACKLOG_SAMPLES),
        }
    }

    fn run(mut self) -> SimOutput {
        self.schedule_next_arrival(0.0);
        while let Some(Scheduled { time, event, .. }) = self.calendar.pop() {
            match event {
                Event::Arrival => {
                    self.advance_clock(time);
                    self.handle_arrival(time);
                }
                Event::Departure { server, version } => {
                    if self.servers[server].version() != version {
                        continue;
                    }
                    self.advance_clock(time);
                    self.handle_departure(server, time);
                }
            }
        }
        let end_time = self.clock;
        self.advance_clock(self.cfg.horizon.max(end_time));
        debug_assert!(self.jobs.is_empty());

        self.completed.sort_unstable_by_key(|&(id, _)| id);
        let horizon = self.cfg.horizon;
        SimOutput {
            latencies: self.completed.into_iter().map(|(_, s)| s).collect(),
            jobs_completed: self.jobs_completed,
            jobs_observed: self.next_job,
            busy_fraction: self.busy_time.iter().map(|b| b / horizon).collect(),
            max_backlog: self.max_backlog,
            backlog_trace: self.trace,
            events_scheduled: self.calendar.scheduled(),
            cancellations: self.cancellations,
            end_time,
        }
    }

    fn schedule_next_arrival(&mut self, now: f64) {
        let next = match &mut self.arrivals {
            Arrivals::Poisson(streams) => Some(now + streams.interarrival(self.cfg.lambda)),
            Arrivals::Scripted(queue) => queue.front().map(|j| j.arrival_time),
        };
        if let Some(t) = next.filter(|&t| t <= self.cfg.horizon) {
            self.calendar.schedule(t, Event::Arrival);
        }
    }

    fn advance_clock(&mut self, t: f64) {
        let horizon = self.cfg.horizon;
        while self.trace.len() < BACKLOG_SAMPLES {
            let sample_time = horizon * (self.trace.len() + 1) as f64 / BACKLOG_SAMPLES as f64;
            if sample_time > t {
                break;
            }
            let backlog = self.backlog - self.busy_count as f64 * (sample_time - self.clock);
            self.trace.push(BacklogSample {
                time: sample_time,
                backlog: backlog.max(0.0),
            });
        }
        self.backlog -= self.busy_count as f64 * (t - self.clock);
        self.clock = t;
    }

    fn handle_arrival(&mut self, now: f64) {
        let (servers, sizes) = match &mut self.arrivals {
            Arrivals::Poisson(streams) => {
                let servers = streams.select(self.cfg.d);
                let sizes = streams.sizes(&self.cfg.dist, self.cfg.dep, self.cfg.d);
                (servers, sizes)
            }
            Arrivals::Scripted(queue) => {
                let job = queue.pop_front().expect("scheduled scripted arrival");
                (job.servers, job.sizes)
            }
        };
        let id = self.next_job;
        self.next_job += 1;
        for (&s, &size) in servers.iter().zip(&sizes) {
            self.add_replica(s, id, size, now);
        }
        self.backlog += sizes.iter().sum::<f64>();
        self.max_backlog = self.max_backlog.max(self.backlog);
        self.jobs.insert(
            id,
            Job {
                arrival_time: now,
                servers,
            },
        );
        self.schedule_next_arrival(now);
    }

    fn handle_departure(&mut self, s: usize, now: f64) {
        self.servers[s].advance_to(now);
        let (_, due) = self.servers[s]
            .next_departure(now)
            .expect("departure from a non-empty server");
        let finished = self.servers[s].take_finished(due);
        for (job, residual) in finished {
            self.backlog -= residual;
            self.complete_job(job, s, now);
        }
        if self.servers[s].is_empty() {
            self.mark_idle(s, now);
        }
        self.reschedule(s, now);
    }

    fn complete_job(&mut self, id: JobId, origin: usize, now: f64) {
        let job = self.jobs.remove(&id).expect("completing job is in the system");
        self.jobs_completed += 1;
        if now > self.cfg.warmup {
            self.completed.push((
                id,
                LatencySample {
                    arrival_time: job.arrival_time,
                    latency: now - job.arrival_time,
                },
            ));
        }
        for &u in job.servers.iter().filter(|&&u| u != origin) {
            self.cancel_replica(u, id, now);
        }
    }

    /// Removes a sibling replica with no service rendered after `now`.
    fn cancel_replica(&mut self, s: usize, id: JobId, now: f64) {
        let server = &mut self.servers[s];
        server.advance_to(now);
        let before = server.next_departure(now);
        let removed = server.remove(id).expect("sibling replica is present");
        self.backlog -= removed;
        self.cancellations += 1;
        if self.servers[s].is_empty() {
            self.mark_idle(s, now);
        }
        if self.servers[s].next_departure(now) != before {
            self.reschedule(s, now);
        }
    }

    fn add_replica(&mut self, s: usize, id: JobId, size: f64, now: f64) {
        let server = &mut self.servers[s];
        server.advance_to(now);
        let was_empty = server.is_empty();
        let changed = server.add(id, size);
        if was_empty {
            self.mark_busy(s, now);
        }
        if changed {
            self.reschedule(s, now);
        }
    }

    fn reschedule(&mut self, s: usize, now: f64) {
        let server = &mut self.servers[s];
        let version = server.bump_version();
        if let Some((t, _)) = server.next_departure(now) {
            self.calendar.schedule(t, Event::Departure { server: s, version });
        }
    }

    fn mark_busy(&mut self, s: usize, now: f64) {
        self.busy_count += 1;
        self.busy_since[s] = now;
    }

    fn mark_idle(&mut self, s: usize, now: f64) {
        let h = self.cfg.horizon;
        self.busy_count -= 1;
        self.busy_time[s] += now.min(h) - self.busy_since[s].min(h);
    }
}
