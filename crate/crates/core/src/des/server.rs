//! Per-server state for the two service disciplines.
//!
//! Replicas are keyed by their job id: a job places at most one replica on
//! any server, and job ids grow with arrival time, so id order is FCFS order.
//!
//! The PS server uses a virtual clock: `attained` is the service each active
//! replica has received since the busy period began, and a replica stores
//! `tag = attained at arrival + size`. Remaining work is `tag - attained`,
//! and elapsing time advances `attained` by `dt / n` for all replicas at once.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::JobId;

/// Remaining work at or below this (scaled by `max(1, now)`) counts as zero
/// when a departure is evaluated.
pub const WORK_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discipline {
    Fcfs,
    Ps,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ServerError {
    #[error("cannot elapse backwards from {from} to {to}")]
    NegativeInterval { from: f64, to: f64 },
    #[error("server clock is at {clock}, cannot elapse from {from}")]
    ClockMismatch { clock: f64, from: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tag(f64);

impl Eq for Tag {}

impl PartialOrd for Tag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FcfsServer {
    queue: BTreeMap<JobId, f64>,
    /// Absolute time at which the head finishes; meaningless when idle.
    head_finish: f64,
}

#[derive(Debug, Clone, Default)]
pub struct PsServer {
    tags: BTreeMap<JobId, f64>,
    order: BTreeSet<(Tag, JobId)>,
    attained: f64,
}

#[derive(Debug, Clone)]
enum Queue {
    Fcfs(FcfsServer),
    Ps(PsServer),
}

/// State of one server: its replicas, its local clock and a version counter
/// that invalidates previously scheduled departure candidates.
#[derive(Debug, Clone)]
pub struct ServerState {
    queue: Queue,
    clock: f64,
    version: u64,
}

impl ServerState {
    pub fn new(discipline: Discipline) -> Self {
        let queue = match discipline {
            Discipline::Fcfs => Queue::Fcfs(FcfsServer::default()),
            Discipline::Ps => Queue::Ps(PsServer::default()),
        };
        ServerState {
            queue,
            clock: 0.0,
            version: 0,
        }
    }

    pub fn discipline(&self) -> Discipline {
        match self.queue {
            Queue::Fcfs(_) => Discipline::Fcfs,
            Queue::Ps(_) => Discipline::Ps,
        }
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub(crate) fn bump_version(&mut self) -> u64 {
        self.version += 1;
        self.version
    }

    pub fn len(&self) -> usize {
        match &self.queue {
            Queue::Fcfs(s) => s.queue.len(),
            Queue::Ps(s) => s.tags.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, job: JobId) -> bool {
        match &self.queue {
            Queue::Fcfs(s) => s.queue.contains_key(&job),
            Queue::Ps(s) => s.tags.contains_key(&job),
        }
    }

    /// Remaining work of `job` at the server clock.
    pub fn remaining(&self, job: JobId) -> Option<f64> {
        match &self.queue {
            Queue::Fcfs(s) => {
                let (&head, _) = s.queue.first_key_value()?;
                if head == job {
                    Some(s.head_finish - self.clock)
                } else {
                    s.queue.get(&job).copied()
                }
            }
            Queue::Ps(s) => s.tags.get(&job).map(|tag| tag - s.attained),
        }
    }

    /// Remaining work of every replica, in job-id order.
    pub fn remaining_work(&self) -> Vec<(JobId, f64)> {
        match &self.queue {
            Queue::Fcfs(s) => s
                .queue
                .keys()
                .map(|&j| (j, self.remaining(j).expect("present")))
                .collect(),
            Queue::Ps(s) => s.tags.iter().map(|(&j, tag)| (j, tag - s.attained)).collect(),
        }
    }

    /// Total remaining work at the server clock.
    pub fn backlog(&self) -> f64 {
        self.remaining_work().iter().map(|&(_, w)| w).sum()
    }

    /// Earliest departure if nothing changes after `now`, with the replica
    /// that departs. FCFS serves the head at rate 1; PS with `n` replicas
    /// serves each at rate `1/n`.
    pub fn next_departure(&self, now: f64) -> Option<(f64, JobId)> {
        match &self.queue {
            Queue::Fcfs(s) => {
                let (&head, _) = s.queue.first_key_value()?;
                let remaining = s.head_finish - self.clock;
                Some((now + remaining.max(0.0), head))
            }
            Queue::Ps(s) => {
                let &(Tag(tag), job) = s.order.first()?;
                let n = s.tags.len() as f64;
                Some((now + n * (tag - s.attained).max(0.0), job))
            }
        }
    }

    /// Advances the server from `from` to `to`. Must not be called across a
    /// departure of this server.
    pub fn apply_elapsed(&mut self, from: f64, to: f64) -> Result<(), ServerError> {
        if to < from {
            return Err(ServerError::NegativeInterval { from, to });
        }
        if from != self.clock {
            return Err(ServerError::ClockMismatch {
                clock: self.clock,
                from,
            });
        }
        self.advance_to(to);
        Ok(())
    }

    pub(crate) fn advance_to(&mut self, to: f64) {
        debug_assert!(to >= self.clock, "server clock moving backwards");
        if let Queue::Ps(s) = &mut self.queue {
            let n = s.tags.len();
            if n > 0 {
                s.attained += (to - self.clock) / n as f64;
            }
        }
        self.clock = to;
    }

    /// Adds a replica of `job` with `size` units of work at the server clock.
    /// Returns true when the server's next departure changed.
    pub fn add(&mut self, job: JobId, size: f64) -> bool {
        let clock = self.clock;
        match &mut self.queue {
            Queue::Fcfs(s) => {
                let was_idle = s.queue.is_empty();
                let fresh = s.queue.insert(job, size).is_none();
                debug_assert!(fresh, "job {job} placed twice on one server");
                if was_idle {
                    s.head_finish = clock + size;
                }
                was_idle
            }
            Queue::Ps(s) => {
                let tag = s.attained + size;
                let fresh = s.tags.insert(job, tag).is_none();
                debug_assert!(fresh, "job {job} placed twice on one server");
                s.order.insert((Tag(tag), job));
                true
            }
        }
    }

    /// Removes the replica of `job` at the server clock, returning the work
    /// it still had. A cancelled FCFS head hands service to the next replica.
    pub fn remove(&mut self, job: JobId) -> Option<f64> {
        let clock = self.clock;
        match &mut self.queue {
            Queue::Fcfs(s) => {
                let (&head, _) = s.queue.first_key_value()?;
                if head == job {
                    let remaining = s.head_finish - clock;
                    s.queue.pop_first();
                    if let Some((_, &size)) = s.queue.first_key_value() {
                        s.head_finish = clock + size;
                    }
                    Some(remaining)
                } else {
                    s.queue.remove(&job)
                }
            }
            Queue::Ps(s) => {
                let tag = s.tags.remove(&job)?;
                s.order.remove(&(Tag(tag), job));
                let remaining = tag - s.attained;
                if s.tags.is_empty() {
                    s.attained = 0.0;
                }
                Some(remaining)
            }
        }
    }

    /// Removes every replica whose work is exhausted at the server clock.
    /// `due` is the replica the departure candidate was computed for and is
    /// always treated as finished; others finish when their remaining work is
    /// within the rounding guard. Returned in job-id order.
    pub fn take_finished(&mut self, due: JobId) -> Vec<(JobId, f64)> {
        let eps = WORK_EPSILON * self.clock.abs().max(1.0);
        let mut done: Vec<JobId> = match &self.queue {
            Queue::Fcfs(s) => s.queue.keys().next().copied().into_iter().collect(),
            Queue::Ps(s) => s
                .order
                .iter()
                .take_while(|&&(Tag(tag), job)| job == due || tag - s.attained <= eps)
                .map(|&(_, job)| job)
                .collect(),
        };
        if !done.contains(&due) && self.contains(due) {
            done.push(due);
        }
        done.sort_unstable();
        done.into_iter()
            .map(|job| (job, self.remove(job).expect("finished replica present")))
            .collect()
    }
}
