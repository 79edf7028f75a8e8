//! Cancel-on-completion redundancy-d queueing: job-size families, a
//! discrete-event simulator for FCFS and PS servers, and the analytic and
//! statistical tools used to compare the two disciplines.

pub mod analytics;
pub mod des;
pub mod distributions;
pub mod quadrature;

pub use des::{run_simulation, Discipline, SimConfig, SimOutput};
pub use distributions::{AgingClass, JobSizeDistribution, Moment, ReplicaDependence};
