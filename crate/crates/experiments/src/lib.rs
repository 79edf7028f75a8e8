//! Configuration-driven experiments for redundancy-d FCFS vs PS systems:
//! analytic tables, single runs, the two figure panels, stability and tail
//! scans. Every command produces plot-ready CSV.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

pub use commands::{
    cmd_analytic, cmd_figure1_left, cmd_figure1_right, cmd_simulate, cmd_stability_scan, cmd_tail_scan, figure1_left,
    figure1_right, run_sweep, simulate, stability_scan, tail_scan, Report, StabilityRow, SweepResult, TailRow,
};
pub use config::{ConfigFile, ExperimentSpec, LabeledDistribution, Overrides, Scenario};
pub use error::ExperimentError;
pub use table::{Cell, Table};
