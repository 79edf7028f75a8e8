use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use redsim_experiments::{
    cmd_analytic, cmd_figure1_left, cmd_figure1_right, cmd_simulate, cmd_stability_scan, cmd_tail_scan, ConfigFile,
    ExperimentError, ExperimentSpec, Overrides, Scenario,
};

const CONFIG_HELP: &str = "\
CONFIG FILE (TOML)
  [scenario]            all keys optional
    servers = N           number of servers
    lambda = L            arrival rate (single-point commands; a one-point grid elsewhere)
    d = D                 replicas per job
    discipline = \"fcfs\"   fcfs | ps (simulate only; sweeps run both)
    dependence = \"iid\"    iid | identical replica sizes
    horizon = T           arrivals occur on [0, T]
    warmup = W            latencies of jobs completing before W are dropped (default T/10)
    seed = S              replication r uses seed S + r
    replications = K      seeds per grid point
    lambda_grid = [..]    arrival-rate sweep (analytic, figure1-left, stability-scan probe grid)
    d_grid = [..]         replication sweep (figure1-right, stability-scan)
    batches = B           batch-means batches per run (>= 10)
    k_fraction = F        Hill estimator fraction of top order statistics
    bisection_steps = S   stability probe refinement steps
    out = DIR             output directory

  [[distribution]]      repeat for each curve
    label = \"Exp\"         CSV column name (must be unique)
    kind = \"weibull\"      exponential (rate) | weibull (shape, scale) |
                          pareto (index, min) | deterministic (value)
    shape = 1.2
    unit_mean = true      rescale to E[X] = 1

Command-line flags override file values. --dist replaces the file's
distribution list; its syntax is [label=]kind[:key=value,...], e.g.
--dist NBU=weibull:shape=1.2,unit_mean=true

EXIT CODES
  0 success, 2 invalid configuration, 3 infeasible experiment";

#[derive(Debug, Parser)]
#[command(name = "redsim", version, about = "Redundancy-d FCFS vs PS experiments", after_help = CONFIG_HELP)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// TOML configuration file
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory for CSV files
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Independent seeds per grid point
    #[arg(long, global = true, value_name = "K")]
    replications: Option<usize>,
    /// Simulated time horizon
    #[arg(long, global = true, value_name = "T")]
    horizon: Option<f64>,
    /// Warm-up period excluded from statistics
    #[arg(long, global = true, value_name = "T")]
    warmup: Option<f64>,
    /// Full-scale right panel (d up to N, longer horizon)
    #[arg(long, global = true)]
    full: bool,
    /// Number of servers
    #[arg(long, global = true, value_name = "N")]
    servers: Option<usize>,
    /// Arrival rate
    #[arg(long, global = true, value_name = "L")]
    lambda: Option<f64>,
    /// Replicas per job
    #[arg(short = 'd', long = "replicas", global = true, value_name = "D")]
    d: Option<usize>,
    /// fcfs or ps
    #[arg(long, global = true)]
    discipline: Option<String>,
    /// iid or identical
    #[arg(long, global = true)]
    dependence: Option<String>,
    /// Job-size distribution, repeatable: [label=]kind[:key=value,...]
    #[arg(long = "dist", global = true, value_name = "SPEC")]
    dist: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form latencies for d = 1 or d = N, plus replication verdicts
    Analytic,
    /// One simulation run; writes arrival_time,latency
    Simulate,
    /// Latency vs arrival rate, N = 3, d = 2
    #[command(name = "figure1-left")]
    Figure1Left,
    /// Latency vs d, N = 100, lambda = 75
    #[command(name = "figure1-right")]
    Figure1Right,
    /// Empirical critical arrival rates vs the PS bound
    #[command(name = "stability-scan")]
    StabilityScan,
    /// Hill tail indices of FCFS and PS latency under Pareto sizes
    #[command(name = "tail-scan")]
    TailScan,
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let g = cli.global;
    let scenario = match cli.command {
        Command::Analytic => Scenario::Analytic,
        Command::Simulate => Scenario::Single,
        Command::Figure1Left => Scenario::Figure1Left,
        Command::Figure1Right => Scenario::Figure1Right,
        Command::StabilityScan => Scenario::StabilityScan,
        Command::TailScan => Scenario::TailScan,
    };
    let file = g.config.as_deref().map(ConfigFile::load).transpose()?;
    let overrides = Overrides {
        seed: g.seed,
        out: g.out,
        replications: g.replications,
        horizon: g.horizon,
        warmup: g.warmup,
        full: g.full,
        servers: g.servers,
        lambda: g.lambda,
        d: g.d,
        discipline: g.discipline,
        dependence: g.dependence,
        distributions: g.dist,
    };
    let spec = ExperimentSpec::resolve(scenario, file.as_ref(), &overrides)?;

    if scenario == Scenario::Single {
        let (csv, messages) = cmd_simulate(&spec)?;
        std::fs::create_dir_all(&spec.out)?;
        let path = spec.out.join("simulate.csv");
        std::fs::write(&path, csv)?;
        for m in messages {
            println!("{m}");
        }
        println!("wrote {}", path.display());
        return Ok(());
    }

    let report = match scenario {
        Scenario::Analytic => cmd_analytic(&spec)?,
        Scenario::Figure1Left => cmd_figure1_left(&spec)?,
        Scenario::Figure1Right => cmd_figure1_right(&spec)?,
        Scenario::StabilityScan => cmd_stability_scan(&spec)?,
        Scenario::TailScan => cmd_tail_scan(&spec)?,
        Scenario::Single => unreachable!(),
    };
    for m in &report.messages {
        println!("{m}");
    }
    for path in report.write(&spec.out)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
