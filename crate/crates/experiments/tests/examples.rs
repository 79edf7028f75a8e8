use redsim_core::analytics::{analytic_latency, DEFAULT_K_FRACTION};
use redsim_core::{Discipline, JobSizeDistribution, ReplicaDependence};
use redsim_experiments::{
    cmd_analytic, figure1_left, figure1_right, stability_scan, tail_scan, ExperimentError, ExperimentSpec,
    LabeledDistribution, Overrides, Scenario,
};

fn spec(scenario: Scenario) -> ExperimentSpec {
    ExperimentSpec::resolve(scenario, None, &Overrides::default()).unwrap()
}

#[test]
fn analytic_examples() {
    let mut s = spec(Scenario::Analytic);
    s.servers = 1;
    s.d = 1;
    s.lambda_grid = vec![0.5];
    s.distributions = vec![LabeledDistribution {
        label: "Exp".into(),
        dist: JobSizeDistribution::exponential(1.0).unwrap(),
    }];
    let r = cmd_analytic(&s).unwrap();
    assert_eq!(r.files[0].1.to_csv(), "lambda,Exp\n0.5,2\n");
    assert_eq!(r.files[1].1.to_csv(), "lambda,Exp\n0.5,2\n");

    s.servers = 3;
    s.d = 3;
    s.lambda_grid = vec![1.0];
    s.distributions[0].dist = JobSizeDistribution::deterministic(1.0).unwrap();
    assert!(matches!(cmd_analytic(&s), Err(ExperimentError::Infeasible(_))));

    s.distributions[0].dist = JobSizeDistribution::weibull(0.8, 1.0).unwrap().normalize_to_unit_mean();
    let r = cmd_analytic(&s).unwrap();
    let ps: f64 = r.files[1]
        .1
        .to_csv()
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    let e_min = 3f64.powf(-1.25);
    assert!((ps - e_min / (1.0 - e_min)).abs() < 1e-12);

    s.d = 2;
    let err = cmd_analytic(&s).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("d = 1") && err.to_string().contains("d = N"));
}

#[test]
fn left_panel_light_traffic_and_ordering() {
    let mut s = spec(Scenario::Figure1Left);
    s.lambda_grid = vec![0.01];
    s.horizon = 1e5;
    s.warmup = 1e3;
    s.replications = 2;
    let light = figure1_left(&s).unwrap();
    for (i, ld) in s.distributions.iter().enumerate() {
        let e_min = ld.dist.expected_min(2, ReplicaDependence::Iid).unwrap();
        for disc in [Discipline::Fcfs, Discipline::Ps] {
            let m = light.cell(disc, 0, i).unwrap().mean;
            assert!(
                (m - e_min).abs() / e_min < 0.05,
                "{} {disc:?}: {m} vs {e_min}",
                ld.label
            );
        }
    }

    let mut s = spec(Scenario::Figure1Left);
    s.lambda_grid = vec![0.3];
    let r = figure1_left(&s).unwrap();
    let cell = |d, i| r.cell(d, 0, i).unwrap().mean;
    assert!(cell(Discipline::Fcfs, 0) < cell(Discipline::Ps, 0));
    assert!(cell(Discipline::Fcfs, 2) > cell(Discipline::Ps, 2));
    assert!((cell(Discipline::Fcfs, 1) - cell(Discipline::Ps, 1)).abs() / cell(Discipline::Ps, 1) < 0.1);
    let files = r.tables("figure1_left");
    assert_eq!(files[0].1.header.join(","), "lambda,WeibullNBU,Exp,WeibullNWU");
    assert_eq!(files[1].1.header.join(","), "lambda,WeibullNBU_ci,Exp_ci,WeibullNWU_ci");
}

#[test]
fn left_panel_leaves_unstable_cells_empty() {
    let mut s = spec(Scenario::Figure1Left);
    s.lambda_grid = vec![2.8];
    s.horizon = 2e4;
    s.warmup = 2e3;
    s.replications = 1;
    let r = figure1_left(&s).unwrap();
    // Beyond N / (d E[X_min]) ~ 2.67 for the NBU Weibull.
    assert_eq!(r.ps[0][0], None);
    let csv = r.tables("figure1_left")[2].1.to_csv();
    assert!(csv.lines().nth(1).unwrap().starts_with("2.8,,"), "{csv}");
}

#[test]
fn right_panel_examples() {
    let mut s = spec(Scenario::Figure1Right);
    s.d_grid = vec![1];
    s.horizon = 4e4;
    s.warmup = 4e3;
    let r = figure1_right(&s).unwrap();
    let files = r.tables("figure1_right");
    assert_eq!(files[0].1.header.join(","), "d,WeibullNBU_1.2,Exp,WeibullNWU_0.8");
    // d = 1: Poisson thinning makes every server an M/G/1 queue at load 0.75.
    for (i, ld) in s.distributions.iter().enumerate() {
        let a = analytic_latency(1, 0.75, 1, &ld.dist, ReplicaDependence::Iid).unwrap();
        let est = r.cell(Discipline::Fcfs, 0, i).unwrap();
        assert!(est.covers(a.fcfs), "{}: {est:?} vs {}", ld.label, a.fcfs);
    }

    let mut s = spec(Scenario::Figure1Right);
    s.d_grid = vec![1, 2, 4, 8];
    s.horizon = 4e3;
    s.warmup = 4e2;
    s.replications = 2;
    s.distributions = vec![LabeledDistribution {
        label: "WeibullNWU_0.8".into(),
        dist: JobSizeDistribution::weibull(0.8, 1.0).unwrap().normalize_to_unit_mean(),
    }];
    let r = figure1_right(&s).unwrap();
    let ps: Vec<_> = (0..4).map(|i| r.cell(Discipline::Ps, i, 0).unwrap()).collect();
    assert!(
        ps.windows(2).all(|w| w[1].mean <= w[0].mean + w[0].ci_halfwidth),
        "{ps:?}"
    );
}

#[test]
fn stability_scan_brackets_ps_bound() {
    let mut s = spec(Scenario::StabilityScan);
    s.servers = 3;
    s.d_grid = vec![2];
    s.horizon = 2e4;
    s.warmup = 2e3;
    s.distributions = vec![LabeledDistribution {
        label: "Exp".into(),
        dist: JobSizeDistribution::exponential(1.0).unwrap(),
    }];
    let rows = stability_scan(&s).unwrap();
    assert_eq!(rows.len(), 2);
    let ps = &rows[1];
    assert_eq!(ps.discipline, Discipline::Ps);
    assert!((ps.analytic.unwrap() - 3.0).abs() < 1e-12);
    assert!(ps.relative_gap().unwrap().abs() < 0.1, "{ps:?}");
}

#[test]
fn tail_scan_single_server_ps() {
    let mut s = spec(Scenario::TailScan);
    s.servers = 1;
    s.d = 1;
    s.lambda = 0.5;
    s.horizon = 1e6;
    s.warmup = 1e5;
    s.k_fraction = DEFAULT_K_FRACTION;
    s.distributions = vec![LabeledDistribution {
        label: "Pareto_2".into(),
        dist: JobSizeDistribution::pareto(2.0, 1.0).unwrap().normalize_to_unit_mean(),
    }];
    let rows = tail_scan(&s).unwrap();
    let ps = rows.iter().find(|r| r.discipline == Discipline::Ps).unwrap();
    assert_eq!(ps.predicted, 2.0);
    assert!((ps.estimate.index - 2.0).abs() <= 0.4, "{ps:?}");

    s.distributions[0].dist = JobSizeDistribution::deterministic(1.0).unwrap();
    assert_eq!(tail_scan(&s).unwrap_err().exit_code(), 2);
}
