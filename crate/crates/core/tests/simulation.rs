use redsim_core::analytics::{analytic_latency, batch_means};
use redsim_core::{run_simulation, Discipline, JobSizeDistribution, ReplicaDependence, SimConfig};

fn unit_weibull(k: f64) -> JobSizeDistribution {
    JobSizeDistribution::weibull(k, 1.0).unwrap().normalize_to_unit_mean()
}

#[test]
fn single_server_matches_mg1() {
    let cases = [
        (Discipline::Fcfs, JobSizeDistribution::exponential(1.0).unwrap()),
        (Discipline::Ps, JobSizeDistribution::deterministic(1.0).unwrap()),
        (Discipline::Fcfs, unit_weibull(0.8)),
    ];
    for (disc, dist) in cases {
        let cfg = SimConfig::new(1, 0.5, 1, disc, dist).with_horizon(4e5).with_seed(5);
        let out = run_simulation(&cfg).unwrap();
        let est = batch_means(&out.latency_values(), 20).unwrap();
        let a = analytic_latency(1, 0.5, 1, &dist, ReplicaDependence::Iid).unwrap();
        let target = if disc == Discipline::Fcfs { a.fcfs } else { a.ps };
        assert!(est.covers(target), "{disc:?} {dist:?}: {est:?} vs {target}");
    }
}

#[test]
fn full_replication_keeps_servers_in_lockstep() {
    let cfg = SimConfig::new(3, 1.5, 3, Discipline::Fcfs, unit_weibull(1.2))
        .with_horizon(2e4)
        .with_seed(2);
    let out = run_simulation(&cfg).unwrap();
    let b = &out.busy_fraction;
    assert!(b.iter().all(|&x| x == b[0]), "{b:?}");
    assert!(b[0] > 0.0 && b[0] < 1.0);
}

#[test]
fn identical_configs_reproduce_exactly() {
    for disc in [Discipline::Fcfs, Discipline::Ps] {
        let cfg = SimConfig::new(5, 3.0, 2, disc, unit_weibull(0.8))
            .with_horizon(5e3)
            .with_seed(77);
        let a = run_simulation(&cfg).unwrap();
        let b = run_simulation(&cfg).unwrap();
        assert_eq!(a, b);
        let mut csv_a = Vec::new();
        let mut csv_b = Vec::new();
        a.write_csv(&mut csv_a).unwrap();
        b.write_csv(&mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
        let c = run_simulation(&cfg.clone().with_seed(78)).unwrap();
        assert_ne!(a.latencies, c.latencies);
    }
}

#[test]
fn bookkeeping_invariants() {
    for disc in [Discipline::Fcfs, Discipline::Ps] {
        for d in 1..=4 {
            let cfg = SimConfig::new(4, 2.0, d, disc, unit_weibull(1.2))
                .with_horizon(5e3)
                .with_seed(d as u64);
            let out = run_simulation(&cfg).unwrap();
            // Everything that arrived completes once the system drains.
            assert_eq!(out.jobs_completed, out.jobs_observed);
            // Every job loses exactly d - 1 siblings.
            assert_eq!(out.cancellations, (d as u64 - 1) * out.jobs_completed);
            // One arrival event plus at most two departure schedulings per replica.
            assert!(out.events_scheduled <= out.jobs_observed * (2 * d as u64 + 1) + 1);
            for s in &out.latencies {
                assert!(s.latency > 0.0);
                assert!(s.arrival_time + s.latency > cfg.warmup);
                assert!(s.arrival_time + s.latency <= out.end_time);
            }
            assert!(out.latencies.windows(2).all(|w| w[0].arrival_time <= w[1].arrival_time));
        }
    }
}

#[test]
fn replication_lowers_latency_for_nwu_sizes() {
    let base = |d| {
        SimConfig::new(10, 5.0, d, Discipline::Ps, unit_weibull(0.8))
            .with_horizon(2e4)
            .with_seed(4)
    };
    let m1 = run_simulation(&base(1)).unwrap().mean_latency().unwrap();
    let m3 = run_simulation(&base(3)).unwrap().mean_latency().unwrap();
    assert!(m3 < m1, "{m3} vs {m1}");
}
