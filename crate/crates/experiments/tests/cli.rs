use std::path::Path;
use std::process::{Command, Output};

fn redsim(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redsim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(
        redsim(&["analytic", "--servers", "3", "-d", "2"], out).status.code(),
        Some(2)
    );
    assert_eq!(
        redsim(
            &[
                "analytic",
                "--servers",
                "3",
                "-d",
                "3",
                "--lambda",
                "1",
                "--dist",
                "det"
            ],
            out
        )
        .status
        .code(),
        Some(3)
    );
    assert_eq!(redsim(&["tail-scan", "--dist", "det"], out).status.code(), Some(2));
    assert_eq!(
        redsim(&["simulate", "--dist", "gamma:shape=2"], out).status.code(),
        Some(2)
    );
    assert_eq!(redsim(&["simulate", "--horizon", "-1"], out).status.code(), Some(2));
    assert_eq!(
        redsim(&["simulate", "--config", "/nonexistent.toml"], out)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(redsim(&["no-such-command"], out).status.code(), Some(2));

    let bad = out.join("bad.toml");
    std::fs::write(&bad, "[scenario]\nservrs = 3\n").unwrap();
    let o = redsim(&["simulate", "--config", bad.to_str().unwrap()], out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("servrs"));
}

#[test]
fn analytic_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = redsim(
        &[
            "analytic",
            "--servers",
            "1",
            "-d",
            "1",
            "--lambda",
            "0.5",
            "--dist",
            "exp",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(read(&dir.path().join("analytic_fcfs.csv")), "lambda,Exp\n0.5,2\n");
    assert_eq!(read(&dir.path().join("analytic_ps.csv")), "lambda,Exp\n0.5,2\n");
    assert!(String::from_utf8_lossy(&o.stdout).contains("Indifferent"));
}

#[test]
fn simulate_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
[scenario]
servers = 4
d = 2
lambda = 2.0
discipline = "ps"
horizon = 500.0
seed = 11

[[distribution]]
label = "NWU"
kind = "weibull"
shape = 0.8
unit_mean = true
"#,
    )
    .unwrap();
    let o = redsim(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&dir.path().join("simulate.csv"));
    assert!(csv.starts_with("arrival_time,latency\n"));
    assert!(csv.lines().count() > 500);
    assert!(!csv.contains('\r'));

    // A flag overrides the file's seed.
    let other = tempfile::tempdir().unwrap();
    let o = redsim(
        &["simulate", "--config", cfg.to_str().unwrap(), "--seed", "12"],
        other.path(),
    );
    assert!(o.status.success());
    assert_ne!(read(&other.path().join("simulate.csv")), csv);
}

#[test]
fn small_sweeps_write_all_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("left.toml");
    std::fs::write(
        &cfg,
        "[scenario]\nlambda_grid = [0.5, 1.0]\nhorizon = 5000.0\nreplications = 2\n",
    )
    .unwrap();
    let o = redsim(&["figure1-left", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["fcfs", "fcfs_ci", "ps", "ps_ci"] {
        let csv = read(&dir.path().join(format!("figure1_left_{name}.csv")));
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.lines().nth(1).unwrap().starts_with("0.5,"));
    }

    let o = redsim(
        &[
            "stability-scan",
            "--servers",
            "2",
            "-d",
            "2",
            "--horizon",
            "5000",
            "--dist",
            "Exp=exp",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&dir.path().join("stability_scan.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "discipline,distribution,d,lambda_star,analytic_lambda_star,relative_gap"
    );
    assert!(lines.next().unwrap().starts_with("fcfs,Exp,2,"));
    assert!(lines.next().unwrap().starts_with("ps,Exp,2,"));
}
