use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn orgswarm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orgswarm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"{"master_seed": 3, "replicate_count": 4, "dim": 10, "agent_count": 8, "silo_count": 2, "max_iterations": 300}"#;

#[test]
fn validate_accepts_minimal_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"master_seed": 1}"#);
    let out = orgswarm(&["validate", "--config", &cfg]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("ok: 6 arms"), "{stdout}");
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"master_seed": 1, "silo_count": 30}"#);
    let out = orgswarm(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("silo_count"));

    let cfg = write_config(dir.path(), r#"{"dim": 10}"#);
    let out = orgswarm(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("master_seed"));

    let out = orgswarm(&["validate", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_supplies_missing_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"dim": 6, "agent_count": 5, "silo_count": 2, "max_iterations": 100}"#,
    );
    let out_dir = dir.path().join("out");
    let out = orgswarm(&[
        "run",
        "--config",
        &cfg,
        "--seed",
        "5",
        "--replicates",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 6 * 2);
}

#[test]
fn run_writes_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = orgswarm(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let summary = fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(
        lines.next(),
        Some("arm,replicate,seed,group_convergence,first_any_hit,success,final_best_fitness")
    );
    assert_eq!(lines.count(), 24);

    let arms = fs::read_to_string(out_dir.join("arms.csv")).unwrap();
    let labels: Vec<&str> = arms
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    assert_eq!(labels, sorted);
    assert_eq!(labels.len(), 6);

    let cmp = fs::read_to_string(out_dir.join("comparisons.csv")).unwrap();
    assert_eq!(cmp.lines().count(), 1 + 15);
    for line in cmp.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert!(cols[0] < cols[1]);
    }

    let curve = fs::read_to_string(out_dir.join("curves").join("siloed_reactive.csv")).unwrap();
    assert_eq!(curve.lines().count(), 1 + 300);
    assert!(!out_dir.join("traces").exists());
}

#[test]
fn trace_levels_control_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = orgswarm(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--trace",
        "full",
        "--replicates",
        "1",
    ]);
    assert!(out.status.success());
    let trace =
        fs::read_to_string(out_dir.join("traces/dynamic_reactive/replicate_0.csv")).unwrap();
    let header = trace.lines().next().unwrap();
    assert!(header.starts_with("iteration,best_fitness,mean_fitness,fitness_0"));
    assert!(header.contains("W_7") && header.contains("C1_0") && header.contains("C2_3"));
    assert!(header.ends_with("silo_of_agent_7"));
}

#[test]
fn repeated_runs_and_worker_counts_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let run = |name: &str, workers: &str| {
        let out_dir = dir.path().join(name);
        let out = orgswarm(&[
            "run",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(out.status.success());
        ["summary.csv", "arms.csv", "comparisons.csv", "goals.csv"]
            .map(|f| fs::read(out_dir.join(f)).unwrap())
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn unwritable_output_exits_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "not a directory").unwrap();
    let out = orgswarm(&[
        "run",
        "--config",
        &cfg,
        "--out",
        blocker.join("sub").to_str().unwrap(),
        "--replicates",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}
