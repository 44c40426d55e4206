use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn polya(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polya"))
        .args(args)
        .env_remove("POLYA_OUT_DIR")
        .env_remove("POLYA_THREADS")
        .output()
        .expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn write_config(dir: &Path, body: serde_json::Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn small(dir: &Path) -> String {
    write_config(
        dir,
        serde_json::json!({
            "d": 3,
            "initial": [1, 1, 1],
            "reinforcement": { "family": "power", "exponent": 2.0 },
            "schedule": { "family": "constant", "c": 1 },
            "steps": 500,
            "replications": 6,
            "seed": 11,
            "snapshots": 8,
            "fixation_window": 100
        }),
    )
}

#[test]
fn validate_reports_failing_elasticity() {
    let out = polya(&["validate", &config("sublinear.json")]);
    assert_eq!(out.status.code(), Some(0));
    let stamp: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stamp["class_r"]["cond_c"]["passed"], false);
    assert_eq!(stamp["class_r"]["cond_c"]["alpha_inf"], 0.5);
    assert_eq!(stamp["hypotheses_hold"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("condition (C)"));
}

#[test]
fn equilibria_lists_every_support() {
    let out = polya(&["equilibria", "--d", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "support_size,y_1,y_2,y_3");
    assert_eq!(lines.len(), 1 + 7);
    assert_eq!(
        lines[7],
        "3,0.3333333333333333,0.3333333333333333,0.3333333333333333"
    );

    let out = polya(&["equilibria", "--d", "4", "--format", "json"]);
    let points: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(points.len(), 15);
}

#[test]
fn exponential_schedule_is_stamped() {
    let out = polya(&["simulate", &config("exponential_schedule.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("condition (ii) fails"));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["stamp"]["hypotheses_hold"], false);
    assert_eq!(report["stamp"]["conditions"]["cond_ii_verdict"], "diverges");
}

#[test]
fn bad_input_exits_with_one() {
    assert_eq!(polya(&["simulate", "--bogus", "x"]).status.code(), Some(1));
    assert_eq!(
        polya(&["simulate", "/does/not/exist.json"]).status.code(),
        Some(1)
    );
    assert_eq!(polya(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        serde_json::json!({
            "d": 3,
            "initial": [1, 1],
            "reinforcement": { "family": "power", "exponent": 2.0 },
            "schedule": { "family": "constant", "c": 1 },
            "steps": 10
        }),
    );
    let out = polya(&["simulate", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial"));
}

#[test]
fn csv_output_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let out_dir = dir.path().join("out");
    let out = polya(&[
        "simulate",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "csv",
        "--seed",
        "5",
        "--threads",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["config"]["seed"], 5);
    assert_eq!(report["runs"].as_array().unwrap().len(), 6);

    let runs = std::fs::read_to_string(out_dir.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 1 + 6);
    let traj = std::fs::read_to_string(out_dir.join("trajectories.csv")).unwrap();
    assert!(traj.starts_with("run_id,step,tau,theta_1,theta_2,theta_3"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let one = polya(&["simulate", &cfg, "--threads", "1"]);
    let four = polya(&["simulate", &cfg, "--threads", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn analyze_writes_flows() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("analysis");
    let out = polya(&[
        "analyze",
        &config("flows.json"),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let eq: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("equilibria.json")).unwrap())
            .unwrap();
    assert_eq!(eq.len(), 7);
    let flows = std::fs::read_dir(out_dir.join("flows")).unwrap().count();
    assert_eq!(flows, 100);
    let first = std::fs::read_to_string(out_dir.join("flows/flow_000.csv")).unwrap();
    assert!(first.starts_with("t,y_1,y_2,y_3,F"));
}
