use std::path::PathBuf;
use std::process::{Command, Output};

fn dwsafe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwsafe")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn tables_print_both_precisions() {
    let o = dwsafe(&["tables"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0.602500"));
    assert!(text.contains("formula-inconsistent"));
    let o = dwsafe(&["tables", "--mode", "passive", "--speed", "1", "--distance", "1.25"]);
    assert!(stdout(&o).contains("1.702500"));
}

#[test]
fn simulate_is_deterministic_and_safe() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let s = scenario("passive_head_on.toml");
    for out in [&a, &b] {
        let o = dwsafe(&["simulate", "--scenario", &s, "--seed", "5", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("safety violations: 0"));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let o = dwsafe(&["check-trace", a.to_str().unwrap(), "--scenario", &s]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Strict: compliant"));
    assert!(stdout(&o).contains("Relaxed: compliant"));
}

#[test]
fn liveness_scenarios() {
    let o = dwsafe(&["simulate", "--scenario", &scenario("waypoint.toml")]);
    assert!(stdout(&o).contains("stopped inside goal region = true"));
    let o = dwsafe(&["simulate", "--scenario", &scenario("intersection_deadline.toml")]);
    assert!(stdout(&o).contains("passed before deadline = true"));
    let o = dwsafe(&["liveness", "waypoint", "--n", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("20/20 passed"));
}

#[test]
fn infeasible_liveness_rows_are_skipped() {
    let o = dwsafe(&["liveness", "waypoint", "--n", "200", "--include-infeasible", "--seed", "2"]);
    let text = stdout(&o);
    assert!(!text.contains(" 0 skipped-infeasible"), "{text}");
}

#[test]
fn falsify_exit_codes() {
    let s = scenario("passive_head_on.toml");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cex.csv");
    let o = dwsafe(&["falsify", "--scenario", &s, "--kappa", "0.5", "--budget", "500", "--seed", "42", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(out.exists());
    assert!(out.with_extension("json").exists());
    let o = dwsafe(&["falsify", "--scenario", &s, "--budget", "100", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let o = dwsafe(&["falsify", "--scenario", &s, "--kappa", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let s = scenario("waypoint.toml");
    assert_eq!(dwsafe(&["simulate", "--scenario", &s, "--set", "Q=1"]).status.code(), Some(2));
    assert_eq!(dwsafe(&["validate", "--scenario", &s, "--set", "b=0"]).status.code(), Some(2));
    assert_eq!(dwsafe(&["validate", "--scenario", &s]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n").unwrap();
    assert_eq!(dwsafe(&["check-trace", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn faulty_trace_fails_monitor() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let s = scenario("passive_head_on.toml");
    dwsafe(&["simulate", "--scenario", &s, "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    // Overspeed the obstacle in the post-control row of step 5.
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    let row = 1 + 2 * 5 + 1;
    let mut cols: Vec<String> = lines[row].split(',').map(str::to_string).collect();
    cols[15] = "5.0".into();
    lines[row] = cols.join(",");
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();
    let o = dwsafe(&["check-trace", path.to_str().unwrap(), "--scenario", &s]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("step 5"), "{}", stdout(&o));
}
