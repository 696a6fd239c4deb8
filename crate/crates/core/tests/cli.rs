use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projshape")).args(args).env_remove("PROJSHAPE_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn mean_of_sheet_images() {
    let o = run(&["--input", &fixture("sheet.csv"), "mean"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("0.7062") && text.contains("0.7079"), "{text}");
}

#[test]
fn register_prints_axes() {
    let o = run(&["--input", &fixture("windows.csv"), "register"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("tolerances:"));
}

#[test]
fn two_sample_tangent_test() {
    let o = run(&["--input", &fixture("buildings.csv"), "test2", "--groups", "education,careers", "--method", "tangent"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("2.607651"), "{}", stdout(&o));
}

#[test]
fn json_output_parses() {
    let o = run(&["--json", "--input", &fixture("buildings.csv"), "test2", "--groups", "education,careers"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn rotation_comparison_writes_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = run(&["--input", &fixture("buildings.csv"), "--B", "60", "--out", &out, "rotcmp", "--groups", "education,careers"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("rotation_cloud.csv")).unwrap();
    assert_eq!(csv.lines().count(), 61);
    assert!(dir.path().join("rotation_cloud.svg").exists());
    assert!(dir.path().join("report.txt").exists());
}

#[test]
fn seed_changes_bootstrap_but_runs_repeat() {
    let args = |seed: &'static str| ["--B", "200", "--seed", seed, "reproduce", "ex5.1"];
    let (a, b, c) = (run(&args("1")), run(&args("1")), run(&args("2")));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn error_exit_codes() {
    let missing = run(&["--input", "/nonexistent/data.csv", "mean"]);
    assert_eq!(missing.status.code(), Some(20));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "group,view,landmark,x1\ng,v,1,notanumber\n").unwrap();
    assert_eq!(run(&["--input", &bad.display().to_string(), "mean"]).status.code(), Some(3));

    let unknown_group = run(&["--input", &fixture("buildings.csv"), "mean", "--group", "nope"]);
    assert_ne!(unknown_group.status.code(), Some(0));

    let scenario = run(&["calibrate", "--scenario", "nonsense", "--reps", "10"]);
    assert_eq!(scenario.status.code(), Some(2));

    let usage = run(&["frobnicate"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn calibration_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = run(&["--out", &out, "calibrate", "--scenario", "tangent", "--reps", "50"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("calibration.csv")).unwrap();
    assert!(csv.starts_with("scenario,statistic,reference"));
}
