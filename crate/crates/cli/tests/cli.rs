use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ritz-bounds"))
        .args(args)
        .env("RITZ_BOUNDS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn verify_passes_and_reports_json() {
    let o = run(&["verify", "--d", "6", "--k", "2", "--trials", "20", "--seed", "3", "--mode", "invariant"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["instances"], 20);
    assert_eq!(r["tallies"]["mixed-cos"]["passed"], 20);
}

#[test]
fn verify_is_deterministic_modulo_timing() {
    let args = ["verify", "--trials", "10", "--seed", "77", "--mode", "suite"];
    let (mut a, mut b) = (stdout_json(&run(&args)), stdout_json(&run(&args)));
    a["elapsed_ms"] = 0.into();
    b["elapsed_ms"] = 0.into();
    assert_eq!(a, b);
}

#[test]
fn orthogonal_mode_skips_with_reason() {
    let o = run(&["verify", "--trials", "4", "--mode", "orthogonal", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("mixed-tan ")).unwrap();
    assert!(line.contains("AnglesTooLarge=4"), "{line}");
}

#[test]
fn invalid_specs_exit_with_two() {
    for args in [
        &["verify", "--d", "4", "--k", "3"][..],
        &["verify", "--spectrum", "explicit:1,2"],
        &["verify", "--tol", "-1"],
        &["sweep", "--name", "exa1", "--grid", "0,0.5"],
        &["example", "--name", "exa2", "--theta", "2"],
        &["example", "--name", "exa1", "--theta", "0.3", "--params", "3,2,1,0"],
        &["check-file", "--matrix", "/nonexistent.json", "--x", "a", "--y", "b"],
        &["frobnicate"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn example_second_at_pi_over_six() {
    let o = run(&["example", "--name", "exa2", "--theta", &std::f64::consts::FRAC_PI_6.to_string()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let imp = &v["bounds"]["tan-improved"]["ran"];
    assert!((imp["metadata"]["delta_prime"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!((imp["metadata"]["delta"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn sweep_emits_csv() {
    let o = run(&["sweep", "--name", "exa2", "--grid", "0.1:0.7:4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,lhs,classical_rhs,improved_rhs,delta,delta_prime,margin"));
    for l in lines {
        let cols: Vec<f64> = l.split(',').take(4).map(|c| c.parse().unwrap()).collect();
        assert!((cols[3] - cols[1]).abs() < 1e-10, "{l}");
    }
}

#[test]
fn check_file_on_fixtures() {
    let o = run(&[
        "check-file",
        "--matrix",
        &fixture("exa1_A.json"),
        "--x",
        &fixture("exa1_X.json"),
        "--y",
        &fixture("exa1_Y_pi3.json"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let lhs = v["mixed-cos"]["ran"]["lhs"][0].as_f64().unwrap();
    assert!((lhs - 0.75).abs() < 1e-12);
}

#[test]
fn malformed_file_names_location() {
    let dir = std::env::temp_dir().join(format!("ritz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"d\": 2,\n \"entries\": [[1, 0], [0, 0], [0, 0], [1]]}").unwrap();
    let o = run(&["check-file", "--matrix", bad.to_str().unwrap(), "--x", "x", "--y", "y"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("entries[3]"));
    std::fs::remove_dir_all(dir).unwrap();
}
