use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use apcone::rates::{fit_geometric_samples, read_trace_csv, row_samples, Window};

fn apcone(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apcone"))
        .args(args)
        .current_dir(dir)
        .env_remove("APCONE_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn number_after(text: &str, key: &str) -> f64 {
    let rest = &text[text.find(key).unwrap_or_else(|| panic!("`{key}` missing in {text}")) + key.len()..];
    rest.split(|c: char| c == ';' || c.is_whitespace()).find(|s| !s.is_empty()).unwrap().parse().unwrap()
}

#[test]
fn ex33_negative_branch_reports_a_fifth() {
    let dir = tempfile::tempdir().unwrap();
    let o = apcone(&["example", "ex3.3", "--variant", "neg"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let ratio = number_after(&stdout(&o), "geometric ratio");
    assert!((ratio - 0.2).abs() < 1e-4, "{ratio}");

    // the CSV written next to it parses back and refits to the same ratio
    let rows = read_trace_csv(fs::File::open(dir.path().join("ex3.3_neg.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 21);
    let fit = fit_geometric_samples(&row_samples(&rows), Window::new(1, 10)).unwrap();
    assert!((fit.params.1 - ratio).abs() < 1e-6);
}

#[test]
fn ex32_positive_branch_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = apcone(&["example", "ex3.2", "--variant", "pos", "--iters", "100000", "--out", "t.csv"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let slope = number_after(&stdout(&o), "slope of 1/dist^2");
    assert!((slope - 1.0 / 9.0).abs() < 0.05 / 9.0, "{slope}");
    assert!(dir.path().join("t.csv").exists());
}

#[test]
fn csv_to_stdout_keeps_summary_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let o = apcone(&["example", "ex3.2", "--variant", "neg", "--out", "-"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let rows = read_trace_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 31);
    assert!(String::from_utf8_lossy(&o.stderr).contains("geometric ratio 0.3333"));
}

#[test]
fn start_override_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["example", "ex6.1", "--start", "slowest-curve:0.05", "--iters", "2000", "--out", "-"];
    let a = apcone(&args, dir.path());
    let b = apcone(&args, dir.path());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows = read_trace_csv(a.stdout.as_slice()).unwrap();
    assert!(rows.iter().all(|r| r.psd_rank == 1));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(apcone(&["example", "ex9.9"], dir.path()).status.code(), Some(2));
    assert_eq!(apcone(&["example", "ex3.2", "--variant", "up"], dir.path()).status.code(), Some(2));
    assert_eq!(apcone(&["example", "ex3.4", "--start", "0.1"], dir.path()).status.code(), Some(2));
    assert_eq!(apcone(&["verify", "thm99"], dir.path()).status.code(), Some(2));
    assert_eq!(apcone(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(apcone(&["run", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    for (suite, seed) in [("prop31", "0"), ("lemma67", "7"), ("thm63", "0")] {
        let o = apcone(&["verify", suite, "--seed", seed], dir.path());
        let out = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{out}");
        assert!(out.lines().count() >= 10);
        assert!(out.lines().all(|l| l.starts_with("PASS ")));
    }
}

#[test]
fn verify_reports_failures_with_one() {
    // the q = 6 recursive sequence is still well short of its limit at n = 1e6
    let dir = tempfile::tempdir().unwrap();
    let o = apcone(&["verify", "lemma77"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL lemma77 q=6")));
}

#[test]
fn run_config_prints_degree_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("flat.json"), r#"{"plane": {"kind": "type2", "c": [1, 0, 0, 0, 1]}, "max_iter": 500, "seed": 3}"#).unwrap();
    let o = apcone(&["run", "flat.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("singularity degree: 1\n"), "{out}");
    assert!(out.contains("slope of 1/dist^2"));
    assert!(dir.path().join("flat.csv").exists());

    fs::write(
        dir.path().join("slow.json"),
        r#"{"plane": {"kind": "type2", "c": [1, 0, 0, 1, 0]}, "start": "slowest-curve:0.1", "max_iter": 5000, "out": "slow.csv"}"#,
    )
    .unwrap();
    let o = apcone(&["run", "slow.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("singularity degree: 2\n"));
    assert!(out.contains("slope of 1/dist^6"));
}

#[test]
fn run_is_byte_identical_for_equal_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = |out: &str| format!(r#"{{"plane": {{"kind": "type2", "c": [0, 0, 1, 1, 0]}}, "max_iter": 300, "seed": 11, "out": "{out}"}}"#);
    fs::write(dir.path().join("a.json"), cfg("a.csv")).unwrap();
    fs::write(dir.path().join("b.json"), cfg("b.csv")).unwrap();
    assert_eq!(apcone(&["run", "a.json"], dir.path()).status.code(), Some(0));
    assert_eq!(apcone(&["run", "b.json"], dir.path()).status.code(), Some(0));
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn zero_iteration_run_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("z.json"), r#"{"plane": "ex3.3", "variant": "neg", "max_iter": 0}"#).unwrap();
    assert_eq!(apcone(&["run", "z.json"], dir.path()).status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("z.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["k,dist,psd_rank,inv2,inv6", "0,2.2360679774997902e-1,1,1.9999999999999989e1,7.9999999999999891e3"]);
}

#[test]
fn run_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown_field.json", r#"{"plane": "ex3.3", "iterations": 4}"#),
        ("bad_json.json", r#"{"plane": "#),
        ("bad_spec.json", r#"{"plane": {"kind": "type2", "c": [1, 2]}}"#),
        ("type1_slowest.json", r#"{"plane": {"kind": "type1", "c": [1, 0, 0, 0, 0, 0, 0, 0], "mu": 1}, "start": "slowest-curve:0.1"}"#),
        ("neg_tol.json", r#"{"plane": "ex3.4", "tol": -1}"#),
    ] {
        fs::write(dir.path().join(name), body).unwrap();
        assert_eq!(apcone(&["run", name], dir.path()).status.code(), Some(2), "{name}");
    }
}

#[test]
fn logging_goes_to_stderr_only() {
    let dir = tempfile::tempdir().unwrap();
    let quiet = apcone(&["example", "ex3.3", "--out", "-"], dir.path());
    let loud = Command::new(env!("CARGO_BIN_EXE_apcone"))
        .args(["example", "ex3.3", "--out", "-"])
        .current_dir(dir.path())
        .env("APCONE_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(String::from_utf8_lossy(&loud.stderr).contains("DEBUG"));
}
