//! End-to-end tests of the `meanlab` binary: flag parsing, job files, exit
//! codes, output formats, and the tolerance-scale escape hatch.

use serde_json::Value;
use std::process::{Command, Output};

fn meanlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_meanlab"))
}

fn run(args: &[&str]) -> Output {
    meanlab().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_trig_pair_passes() {
    let out = run(&["classify", "--f", "cos(x)", "--g", "sin(x)", "--domain", "-0.7", "0.7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], "1.0");
    assert_eq!(v["command"], "classify");
    assert_eq!(v["seed"], 42);
    assert_eq!(v["verdict"], "symmetric_QA");
    assert_eq!(v["pass"], true);
    assert!(v["generated_at"].as_u64().is_some());
}

#[test]
fn eval_mean_recovers_geometric_mean() {
    let out = run(&[
        "eval-mean", "--kind", "quasi", "--phi", "log(x)", "--points", "1", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let value = v["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() < 1e-9, "A_log(1, 4) = {value}");
    assert_eq!(v["n"], 2);
}

#[test]
fn eval_mean_bajraktarevic_weighted() {
    let out = run(&[
        "eval-mean", "--kind", "bajraktarevic", "--f", "1", "--g", "log(x)",
        "--points", "1", "4", "--weights", "3", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let value = v["value"].as_f64().unwrap();
    let expected = ((3.0 * 1.0f64.ln() + 4.0f64.ln()) / 4.0).exp();
    assert!((value - expected).abs() < 1e-9, "got {value}, want {expected}");
}

#[test]
fn check_fe_failing_pair_exits_one() {
    let out = run(&[
        "check-fe", "--phi", "exp(x)", "--f", "1", "--t", "0.5", "--domain", "0", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["max_residual"].as_f64().unwrap() > 1e-2);
}

#[test]
fn tolerance_scale_env_flips_the_verdict() {
    let args = [
        "check-fe", "--phi", "exp(x)", "--f", "1", "--t", "0.5", "--domain", "0", "1",
    ];
    let strict = run(&args);
    assert_eq!(strict.status.code(), Some(1));
    let lax = meanlab()
        .args(args)
        .env("MEANLAB_TOLERANCE_SCALE", "1e8")
        .output()
        .expect("binary runs");
    assert_eq!(lax.status.code(), Some(0));
    let v = stdout_json(&lax);
    assert_eq!(v["pass"], true);
    assert!(v["threshold"].as_f64().unwrap() > 0.1);
}

#[test]
fn invalid_tolerance_scale_is_a_config_error() {
    let out = meanlab()
        .args(["eval-mean", "--kind", "quasi", "--phi", "x", "--points", "1", "2"])
        .env("MEANLAB_TOLERANCE_SCALE", "zero")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("MEANLAB_TOLERANCE_SCALE"), "stderr: {err}");
}

#[test]
fn construct_kernel_route_reports_pass() {
    let out = run(&[
        "construct", "--kernel-p", "-1", "--coeffs", "1", "0", "0", "1",
        "--domain", "0.4", "1.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["route"], "kernel");
    assert_eq!(v["pass"], true);
    assert_eq!(v["p"].as_f64().unwrap(), -1.0);
}

#[test]
fn construct_polynomial_route_reports_pass() {
    let out = run(&[
        "construct", "--poly", "1", "0", "1", "--domain", "-1.2", "1.2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["route"], "polynomial");
    assert_eq!(v["pass"], true);
    assert_eq!(v["p"].as_f64().unwrap(), -1.0);
}

#[test]
fn report_csv_has_expected_shape() {
    let out = run(&[
        "report", "--f", "cos(x)", "--g", "sin(x)", "--domain", "-0.5", "0.5",
        "--grid", "5", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,W10,W20,W21,Phi,Psi");
    assert_eq!(lines.len(), 6);
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 6);
    }
}

#[test]
fn csv_format_is_rejected_where_undefined() {
    let out = run(&[
        "classify", "--f", "cos(x)", "--g", "sin(x)", "--domain", "-0.7", "0.7",
        "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("csv"), "stderr: {err}");
}

#[test]
fn check_fe_csv_lists_residual_grid() {
    let out = run(&[
        "check-fe", "--phi", "x", "--f", "1", "--t", "0.5", "--domain", "0", "1",
        "--grid", "16", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,residual");
    assert_eq!(lines.len(), 1 + 16 * 16);
}

#[test]
fn output_flag_writes_the_file_instead_of_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verdict.json");
    let out = run(&[
        "classify", "--f", "1", "--g", "log(x)", "--domain", "1", "3",
        "--weighted", "--output", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["verdict"], "weighted_QA");
    assert_eq!(v["h"], "log(x)");
}

#[test]
fn parse_error_exits_two_with_message() {
    let out = run(&["classify", "--f", "bogus(x)", "--g", "x", "--domain", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus"), "stderr: {err}");
}

#[test]
fn missing_required_flag_exits_two() {
    let out = run(&["classify", "--f", "cos(x)", "--domain", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn job_file_runs_a_full_classification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.cfg");
    std::fs::write(
        &path,
        "# two-variable classification\n\
         command = classify\n\
         f = cos(x)\n\
         g = sin(x)\n\
         domain = -0.7 0.7\n\
         seed = 7\n",
    )
    .unwrap();
    let out = run(&["job", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "symmetric_QA");
    assert_eq!(v["seed"], 7);
}

#[test]
fn job_file_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.cfg");
    std::fs::write(
        &path,
        "command = classify\nf = cos(x)\ng = sin(x)\nbad-key = 1\ndomain = 0 1\n",
    )
    .unwrap();
    let out = run(&["job", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "stderr: {err}");
    assert!(err.contains("bad_key"), "stderr: {err}");
}

#[test]
fn job_file_tolerance_override_applies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.cfg");
    std::fs::write(
        &path,
        "command = check-fe\n\
         phi = exp(x)\n\
         f = 1\n\
         t = 0.5\n\
         domain = 0 1\n\
         tol-fe-residual = 10\n",
    )
    .unwrap();
    let out = run(&["job", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["threshold"].as_f64().unwrap(), 10.0);
}

#[test]
fn repeated_runs_are_byte_identical_modulo_timestamp() {
    let strip = |out: &Output| -> String {
        String::from_utf8(out.stdout.clone())
            .unwrap()
            .lines()
            .filter(|l| !l.contains("generated_at"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let args = [
        "classify", "--f", "1", "--g", "exp(x)", "--domain", "0", "1", "--weighted",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn oracle_route_confirms_matching_h() {
    let out = run(&[
        "classify", "--f", "1", "--g", "log(x)", "--domain", "1", "3",
        "--h", "log(x)", "--t", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["oracle"]["pass"], true);
    assert_eq!(v["oracle"]["p"].as_f64().unwrap(), 0.0);
}
