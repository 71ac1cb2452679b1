use std::process::{Command, Output};

use loopalg::LinkBasis;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loopalg"));
    cmd.args(args).env_remove("LOOPALG_PRECISION");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn links(v: &Value) -> Vec<(u64, u64)> {
    v.as_array().unwrap().iter().map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap())).collect()
}

#[test]
fn basis_lists_six_states_in_canonical_order() {
    let out = run(&["basis", "--N", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    let expected: Vec<String> = LinkBasis::new(4).unwrap().states().iter().map(|s| s.to_string()).collect();
    let listed: Vec<String> = rows.iter().map(|r| r.split(',').nth(2).unwrap().to_string()).collect();
    assert_eq!(listed, expected);
    let defects: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    assert_eq!(defects, ["0", "0", "2", "2", "2", "4"]);
}

#[test]
fn jordan_at_half_pi_links_two_to_zero_and_six_to_four() {
    let out = run(&["jordan", "--N", "6", "--lambda", "1/2", "--u", "0.3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(links(&v["predicted_links"]), [(2, 0), (6, 4)]);
    assert_eq!(links(&v["detected_links"]), [(2, 0), (6, 4)]);
    assert_eq!(v["agrees"], Value::Bool(true));
    let table = stdout(&run(&["jordan", "--N", "6", "--lambda", "1/2", "--u", "0.3"]));
    assert!(table.contains("predicted links (Λ/π = 1/2): {(2,0),(6,4)}"), "{table}");
    assert!(table.contains("detected links:  {(2,0),(6,4)}"), "{table}");
}

#[test]
fn appendix_b_suite_passes() {
    let out = run(&["verify", "--suite", "appendixB", "--N", "4", "--lambda", "2/5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).starts_with("[PASS] appendixB"));
}

#[test]
fn numbered_criterion_runs() {
    let out = run(&["verify", "--suite", "3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["checks"][0]["id"], "3");
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn capacity_errors_name_the_limiting_parameter() {
    for args in [
        &["dmatrix", "--N", "15", "--lambda", "1/3"][..],
        &["basis", "--N", "21"][..],
        &["jordan", "--N", "13", "--lambda", "1/3"][..],
        &["potts", "--N", "8", "--M", "2", "--Q", "2", "--u", "0.3"][..],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        let err = stderr(&out);
        assert!(err.contains("N = ") || err.contains("N ≤"), "{args:?}: {err}");
    }
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["basis"][..],
        &["dmatrix", "--N", "4", "--lambda", "1/0"][..],
        &["dmatrix", "--N", "4", "--lambda", "abc"][..],
        &["jordan", "--N", "4", "--lambda", "1/3", "--tol", "-1"][..],
        &["potts", "--N", "4", "--lambda", "1/4", "--Q", "3"][..],
        &["verify", "--suite", "nonsense"][..],
        &["basis", "--N", "4", "--format", "xml"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    let out = run_env(&["basis", "--N", "2"], &[("LOOPALG_PRECISION", "quad")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    let out = run(&["potts", "--N", "2", "--M", "1", "--Q", "2", "--u", "0.3", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("result: FAIL"));
}

#[test]
fn potts_csv_has_the_result_columns() {
    let out = run(&["potts", "--N", "4", "--M", "1", "--Q", "3", "--u", "0.2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,M,Q,u,Z_spin,Z_fk,Z_loop,max_rel_dev"));
    assert!(lines.next().unwrap().starts_with("4,1,"));
}

#[test]
fn decimal_lambda_disables_predictions_with_a_notice() {
    let out = run(&["jordan", "--N", "4", "--lambda", "0.7", "--u", "0.2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("notice"));
    let v = json(&out);
    assert!(v["predicted_links"].is_null());
    assert!(links(&v["detected_links"]).is_empty());
}

#[test]
fn identical_configuration_gives_identical_bytes() {
    for args in [
        &["jordan", "--N", "6", "--lambda", "1/3", "--seed", "7", "--format", "json"][..],
        &["dmatrix", "--N", "5", "--lambda", "2/7", "--seed", "7", "--format", "csv"][..],
        &["potts", "--N", "4", "--M", "2", "--Q", "2", "--seed", "11"][..],
        &["verify", "--suite", "5", "--seed", "3", "--format", "json"][..],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let other = run(&["jordan", "--N", "6", "--lambda", "1/3", "--seed", "8", "--format", "json"]);
    let first = json(&run(&["jordan", "--N", "6", "--lambda", "1/3", "--seed", "7", "--format", "json"]));
    assert_ne!(json(&other)["u"], first["u"], "the seed draws u");
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["potts", "--N", "4", "--M", "1", "--Q", "2", "--u", "0.3", "--format", "json"];
    let one = run(&[&args[..], &["--threads", "1"]].concat());
    let two = run(&[&args[..], &["--threads", "2"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn environment_overrides_precision_flag() {
    let out = run_env(&["dmatrix", "--N", "3", "--lambda", "1/3", "--u", "0.2", "--precision", "double", "--format", "json"], &[("LOOPALG_PRECISION", "extended")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["precision"], "extended");
    let double = json(&run(&["dmatrix", "--N", "3", "--lambda", "1/3", "--u", "0.2", "--format", "json"]));
    assert_eq!(double["precision"], "double");
    let (x, y) = (v["matrix"]["data"].as_array().unwrap(), double["matrix"]["data"].as_array().unwrap());
    for (p, q) in x.iter().zip(y) {
        assert!((p[0].as_f64().unwrap() - q[0].as_f64().unwrap()).abs() < 1e-13);
    }
}

#[test]
fn matrix_exports_have_matching_shapes() {
    let csv = stdout(&run(&["fmatrix", "--N", "4", "--lambda", "1/5", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().all(|l| l.split(',').count() == 6));
    let v = json(&run(&["fmatrix", "--N", "4", "--lambda", "1/5", "--format", "json"]));
    assert_eq!(v["matrix"]["rows"], 6);
    assert_eq!(v["matrix"]["data"].as_array().unwrap().len(), 36);
}

#[test]
fn spectrum_covers_every_state() {
    let v = json(&run(&["spectrum", "--N", "6", "--lambda", "1/4", "--u", "0.3", "--format", "json"]));
    let total: usize = v["sectors"].as_array().unwrap().iter().map(|s| s["eigenvalues"].as_array().unwrap().len()).sum();
    assert_eq!(total, 20);
}
