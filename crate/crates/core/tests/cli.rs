use std::process::{Command, Output};

use qbaker::experiments::read_trajectory_csv;
use qbaker::Dyadic;

fn qbaker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbaker")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn trajectory_csv_to_stdout() {
    let out = qbaker(&["trajectory", "--n-qubits", "3", "--bits", "110", "--m-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let recs = read_trajectory_csv(out.stdout.as_slice()).unwrap();
    assert_eq!(recs.len(), 4);
    assert_eq!(recs[1].r_quantum_exact, Dyadic::new(5, 3));
    assert_eq!(recs[3].r_quantum_exact, Dyadic::HALF);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let args = ["trajectory", "--n-qubits", "5", "--random-bits", "12", "--seed", "8", "--format", "json"];
    let to_stdout = qbaker(&args);
    let mut with_file = args.to_vec();
    with_file.extend(["--output", path.to_str().unwrap()]);
    assert_eq!(qbaker(&with_file).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    let v: serde_json::Value = serde_json::from_slice(&to_stdout.stdout).unwrap();
    assert_eq!(v["seed"], 8);
    assert_eq!(v["command"], "trajectory");
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["trajectory", "--n-qubits", "3", "--bits", "102"][..],
        &["trajectory", "--n-qubits", "3", "--bits", "1", "--m-max", "4"],
        &["trajectory", "--n-qubits", "0", "--bits", "1"],
        &["trajectory", "--n-qubits", "3"],
        &["timescale", "--n-qubits", "0-2", "--bits", "1"],
        &["matrix-dump", "--n-qubits", "2", "--operator", "qft", "--m", "1"],
        &["verify", "--suite", "nope"],
        &["trajectory", "--n-qubits", "3", "--random-bits", "121"],
    ] {
        let out = qbaker(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn capacity_errors_exit_3() {
    for args in [
        &["trajectory", "--n-qubits", "25", "--bits", "1"][..],
        &["verify", "--n-max", "13"],
        &["matrix-dump", "--n-qubits", "13", "--operator", "position"],
    ] {
        assert_eq!(qbaker(args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn corrupted_bound_exits_1_with_counterexample() {
    let out = qbaker(&["verify", "--suite", "bounds", "--n-max", "2", "--corrupt-bound"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(stderr.contains("bound violated"), "{stderr}");
    assert!(stdout(&out).contains("bounds,false"));
}

#[test]
fn verify_passes() {
    let out = qbaker(&["verify", "--n-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for suite in ["unitarity", "theorem1", "bounds", "conjugacy"] {
        assert!(text.contains(&format!("\n{suite},true,")), "{text}");
    }
}

#[test]
fn empty_sweep_succeeds() {
    let out = qbaker(&["timescale", "--bits", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "n_qubits,m,t_h,divergence,bound,margin,saturated\n");
}

#[test]
fn matrix_dump_rows() {
    let out = qbaker(&["matrix-dump", "--n-qubits", "3", "--operator", "qft"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l.split(',').count() == 16));
}
