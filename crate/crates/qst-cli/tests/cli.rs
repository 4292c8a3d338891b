//! End-to-end checks of the `qst` binary: exit codes, config-file override
//! precedence, and output shapes.

use std::process::Command;

fn qst() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qst"))
}

#[test]
fn missing_required_option_exits_2() {
    let out = qst().args(["spectrum", "--protocol", "uniform"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("--n"), "stderr: {err}");
}

#[test]
fn unknown_protocol_exits_2() {
    let out = qst().args(["spectrum", "--protocol", "ising", "--n", "8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_chain_length_exits_2() {
    let out = qst()
        .args(["evolve", "--protocol", "weak-block-2q", "--n", "3", "--xi", "0.1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_mode_reported_for_odd_uniform() {
    let out = qst().args(["spectrum", "--protocol", "uniform", "--n", "7"]).output().unwrap();
    assert!(out.status.success());
    let report = String::from_utf8(out.stderr).unwrap();
    assert!(report.contains("\"has_zero_mode\": true"), "stderr: {report}");
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 8); // header + 7 rows
}

#[test]
fn evolve_zero_horizon_gives_single_row() {
    let out = qst()
        .args(["evolve", "--protocol", "uniform", "--n", "4", "--t-max", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "time,fbar,re_f_s1r1,abs_f_s1r1,abs_g");
    assert!(lines[1].starts_with("0.00000000000e0,5.00000000000e-1"));
}

#[test]
fn empty_sweep_emits_header_only() {
    let out = qst()
        .args(["sweep", "--protocol", "uniform", "--n-list", "", "--xi-list", ""])
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv, "protocol,N,xi,threshold,tau,fbar_at_tau,delta_omega,tau_predicted,reached\n");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("qst.cfg");
    std::fs::write(&cfg, "protocol=uniform\nn=5\n").unwrap();

    // config alone: 5 eigenvalues
    let out = qst().arg("spectrum").arg("--config").arg(&cfg).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 6);

    // flag wins over the file value
    let out = qst().args(["spectrum", "--n", "9", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 10);
}

#[test]
fn bad_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "not a key value line\n").unwrap();
    let out = qst().args(["spectrum", "--n", "4"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_small_passes() {
    let out = qst().args(["verify", "--n-max", "6", "--times", "3"]).output().unwrap();
    assert!(out.status.success());
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.contains("status=ok"), "report: {report}");
}

#[test]
fn fit_reports_expected_fields() {
    let out = qst()
        .args([
            "fit",
            "--protocol",
            "weak-block-2q",
            "--n-list",
            "12",
            "--xi-list",
            "0.05,0.02,0.01",
            "--vs",
            "xi",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).expect("fit output is JSON");
    assert!(json["exponent"].as_f64().unwrap() < 0.0);
    assert_eq!(json["n_samples"].as_u64(), Some(3));
    assert_eq!(json["n_excluded"].as_u64(), Some(0));
}
