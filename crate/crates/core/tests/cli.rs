//! End-to-end checks of the command-line interface.

use std::fs;
use std::process::Command;

fn srrls() -> Command {
    Command::new(env!("CARGO_BIN_EXE_srrls"))
}

#[test]
fn list_algorithms_names_every_variant() {
    let out = srrls().arg("list-algorithms").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for label in [
        "RLS",
        "S-RLS",
        "RLM",
        "S-RRLS",
        "S-RRLS-OPT",
        "S-RRLS-OPT-RS",
        "JO-S-RRLS",
    ] {
        assert!(text.contains(label), "missing {label} in:\n{text}");
    }
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = srrls()
        .args([
            "run",
            "--case",
            "custom",
            "--runs",
            "2",
            "--iterations",
            "60",
            "--seed",
            "9",
            "--algorithms",
            "RLM,JO-S-RRLS",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(dir.path().join("nmsd.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "iteration,RLM,JO-S-RRLS");
    assert_eq!(lines.count(), 60);
    assert!(dir.path().join("config_resolved").exists());
    assert!(dir.path().join("plot_nmsd.py").exists());

    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("final NMSD"), "stdout: {stdout}");
}

#[test]
fn run_is_reproducible_byte_for_byte() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = srrls()
            .args([
                "run",
                "--case",
                "custom",
                "--runs",
                "3",
                "--iterations",
                "40",
                "--seed",
                "5",
                "--out",
            ])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let a = fs::read(dir_a.path().join("nmsd.csv")).unwrap();
    let b = fs::read(dir_b.path().join("nmsd.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn validate_accepts_resolved_output_and_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();

    let good = dir.path().join("good.cfg");
    fs::write(
        &good,
        "case = case1\nruns = 2\niterations = 50\nchange_at = none\n",
    )
    .unwrap();
    let out = srrls()
        .args(["validate", "--config"])
        .arg(&good)
        .output()
        .unwrap();
    assert!(out.status.success());
    let resolved = String::from_utf8(out.stdout).unwrap();
    assert!(resolved.contains("runs = 2"));
    assert!(resolved.contains("[algorithm JO-S-RRLS]"));

    // The printed resolved form is itself a valid configuration.
    let round = dir.path().join("resolved.cfg");
    fs::write(&round, &resolved).unwrap();
    let out = srrls()
        .args(["validate", "--config"])
        .arg(&round)
        .output()
        .unwrap();
    assert!(out.status.success());

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "case = case1\nnot_a_key = 3\n").unwrap();
    let out = srrls()
        .args(["validate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not_a_key"), "stderr: {err}");
}

#[test]
fn run_without_source_fails_with_message() {
    let out = srrls().arg("run").output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("--config") || err.contains("--case"),
        "stderr: {err}"
    );
}

#[test]
fn unknown_algorithm_label_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = srrls()
        .args([
            "run",
            "--case",
            "custom",
            "--runs",
            "1",
            "--iterations",
            "10",
            "--algorithms",
            "NOT-AN-ALGORITHM",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("NOT-AN-ALGORITHM"));
}
