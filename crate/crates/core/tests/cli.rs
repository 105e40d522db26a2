//! End-to-end checks of the `deckwalker` binary: subcommands, exit codes,
//! output files, and determinism of the written artifacts.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deckwalker"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("deckwalker_cli_{name}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

#[test]
fn run_builtin_case2_writes_outputs() {
    let dir = tmp("run");
    let out = bin()
        .args(["run", "--case", "case2", "--controller", "adaptive", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 7502); // header + samples
    assert!(trace.lines().next().unwrap().starts_with("t,x_pos,"));

    let metrics = std::fs::read_to_string(dir.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("case,controller,rmse"));
    assert!(metrics.contains("adaptive"));

    let summary = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(summary.contains("status:     completed"));
    assert!(summary.contains("FIT"));

    for panel in ["xs0c.dat", "e_pos.dat", "tau.dat", "v.dat", "zeta.dat", "steps.dat"] {
        assert!(dir.join("plots").join(panel).exists(), "missing {panel}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn run_is_byte_deterministic() {
    let a = tmp("det_a");
    let b = tmp("det_b");
    for dir in [&a, &b] {
        let out = bin()
            .args(["run", "--case", "case3", "--controller", "pd_ff", "--out"])
            .arg(dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    let ta = std::fs::read(a.join("trace.csv")).unwrap();
    let tb = std::fs::read(b.join("trace.csv")).unwrap();
    assert_eq!(ta, tb, "traces differ between identical runs");
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
}

#[test]
fn scenario_file_roundtrip() {
    let dir = tmp("scenario");
    let scenario = dir.join("s.toml");
    std::fs::write(
        &scenario,
        "[surface]\ncase = \"case1\"\n\n[controller]\nkind = \"pd_ff\"\n\n[output]\ntrace = \"mytrace.csv\"\n",
    )
    .unwrap();
    let out = bin().arg("run").arg("--scenario").arg(&scenario).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("mytrace.csv").exists());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn malformed_scenario_exits_2_with_line_diagnostic() {
    let dir = tmp("bad");
    let scenario = dir.join("bad.toml");
    std::fs::write(&scenario, "[gait]\nstep_perod = 0.5\n").unwrap();
    let out = bin().arg("run").arg("--scenario").arg(&scenario).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "diagnostic without location: {err}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn starved_torque_exits_3_and_keeps_partial_trace() {
    let dir = tmp("diverge");
    let scenario = dir.join("s.toml");
    std::fs::write(
        &scenario,
        "[gait]\ntorque_limit = 0.001\n\n[surface]\ncase = \"case2\"\n\n[controller]\nkind = \"pd_ff\"\n",
    )
    .unwrap();
    let out = bin().arg("run").arg("--scenario").arg(&scenario).arg("--out").arg(&dir).output().unwrap();
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert!(trace.lines().count() > 100, "partial trace missing");
    let summary = std::fs::read_to_string(dir.join("summary.txt")).unwrap();
    assert!(summary.contains("DIVERGED"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn compare_emits_table_and_ordering() {
    let dir = tmp("compare");
    let out = bin()
        .args(["compare", "--case", "case2", "--controllers", "pd_ff,adaptive", "--json", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pd_ff"));
    assert!(stdout.contains("adaptive"));
    assert!(stdout.contains("ordering"));

    let table = std::fs::read_to_string(dir.join("compare_case2.txt")).unwrap();
    assert!(table.contains("RMSE"));
    let csv = std::fs::read_to_string(dir.join("compare_case2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let json = std::fs::read_to_string(dir.join("compare_case2.json")).unwrap();
    assert!(json.contains("\"case\":\"case2\""));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn compare_rejects_empty_controllers() {
    let dir = tmp("compare_empty");
    let out = bin()
        .args(["compare", "--case", "case1", "--controllers", "", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn verify_passes_and_emits_json() {
    let out = bin().args(["verify", "--json"]).output().unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"all_passed\":true"), "{stdout}");
}

#[test]
fn verify_negative_control_fails_on_loose_riccati_tolerance() {
    let out = bin().args(["verify", "--dare-tol", "0.01"]).output().unwrap();
    assert_eq!(code(&out), 1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL] dare_residual"), "{stdout}");
}

#[test]
fn unknown_case_id_is_a_config_error() {
    let dir = tmp("unknown_case");
    let out = bin().args(["run", "--case", "case9", "--out"]).arg(&dir).output().unwrap();
    assert_eq!(code(&out), 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn metrics_recompute_from_csv_matches_reported_metrics() {
    // The CSV is written with round-trip formatting; recomputing RMSE from
    // the file must reproduce the in-process value exactly.
    let dir = tmp("roundtrip");
    let out = bin()
        .args(["run", "--case", "case2", "--controller", "pd_ff", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);

    let metrics_line = std::fs::read_to_string(dir.join("metrics.csv")).unwrap();
    let reported_rmse: f64 =
        metrics_line.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();

    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    let mut sum = 0.0;
    let mut n = 0usize;
    for line in trace.lines().skip(1) {
        let mut fields = line.split(',');
        let t: f64 = fields.next().unwrap().parse().unwrap();
        if !(5.0..=15.0).contains(&t) {
            continue;
        }
        let e: f64 = line.split(',').nth(7).unwrap().parse().unwrap();
        sum += e * e;
        n += 1;
    }
    let recomputed = (sum / n as f64).sqrt();
    assert_eq!(recomputed, reported_rmse, "CSV round-trip drifted");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn header_path_is_stable() {
    // The trace column list is part of the tool's contract.
    let dir = tmp("columns");
    let out = bin().args(["run", "--case", "case1", "--controller", "pd_ff", "--out"]).arg(&dir).output().unwrap();
    assert_eq!(code(&out), 0);
    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    let header: Vec<&str> = trace.lines().next().unwrap().split(',').collect();
    assert_eq!(header, deckwalker::sim::TRACE_COLUMNS);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn seed_flag_changes_noisy_runs_only() {
    let dir = tmp("seed");
    let scenario = dir.join("s.toml");
    std::fs::write(
        &scenario,
        "[surface]\ncase = \"case2\"\n\n[sim]\nnoise_std = 0.0001\nduration = 15.0\n",
    )
    .unwrap();
    let run = |seed: &str, sub: &str| {
        let out_dir = dir.join(sub);
        std::fs::create_dir_all(&out_dir).unwrap();
        let out = bin()
            .arg("run")
            .arg("--scenario")
            .arg(&scenario)
            .arg("--seed")
            .arg(seed)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        std::fs::read(out_dir.join("trace.csv")).unwrap()
    };
    let a = run("1", "a");
    let b = run("2", "b");
    let c = run("1", "c");
    assert_ne!(a, b, "different seeds must differ under noise");
    assert_eq!(a, c, "same seed must reproduce exactly");
    let _ = std::fs::remove_dir_all(&dir);
}
