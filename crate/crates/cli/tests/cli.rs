//! End-to-end tests of the binary: exit codes, file formats, and
//! reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pufsec"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Strip the volatile timestamp line/field before comparing documents.
fn strip_timestamp(s: &str) -> String {
    s.lines()
        .filter(|l| !l.contains("timestamp"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn simulate_then_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.json");
    let out = run(&[
        "simulate",
        "--preset",
        "ledpuf",
        "--devices",
        "50",
        "--bits",
        "512",
        "--resamples",
        "2",
        "--seed",
        "7",
        "--output",
        pop.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(pop.exists());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&pop).unwrap()).unwrap();
    // module schema plus embedded meta
    assert!(doc.get("spec").is_some());
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["devices"].as_array().unwrap().len(), 50);
    assert_eq!(doc["tool"], "pufsec");
    assert!(doc.get("config").is_some());

    let out = run(&["report", "--input", pop.to_str().unwrap()]);
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // a stable population re-reads identically
    assert_eq!(rep["report"]["intra_fhd"]["mean"], 0.0);
    assert_eq!(rep["report"]["stability"], 1.0);
    let growth = rep["report"]["rates"]["growth_rate"].as_f64().unwrap();
    assert!((growth - 0.9980).abs() < 5e-3, "growth {growth}");
}

#[test]
fn report_on_sram_population_matches_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("sram.json");
    let out = run(&[
        "simulate",
        "--preset",
        "sram",
        "--devices",
        "10",
        "--resamples",
        "10",
        "--bits",
        "32768",
        "--seed",
        "11",
        "--output",
        pop.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["report", "--input", pop.to_str().unwrap()]);
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let intra = rep["report"]["intra_fhd"]["mean"].as_f64().unwrap();
    assert!((intra - 0.0226).abs() < 0.003, "intra {intra}");
    let growth = rep["report"]["rates"]["growth_rate"].as_f64().unwrap();
    assert!((growth - 0.8442).abs() < 0.002, "growth {growth}");
    // stability under the i.i.d. noise model: (1-d)^10 + d^10
    let stab = rep["report"]["stability"].as_f64().unwrap();
    let oracle = 0.9774f64.powi(10) + 0.0226f64.powi(10);
    assert!((stab - oracle).abs() < 0.02, "stability {stab} vs {oracle}");
}

#[test]
fn single_device_report_leaves_inter_absent() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("one.json");
    run(&[
        "simulate",
        "--preset",
        "sram",
        "--devices",
        "1",
        "--resamples",
        "3",
        "--bits",
        "256",
        "--output",
        pop.to_str().unwrap(),
    ]);
    let out = run(&["report", "--input", pop.to_str().unwrap()]);
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(rep["report"]["inter_fhd"].is_null());
    // CSV leaves the columns empty rather than zero
    let out = run(&["report", "--input", pop.to_str().unwrap(), "--format", "csv"]);
    let text = stdout(&out);
    let data_line = text.lines().last().unwrap();
    assert!(data_line.contains(",,"), "csv row: {data_line}");
}

#[test]
fn rerun_with_same_config_is_byte_identical_modulo_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |path: &Path| {
        vec![
            "simulate".to_string(),
            "--preset".into(),
            "ro20".into(),
            "--devices".into(),
            "5".into(),
            "--resamples".into(),
            "4".into(),
            "--bits".into(),
            "128".into(),
            "--seed".into(),
            "99".into(),
            "--output".into(),
            path.to_str().unwrap().to_string(),
        ]
    };
    assert!(bin().args(args(&a)).output().unwrap().status.success());
    assert!(bin().args(args(&b)).output().unwrap().status.success());
    let ta = strip_timestamp(&std::fs::read_to_string(&a).unwrap());
    let tb = strip_timestamp(&std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(!ta.is_empty());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("t1.json");
    let b = dir.path().join("t8.json");
    let base = [
        "simulate", "--preset", "sram", "--devices", "12", "--resamples", "3", "--bits", "512",
        "--seed", "5",
    ];
    let out = bin()
        .args(base)
        .args(["--threads", "1", "--output", a.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .args(base)
        .args(["--threads", "8", "--output", b.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        strip_timestamp(&std::fs::read_to_string(&a).unwrap()),
        strip_timestamp(&std::fs::read_to_string(&b).unwrap())
    );
}

#[test]
fn usage_errors_exit_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("never.json");
    let out = run(&[
        "simulate",
        "--preset",
        "nosuch",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!path.exists(), "no file may be created on a usage error");

    let out = run(&["analytic", "--curve", "nope", "--from", "0", "--to", "1", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["definitely-not-a-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_population_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"spec\": 12}").unwrap();
    let out = run(&["report", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["report", "--input", "/nonexistent/nowhere.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analytic_curves_spot_rows() {
    let out = run(&["analytic", "--curve", "renyi-half", "--from", "0.5", "--to", "0.5", "--step", "0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().last().unwrap().starts_with("0.5"));
    assert!(text.contains("1.000000"));

    let out = run(&["analytic", "--curve", "one-minus-hd", "--from", "0.1", "--to", "0.1", "--step", "0.1"]);
    let text = stdout(&out);
    assert!(text.contains("0.531"), "{text}");

    let out = run(&[
        "analytic", "--curve", "min-entropy", "--from", "0.31", "--to", "0.31", "--step", "0.1",
    ]);
    let text = stdout(&out);
    let val: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((val - 0.53).abs() < 0.01, "min-entropy row {val}");
}

#[test]
fn report_histogram_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.json");
    run(&[
        "simulate", "--preset", "ledpuf", "--devices", "40", "--resamples", "1", "--bits", "256",
        "--seed", "3", "--output", pop.to_str().unwrap(),
    ]);
    let out = run(&[
        "report", "--input", pop.to_str().unwrap(), "--bins", "20", "--histogram", "inter",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "fhd_bin_center,count");
    assert_eq!(rows.len(), 21);
    let total: u64 = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 40 * 39 / 2, "histogram counts all device pairs");
    // histogram without --bins is a usage error
    let out = run(&["report", "--input", pop.to_str().unwrap(), "--histogram", "inter"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_validate_exit_codes() {
    let out = run(&["oracle-validate", "--distributions", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["validation"]["all_passed"], true);

    // a deliberately corrupted tolerance makes the suite fail
    let out = run(&[
        "oracle-validate",
        "--distributions",
        "5",
        "--max-rate-gap",
        "0.0001",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strong_puf_respond_matches_reference_tag() {
    let key_hex = "0".repeat(128);
    let out = run(&[
        "strong-puf",
        "respond",
        "--key-hex",
        &key_hex,
        "--challenge-hex",
        "deadbeef",
    ]);
    assert!(out.status.success());
    // HMAC-SHA-256(64 zero bytes, 0xdeadbeef), independently computed
    assert_eq!(
        stdout(&out).trim(),
        "c30fc4a1f3887db6911cc1d7a662d582b557110446603bb82e6543db882b384e"
    );
    let out = run(&["strong-puf", "respond", "--key-hex", "0abc", "--challenge-hex", "00"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn strong_puf_sweeps() {
    let out = run(&[
        "strong-puf", "avalanche", "--flips-from", "0", "--flips-to", "2", "--challenges", "300",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "key_bit_flips,mean_fhd,std_fhd");
    let k0: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(k0, 0.0);
    let k1: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((k1 - 0.5).abs() < 0.02, "k=1 mean {k1}");

    let out = run(&[
        "strong-puf", "noise", "--levels", "0,0.001,0.05", "--trials", "500",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let means: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("weak"))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(means[0], 0.0);
    assert!((means[1] - 0.20).abs() < 0.04, "d=0.001 mean {}", means[1]);
    assert!((means[2] - 0.5).abs() < 0.02, "d=0.05 mean {}", means[2]);

    let out = run(&["strong-puf", "inter", "--devices", "200"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mean = doc["inter_fhd"]["mean"].as_f64().unwrap();
    assert!((mean - 0.5).abs() < 0.01, "inter mean {mean}");
}
