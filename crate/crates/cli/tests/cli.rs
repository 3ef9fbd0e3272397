//! End-to-end checks of the binary: exit codes, artifacts, determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_nilflow")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nilflow-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

#[test]
fn analyze_reports_structure() {
    let out = tmpdir("analyze");
    let o = run(&["analyze", &data("heisenberg.alg"), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("result.dim = 3"));
    assert!(text.contains("result.step = 2"));
    assert!(text.contains("result.central_series_dims = [3, 1, 0]"));
    assert!(out.join("analyze_report.txt").exists());
    assert!(out.join("analyze_report.json").exists());
}

#[test]
fn missing_file_is_usage_error() {
    let o = run(&["analyze", "no-such-file.alg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_algebra_is_validation_error() {
    let out = tmpdir("badalg");
    let bad = out.join("bad.alg");
    std::fs::write(&bad, "dim: 3\nstep: 1\nlayers: 3\nbrackets:\n  [1, 2, 3, 1]\n").unwrap();
    let o = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["orbit", &data("heisenberg.alg")]).status.code(), Some(2));
    assert_eq!(
        run(&["analyze", &data("heisenberg.alg"), "--bogus", "1"]).status.code(),
        Some(2)
    );
    let o = run(&["orbit", &data("heisenberg.alg"), "--lambda", "0,0", "--X", "1,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn adapt_rejects_degenerate_input() {
    // λ vanishing on the center: not maximal rank.
    let o = run(&[
        "adapt",
        &data("heisenberg.alg"),
        "--lambda",
        "1,1,0",
        "--X",
        "1,0,0",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_worked_example_and_determinism() {
    let out1 = tmpdir("solve1");
    let out2 = tmpdir("solve2");
    let args = |out: &Path| {
        vec![
            "solve".to_string(),
            data("heisenberg.alg"),
            "--lambda".into(),
            "0,0,1".into(),
            "--X".into(),
            "1,0,0".into(),
            "--f".into(),
            "dgaussian".into(),
            "--grid-N".into(),
            "1024".into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let o1 = Command::new(bin()).args(args(&out1)).output().unwrap();
    assert!(o1.status.success(), "{}", String::from_utf8_lossy(&o1.stderr));
    let text = String::from_utf8(o1.stdout).unwrap();
    assert!(text.contains("result.obstruction_free = true"));
    let o2 = Command::new(bin()).args(args(&out2)).output().unwrap();
    assert!(o2.status.success());
    // Byte-identical artifacts across runs with the same config.
    let csv1 = std::fs::read(out1.join("solve.csv")).unwrap();
    let csv2 = std::fs::read(out2.join("solve.csv")).unwrap();
    assert_eq!(csv1, csv2);
    let rep1 = std::fs::read(out1.join("solve_report.json")).unwrap();
    let rep2 = std::fs::read(out2.join("solve_report.json")).unwrap();
    // Reports differ only in the --out path; normalize it away.
    let norm = |raw: &[u8], out: &Path| {
        String::from_utf8(raw.to_vec())
            .unwrap()
            .replace(out.to_str().unwrap(), "OUT")
    };
    assert_eq!(norm(&rep1, &out1), norm(&rep2, &out2));
}

#[test]
fn solve_hermite_mode() {
    let out = tmpdir("hermite");
    let o = run(&[
        "solve",
        &data("heisenberg.alg"),
        "--lambda",
        "0,0,2",
        "--X",
        "1,0,0",
        "--f",
        "hermite(0)",
        "--mode",
        "hermite",
        "--grid-N",
        "1024",
        "--grid-L",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("result.hermite_full_norm_alpha"));
    // Hermite mode refuses non-standard pairs.
    let o = run(&[
        "solve",
        &data("filiform4.alg"),
        "--lambda",
        "0,0,0,1",
        "--X",
        "1,0,0,0",
        "--f",
        "gaussian",
        "--mode",
        "hermite",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_part2_request_with_obstruction_exits_three() {
    let out = tmpdir("solve3");
    let o = run(&[
        "solve",
        &data("heisenberg.alg"),
        "--lambda",
        "0,0,1",
        "--X",
        "1,0,0",
        "--f",
        "gaussian",
        "--ells",
        "0,1",
        "--grid-N",
        "1024",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("obstruction"), "stderr: {err}");
}

#[test]
fn json_mode_emits_stable_schema() {
    let out = tmpdir("json");
    let o = run(&[
        "orbit",
        &data("heisenberg.alg"),
        "--lambda",
        "0,0,2",
        "--X",
        "1,0,0",
        "--json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with('{') && text.trim_end().ends_with('}'));
    for key in [
        "\"config\"",
        "\"result\"",
        "\"maximal_rank\"",
        "\"delta_sq\"",
        "\"w_k\"",
        "\"radical_basis\"",
    ] {
        assert!(text.contains(key), "missing {key} in {text}");
    }
}

#[test]
fn diophantine_rational_and_irrational() {
    let out = tmpdir("dio");
    let o = run(&[
        "diophantine",
        "--omega",
        "1,3/7",
        "--mmax",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("result.irrational_in_range = false"));
    assert!(text.contains("result.rational_relation_witness = [3, -7]"));

    let o = run(&[
        "diophantine",
        "--omega",
        "1,0.618033988749894903",
        "--mmax",
        "2000",
        "--csv-shells",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("diophantine.csv")).unwrap();
    assert_eq!(csv.lines().count(), 51); // header + 50 shells
    assert!(csv.starts_with("shell,shell_min,record\n"));
}

#[test]
fn simulate_character_rows() {
    let out = tmpdir("sim");
    let o = run(&[
        "simulate",
        &data("heisenberg.alg"),
        "--X",
        "1,1.6180339887,0",
        "--obs",
        "char:1,-1",
        "--T",
        "10,100",
        "--dt",
        "0.05",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("result.closed_form_agreement = true"));
    let csv = std::fs::read_to_string(out.join("simulate.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    // Under-resolved dt is a validation error.
    let o = run(&[
        "simulate",
        &data("heisenberg.alg"),
        "--X",
        "5,3,0",
        "--obs",
        "char:4,4",
        "--T",
        "10",
        "--dt",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_coboundary_bounded_average() {
    let out = tmpdir("simcob");
    let o = run(&[
        "simulate",
        &data("heisenberg.alg"),
        "--X",
        "1,1.6180339887,0",
        "--obs",
        "cob:0.5@1,0;-0.25@1,-1",
        "--T",
        "10,1000",
        "--dt",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("result.primitive_sup_bound"));
}
