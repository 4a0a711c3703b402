use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ptpfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptpfix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_s = path.to_str().unwrap().to_string();
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path_s]);
    let out = ptpfix(&full);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path_s
}

fn analyze(path: &str) -> (i32, Value) {
    let out = ptpfix(&["analyze", path]);
    let report = serde_json::from_slice(&out.stdout).expect("JSON report");
    (out.status.code().unwrap(), report)
}

fn verify_lines(path: &str) -> (i32, Vec<Value>) {
    let out = ptpfix(&["verify-lemmas", path, "--samples", "40"]);
    let lines = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("JSON line"))
        .collect();
    (out.status.code().unwrap(), lines)
}

#[test]
fn depolarizing_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(
        dir.path(),
        "dep.json",
        &["depolarizing", "--dim", "3", "--p", "0.7"],
    );
    let (code, rep) = analyze(&f);
    assert_eq!(code, 0);
    assert_eq!(rep["status"], "certified");
    assert_eq!(rep["fixed_dim"], 1);
    assert_eq!(rep["input_projected"], true);
    assert_eq!(rep["blocks"].as_array().unwrap().len(), 1);
    assert_eq!(rep["blocks"][0]["dim"], 3);
    assert_eq!(rep["tolerances"]["tol_cert"], 1e-6);
}

#[test]
fn transpose_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(dir.path(), "t.json", &["transpose", "--dim", "2"]);
    let (code, rep) = analyze(&f);
    assert_eq!(code, 0);
    assert_eq!(rep["flags"]["completely_positive"], false);
    assert!((rep["flags"]["choi_min_eigenvalue"].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert_eq!(rep["fixed_dim"], 3);
    assert_eq!(rep["blocks"].as_array().unwrap().len(), 2);
    assert_eq!(rep["classes"][0]["case"]["kind"], "half");
    assert_eq!(rep["classes"][0]["blocks"], serde_json::json!([1, 2]));
}

#[test]
fn spec_case_partition_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(
        dir.path(),
        "s.json",
        &[
            "spec-case",
            "--m",
            "2",
            "--r",
            "0.75,0.25",
            "--partition",
            "1;2",
            "--l",
            "2",
        ],
    );
    let text = fs::read_to_string(&f).unwrap();
    let (psi, meta) = ptpfix::io::parse_channel(&text).unwrap();
    assert_eq!(meta.unwrap()["kind"], "spec-case");
    let planted = ptpfix::zoo::spec_case_projector(
        2,
        &[0.75, 0.25],
        &ptpfix::CaseKind::Partition {
            s0: vec![1],
            s1: vec![2],
        },
        2,
    )
    .unwrap();
    assert!((psi.natural() - planted.natural()).norm() <= 1e-12);

    let (code, rep) = analyze(&f);
    assert_eq!(code, 0);
    assert_eq!(rep["flags"]["completely_positive"], false);
    let case = &rep["classes"][0]["case"];
    assert_eq!(case["kind"], "partition");
    assert_eq!(case["s0"], serde_json::json!([1]));
    assert_eq!(case["s1"], serde_json::json!([2]));
}

#[test]
fn conditional_expectation_report() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(
        dir.path(),
        "ce.json",
        &["conditional-expectation", "--blocks", "2:0.75,0.25;1:1"],
    );
    let (code, rep) = analyze(&f);
    assert_eq!(code, 0);
    assert_eq!(rep["fixed_dim"], 5);
    assert_eq!(rep["cptp_form"]["fixed_dim"], 5);
    let mut dims: Vec<(u64, u64)> = rep["cptp_form"]["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f["dim_y"].as_u64().unwrap(), f["dim_z"].as_u64().unwrap()))
        .collect();
    dims.sort();
    assert_eq!(dims, vec![(1, 1), (2, 2)]);
}

#[test]
fn generation_and_reports_are_deterministic() {
    let args = [
        "generate",
        "random-cptp",
        "--dim",
        "3",
        "--kraus",
        "4",
        "--seed",
        "7",
    ];
    let (a, b) = (ptpfix(&args), ptpfix(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let other = ptpfix(&[
        "generate",
        "random-cptp",
        "--dim",
        "3",
        "--kraus",
        "4",
        "--seed",
        "8",
    ]);
    assert_ne!(a.stdout, other.stdout);

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("r.json");
    fs::write(&f, &a.stdout).unwrap();
    let f = f.to_str().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let run = ptpfix(&["analyze", f, "--seed", "11", "--out", out.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(0));
        assert!(run.stdout.is_empty());
    }
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn verify_passes_on_a_projector_and_notes_projection() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(
        dir.path(),
        "h.json",
        &[
            "spec-case",
            "--m",
            "2",
            "--r",
            "0.75,0.25",
            "--half",
            "--l",
            "2",
        ],
    );
    let (code, lines) = verify_lines(&f);
    assert_eq!(code, 0);
    assert!(lines.iter().all(|l| l["status"] != "fail"));
    assert_eq!(lines.last().unwrap()["summary"]["failed"], 0);

    let f = generate(
        dir.path(),
        "d.json",
        &["depolarizing", "--dim", "2", "--p", "0.5"],
    );
    let (code, lines) = verify_lines(&f);
    assert_eq!(code, 0);
    assert_eq!(lines[0]["input_projected"], true);
}

#[test]
fn corrupted_natural_matrix_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let f = generate(
        dir.path(),
        "c.json",
        &["conditional-expectation", "--blocks", "3:1"],
    );
    let mut chan: Value = serde_json::from_str(&fs::read_to_string(&f).unwrap()).unwrap();
    // Identity on C^3; zero the (1,3) and (3,1) actions: a broken transitivity.
    for (row, col) in [(6, 6), (2, 2)] {
        chan["natural"][row][col] = serde_json::json!([0.0, 0.0]);
    }
    fs::write(&f, chan.to_string()).unwrap();
    let (code, lines) = verify_lines(&f);
    assert_eq!(code, 3);
    assert!(lines.iter().any(|l| l["status"] == "fail"));
    assert!(lines.last().unwrap()["summary"]["failed"].as_u64().unwrap() >= 1);
}

#[test]
fn malformed_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(&f, "{\"dim\": 2,\n \"natural\": [[[1, 0]]").unwrap();
    let out = ptpfix(&["analyze", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    fs::write(&f, r#"{"dim": 2, "natural": [[[1, 0]]]}"#).unwrap();
    assert_eq!(
        ptpfix(&["analyze", f.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        ptpfix(&["analyze", "/nonexistent/channel.json"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ptpfix(&["generate", "depolarizing", "--dim", "2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        ptpfix(&["generate", "depolarizing", "--dim", "2", "--p", "1.5"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn non_positive_input_is_inconsistent() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("refl.json");
    // μ ↦ 2μᵀ − μ: trace preserving and Hermiticity preserving, not positive.
    let psi = ptpfix::SuperOperator::from_fn(2, |m| m.transpose().scale(2.0) - m);
    fs::write(&f, ptpfix::io::channel_to_json(&psi, None)).unwrap();
    let (code, rep) = analyze(f.to_str().unwrap());
    assert_eq!(code, 3);
    assert_eq!(rep["status"], "inconsistent");
    assert!(rep["flags"]["positivity_witness"].is_object());
}
