//! End-to-end tests running the binary on model files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_qecsense")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

const GELL_MANN_MODEL: &str = r#"{
  "dimension": 3,
  "hamiltonian": [
    [[0,0],[0,0],[0,-1]],
    [[0,0],[0,0],[0,0]],
    [[0,1],[0,0],[0,0]]
  ],
  "jumps": [
    [[[0,0],[1,0],[0,0]],[[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],
    [[[0,0],[0,-1],[0,0]],[[0,1],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],
    [[[0,0],[0,0],[1,0]],[[0,0],[0,0],[0,0]],[[1,0],[0,0],[0,0]]]
  ]
}"#;

#[test]
fn design_rejects_non_commuting_model_with_exit_two() {
    let dir = tmp_dir("gell_mann");
    let model = dir.join("model.json");
    fs::write(&model, GELL_MANN_MODEL).unwrap();
    let output = run(&["design", "--model", model.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr(&output));
    assert!(
        stderr(&output).contains("non-commuting"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn design_reports_code_for_commuting_model() {
    let dir = tmp_dir("commuting");
    let model = dir.join("model.json");
    fs::write(
        &model,
        r#"{
          "dimension": 4,
          "hamiltonian": [
            [[3,0],[0,0],[0,0],[0,0]],
            [[0,0],[1,0],[0,0],[0,0]],
            [[0,0],[0,0],[-1,0],[0,0]],
            [[0,0],[0,0],[0,0],[-3,0]]
          ],
          "jumps": [
            [[[1,0],[0,0],[0,0],[0,0]],
             [[0,0],[1,0],[0,0],[0,0]],
             [[0,0],[0,0],[-1,0],[0,0]],
             [[0,0],[0,0],[0,0],[-1,0]]]
          ],
          "rates": [1.0]
        }"#,
    )
    .unwrap();
    let out_path = dir.join("design.json");
    let output = run(&[
        "design",
        "--model",
        model.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((report["lp_value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((report["qfi_coefficient"].as_f64().unwrap() - 4.0).abs() < 1e-7);
    assert_eq!(report["kl"]["passes"], serde_json::Value::Bool(true));
}

#[test]
fn ring_sensitivities_match_ghz() {
    let output = run(&["dephasing", "--ring", "N=6", "--alpha", "0.5,0.2,0.1"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,hnls,eta1,eta_par,eta_ghz,eta_qec,best_u"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "6");
    let eta_ghz: f64 = row[4].parse().unwrap();
    let eta_qec: f64 = row[5].parse().unwrap();
    assert!((eta_ghz - eta_qec).abs() < 1e-10 * eta_ghz);
}

#[test]
fn bosonic_exact_support_ratio_is_one() {
    let dir = tmp_dir("bosonic");
    let out_path = dir.join("cheb.csv");
    let output = run(&[
        "bosonic",
        "--s",
        "2",
        "--M",
        "100",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,M,ratio,F_coeff,F_opt_bound,binomial_ratio");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ratio: f64 = row[2].parse().unwrap();
    assert_eq!(ratio, 1.0);
}

#[test]
fn design_report_numeric_fields_round_trip() {
    let dir = tmp_dir("roundtrip");
    let out_path = dir.join("design.json");
    let output = run(&[
        "dephasing",
        "--ring",
        "N=5",
        "--alpha",
        "-0.2,0.05",
        "--design",
        "beyond",
        "--out",
        dir.join("sens.csv").to_str().unwrap(),
        "--design-out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = fs::read_to_string(&out_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    // re-serialize and re-parse: every numeric field must round-trip to
    // the very same bits
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    let profile: Vec<f64> = parsed["profile"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let profile2: Vec<f64> = reparsed["profile"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (a, b) in profile.iter().zip(&profile2) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(
        parsed["qfi_coefficient"].as_f64().unwrap().to_bits(),
        reparsed["qfi_coefficient"].as_f64().unwrap().to_bits()
    );
}

#[test]
fn invalid_correlation_entry_names_the_invariant() {
    let dir = tmp_dir("invalid_c");
    let model = dir.join("model.json");
    fs::write(
        &model,
        r#"{"N": 3, "T2": 1.0, "h": [1, 1, 1],
            "C": [[1.0, 1.5, 0.0], [1.5, 1.0, 0.0], [0.0, 0.0, 1.0]]}"#,
    )
    .unwrap();
    let output = run(&["sensitivity", "--model", model.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("[-1, 1]"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn schema_error_carries_json_pointer() {
    let dir = tmp_dir("bad_schema");
    let model = dir.join("model.json");
    fs::write(&model, r#"{"N": 3, "T2": 1.0, "h": [1, 1, "x"], "C": []}"#).unwrap();
    let output = run(&["sensitivity", "--model", model.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(
        stderr(&output).contains("/h/2"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn missing_file_is_an_io_error() {
    let output = run(&["sensitivity", "--model", "/nonexistent/x.json"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn hnls_violation_exits_two() {
    let dir = tmp_dir("hnls_violated");
    let model = dir.join("model.json");
    // H = Z with L = Z: the Hamiltonian is inside the span
    fs::write(
        &model,
        r#"{
          "dimension": 2,
          "hamiltonian": [[[1,0],[0,0]],[[0,0],[-1,0]]],
          "jumps": [[[[1,0],[0,0]],[[0,0],[-1,0]]]]
        }"#,
    )
    .unwrap();
    let output = run(&["design", "--model", model.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("HNLS is violated"));
}

#[test]
fn simulate_emits_trajectory_csv() {
    let output = run(&[
        "simulate",
        "--ring",
        "3",
        "--alpha",
        "-0.5",
        "--t",
        "0.01",
        "--dt",
        "0.001",
        "--omega",
        "1.0",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,codespace_pop,bloch_x,bloch_y,bloch_z");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11); // t = 0 plus ten recovery boundaries
    for row in rows {
        let fields: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(fields[1] > 0.999, "codespace population dropped: {row}");
    }
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let dir = tmp_dir("sweep");
    let out1 = dir.join("sweep1.csv");
    let out2 = dir.join("sweep2.csv");
    for (out, threads) in [(&out1, "1"), (&out2, "4")] {
        let output = Command::new(binary())
            .args([
                "sweep",
                "--task",
                "bosonic",
                "--grid",
                "s=2,3",
                "--grid",
                "M=60,100",
                "--out",
                out.to_str().unwrap(),
            ])
            .env("QECSENSE_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    }
    let text1 = fs::read_to_string(&out1).unwrap();
    let text2 = fs::read_to_string(&out2).unwrap();
    assert_eq!(text1, text2, "sweep output depends on worker count");
    let rows: Vec<&str> = text1.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("2,60"));
    assert!(rows[3].starts_with("3,100"));
}
