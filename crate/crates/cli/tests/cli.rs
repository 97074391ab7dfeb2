use std::process::{Command, Output};

fn driftcorrect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftcorrect"))
        .args(args)
        .env_remove("DRIFTCORRECT_SEED")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses the CSV body after dropping `#` metadata lines.
fn body(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let data: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut reader = csv::Reader::from_reader(data.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn estimate_both_methods() {
    let out = driftcorrect(&[
        "estimate",
        "--counts",
        "40,10,5,45",
        "--alpha-star",
        "0.5",
        "--method",
        "both",
    ]);
    assert!(out.status.success());
    let (header, rows) = body(&stdout(&out));
    assert_eq!(header, ["method", "estimate", "out_of_range"]);
    assert_eq!(rows[0][0], "misclassification");
    assert!((num(&rows[0][1]) - 0.571429).abs() < 1e-6);
    assert_eq!(rows[1][0], "calibration");
    assert!((num(&rows[1][1]) - 0.535354).abs() < 1e-6);
    assert_eq!(rows[0][2], "false");
}

#[test]
fn estimate_flags_out_of_range() {
    let out = driftcorrect(&[
        "estimate",
        "--counts",
        "40,10,10,40",
        "--alpha-star",
        "0.1",
        "--method",
        "misclassification",
    ]);
    let (_, rows) = body(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert!(num(&rows[0][1]) < 0.0);
    assert_eq!(rows[0][2], "true");
}

#[test]
fn exit_codes() {
    let singular = driftcorrect(&[
        "mse-diff-curve",
        "--alpha",
        "0.3",
        "--n",
        "1000",
        "--p00",
        "0.5",
        "--p11",
        "0.5",
    ]);
    assert_eq!(singular.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&singular.stderr).contains("singular"));

    let empty_row = driftcorrect(&["estimate", "--counts", "0,0,5,45", "--alpha-star", "0.5"]);
    assert_eq!(empty_row.status.code(), Some(3));
    let bad_alpha = driftcorrect(&["estimate", "--counts", "1,1,1,1", "--alpha-star", "1.5"]);
    assert_eq!(bad_alpha.status.code(), Some(3));

    assert_eq!(driftcorrect(&["estimate", "--nope"]).status.code(), Some(2));
    assert_eq!(driftcorrect(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        driftcorrect(&["slope-curve", "--steps", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn slope_curve_columns_and_endpoints() {
    let out = driftcorrect(&["slope-curve", "--alpha", "0.05,0.3", "--steps", "4"]);
    let text = stdout(&out);
    assert!(text.contains("# command: slope-curve\n"));
    assert!(text.contains("# param alpha: 0.05,0.3\n"));
    let (header, rows) = body(&text);
    assert_eq!(
        header,
        ["p", "slope_alpha_0.05", "slope_alpha_0.3", "lower_bound"]
    );
    assert_eq!(rows.len(), 5);
    assert!(rows[0][1..].iter().all(|v| num(v) == 1.0));
    assert_eq!(num(&rows[4][0]), 1.0);
    assert!(rows[4][1..].iter().all(|v| num(v) == 0.0));
    assert_eq!(num(&rows[2][3]), 0.75);
}

#[test]
fn mse_diff_single_and_grid() {
    let out = driftcorrect(&[
        "mse-diff-curve",
        "--alpha",
        "0.3",
        "--n",
        "1000",
        "--p00",
        "0.7",
        "--p11",
        "0.7",
        "--delta-steps",
        "10",
    ]);
    let (header, rows) = body(&stdout(&out));
    assert_eq!(header, ["delta", "D"]);
    assert_eq!(rows.len(), 9);
    let at_zero = rows.iter().find(|r| num(&r[0]).abs() < 1e-12).unwrap();
    assert!((num(&at_zero[1]) - 1.13147e-3).abs() < 1e-8);

    let out = driftcorrect(&["mse-diff-curve", "--delta-steps", "4"]);
    let (header, rows) = body(&stdout(&out));
    assert_eq!(header, ["alpha", "n", "p00", "p11", "delta", "D"]);
    assert_eq!(rows.len(), 16 * 3);
}

#[test]
fn boundary_curve_marks_missing_roots() {
    let out = driftcorrect(&[
        "boundary-curve",
        "--alpha",
        "0.05",
        "--n",
        "50",
        "--steps",
        "20",
    ]);
    let text = stdout(&out);
    let (header, rows) = body(&text);
    assert_eq!(header, ["p", "delta_star", "found_flag"]);
    assert_eq!(rows.len(), 19);
    // Near p = 1/2 the calibration estimator wins for every drift.
    assert_eq!(rows[0][1], "NaN");
    assert_eq!(rows[0][2], "0");
    let found: Vec<f64> = rows
        .iter()
        .filter(|r| r[2] == "1")
        .map(|r| num(&r[1]))
        .collect();
    assert!(!found.is_empty());
    assert!(found.windows(2).all(|w| w[1] <= w[0]));
    assert!(text.contains("# not_found: D > 0 throughout:"));
}

#[test]
fn json_output_mirrors_csv() {
    let out = driftcorrect(&[
        "estimate",
        "--counts",
        "40,10,5,45",
        "--alpha-star",
        "0.5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["command"], "estimate");
    assert_eq!(v["meta"]["parameters"]["counts"], "40,10,5,45");
    assert_eq!(v["data"][1]["method"], "calibration");
    assert!((v["data"][0]["estimate"].as_f64().unwrap() - 0.571429).abs() < 1e-6);

    let out = driftcorrect(&[
        "boundary-curve",
        "--alpha",
        "0.05",
        "--n",
        "50",
        "--steps",
        "4",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["data"][0]["delta_star"].is_null());
}

#[test]
fn seed_flag_env_and_output_file() {
    let args = [
        "simulate", "--alpha", "0.3", "--n", "100", "--p00", "0.7", "--p11", "0.7", "--reps", "500",
    ];
    let default = stdout(&driftcorrect(&args));
    assert!(default.contains("# seed: 42\n"));

    let from_env = Command::new(env!("CARGO_BIN_EXE_driftcorrect"))
        .args(args)
        .env("DRIFTCORRECT_SEED", "7")
        .output()
        .unwrap();
    let from_env = String::from_utf8(from_env.stdout).unwrap();
    assert!(from_env.contains("# seed: 7\n"));
    assert_ne!(body(&from_env).1, body(&default).1);

    let dir = std::env::temp_dir().join(format!("driftcorrect-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sim.csv");
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_driftcorrect"))
        .args(args)
        .args(["--seed", "42", "--output", path.to_str().unwrap()])
        .env("DRIFTCORRECT_SEED", "7")
        .output()
        .unwrap();
    assert!(flag_wins.status.success() && flag_wins.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), default);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn simulate_reports_both_estimators() {
    let out = driftcorrect(&[
        "simulate", "--alpha", "0.3", "--delta", "0.1", "--n", "1000", "--p00", "0.7", "--p11",
        "0.7", "--reps", "20000",
    ]);
    assert!(out.status.success());
    let (header, rows) = body(&stdout(&out));
    assert_eq!(header[0], "estimator");
    assert_eq!(rows.len(), 2);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let c = &rows[1];
    assert_eq!(c[0], "calibration");
    assert!((num(&c[col("analytic_bias")]) + 0.086207).abs() < 1e-6);
    let z =
        (num(&c[col("empirical_bias")]) - num(&c[col("analytic_bias")])) / num(&c[col("se_bias")]);
    assert!(z.abs() < 4.0);
    assert_eq!(c[col("effective_replications")], "20000");
}

#[test]
fn verify_reports_every_check_and_exit_status() {
    let out = driftcorrect(&["verify", "--reps", "2000"]);
    let text = stdout(&out);
    let (header, rows) = body(&text);
    assert_eq!(rows.len(), 128);
    let passed = header.iter().position(|h| h == "passed").unwrap();
    let all_pass = rows.iter().all(|r| r[passed] == "true");
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 1 }));
    assert!(text.contains("# allowance_c: 38\n"));
}
