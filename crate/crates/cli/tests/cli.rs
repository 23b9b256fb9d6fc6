use std::process::{Command, Output};

use qkorobov_core::simulator::trace::from_json;
use serde_json::Value;

fn qkorobov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkorobov"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv(out: &Output) -> Vec<Vec<String>> {
    stdout(out)
        .lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn column(rows: &[Vec<String>], name: &str) -> Vec<String> {
    let k = rows[0]
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows[1..].iter().map(|r| r[k].clone()).collect()
}

fn f(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn eval_matches_hand_computed_interpolant() {
    let out = qkorobov(&["eval", "--fn", "prod-quad", "--d", "1", "--n", "2", "--x", "0.125,0.0"]);
    assert!(out.status.success());
    let rows = csv(&out);
    // 0.25·φ_{1,1}(1/8) + 0.0625·φ_{2,1}(1/8) = 0.25·0.25 + 0.0625·0.5
    assert_eq!(f(&column(&rows, "classical")[0]), 0.09375);
    assert!((f(&column(&rows, "circuit")[0]) - 0.09375).abs() <= 1e-9);
    assert_eq!(column(&rows, "width")[0], "4");
    for name in ["exact", "classical", "circuit"] {
        assert_eq!(f(&column(&rows, name)[1]), 0.0);
    }
}

#[test]
fn eval_two_dimensional_json() {
    let out = qkorobov(&[
        "eval",
        "--fn",
        "prod-quad",
        "--d",
        "2",
        "--n",
        "3",
        "--x",
        "0.3,0.7",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v[0]["abs_diff"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v[0]["resources"]["width"], 2 + v[0]["ancillas"].as_u64().unwrap() + 1);
}

#[test]
fn normalized_column_is_rescaled_value() {
    let out = qkorobov(&[
        "eval",
        "--expr",
        "sin(pi x)*x(1-x)",
        "--n",
        "3",
        "--x",
        "0.4,0.6",
        "--normalized",
    ]);
    assert!(out.status.success());
    let rows = csv(&out);
    let raw = f(&column(&rows, "normalized")[0]);
    let norm = f(&column(&rows, "one_norm")[0]);
    assert!((raw * norm - f(&column(&rows, "circuit")[0])).abs() <= 1e-12);
    assert!(raw.abs() <= 1.0);
}

#[test]
fn identity_gates_flag_only_changes_depth() {
    let base = ["eval", "--fn", "prod-sin", "--d", "2", "--n", "3", "--x", "0.3,0.7"];
    let lean = csv(&qkorobov(&base));
    let mut args = base.to_vec();
    args.push("--include-identity-gates");
    let full = csv(&qkorobov(&args));
    assert_eq!(column(&lean, "circuit"), column(&full, "circuit"));
    assert_eq!(column(&lean, "width"), column(&full, "width"));
    let depth = |rows: &[Vec<String>]| column(rows, "touch_depth")[0].parse::<usize>().unwrap();
    assert!(depth(&lean) < depth(&full));
}

#[test]
fn coeffs_examples() {
    let out = qkorobov(&["coeffs", "--fn", "prod-quad", "--d", "1", "--n", "2"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries: Vec<(Value, Value, f64)> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["level"].clone(), e["index"].clone(), e["value"].as_f64().unwrap()))
        .collect();
    let expected = [(1, 1, 0.25), (2, 1, 0.0625), (2, 3, 0.0625)];
    assert_eq!(entries.len(), 3);
    for ((l, i, value), (el, ei, ev)) in entries.iter().zip(expected) {
        assert_eq!(l, &serde_json::json!([el]));
        assert_eq!(i, &serde_json::json!([ei]));
        assert!((value - ev).abs() <= 1e-15);
    }

    let zero = qkorobov(&["coeffs", "--fn", "zero", "--d", "2", "--n", "3", "--format", "csv"]);
    assert!(column(&csv(&zero), "value").iter().all(|v| f(v) == 0.0));

    let single = qkorobov(&["coeffs", "--fn", "prod-quad", "--d", "2", "--n", "1"]);
    let v: Value = serde_json::from_str(&stdout(&single)).unwrap();
    assert_eq!(v["entries"].as_array().unwrap().len(), 1);
    assert_eq!(v["entries"][0]["value"].as_f64().unwrap(), 0.0625);
}

#[test]
fn coeffs_with_quadrature() {
    let out = qkorobov(&[
        "coeffs",
        "--fn",
        "prod-sin",
        "--d",
        "1",
        "--n",
        "3",
        "--with-quadrature",
        "--format",
        "csv",
    ]);
    let rows = csv(&out);
    for (a, b) in column(&rows, "value").iter().zip(column(&rows, "quadrature")) {
        assert!((f(a) - f(&b)).abs() <= 1e-8);
    }
}

/// Least-squares slope of `log₂(4^{−(n+1)})` on `log₂(2^n − 1)`.
fn quadratic_slope_oracle(levels: std::ops::RangeInclusive<i32>) -> f64 {
    let pts: Vec<(f64, f64)> = levels
        .map(|n| ((2f64.powi(n) - 1.0).log2(), -2.0 * (n + 1) as f64))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn convergence_csv() {
    let out = qkorobov(&[
        "convergence",
        "--fn",
        "prod-quad",
        "--d",
        "1",
        "--p",
        "inf",
        "--n-range",
        "3..10",
    ]);
    assert!(out.status.success());
    let rows = csv(&out);
    assert_eq!(rows[0], ["n", "N", "error_inf", "error_2", "slope_running"]);
    assert_eq!(rows.len(), 9);
    for r in &rows[1..] {
        let n: i32 = r[0].parse().unwrap();
        assert_eq!(r[1], ((1u64 << n) - 1).to_string());
        assert_eq!(f(&r[2]), 0.25f64.powi(n + 1));
    }
    let slope = f(rows.last().unwrap().last().unwrap());
    assert!((slope - quadratic_slope_oracle(3..=10)).abs() <= 1e-12);
    assert!(rows[1][4].is_empty());
}

#[test]
fn convergence_single_row_has_empty_slope() {
    let rows = csv(&qkorobov(&["convergence", "--fn", "prod-sin", "--n", "4"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][4], "");
}

#[test]
fn convergence_svg_and_json() {
    let svg = stdout(&qkorobov(&[
        "convergence",
        "--fn",
        "prod-quad",
        "--d",
        "2",
        "--n-range",
        "1..4",
        "--format",
        "svg",
    ]));
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("log exponent 3(d-1) = 3"));
    assert!(svg.contains("reference slope -2"));
    let json = stdout(&qkorobov(&[
        "convergence",
        "--fn",
        "prod-quad",
        "--d",
        "2",
        "--n-range",
        "1..4",
        "--format",
        "json",
    ]));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["log_exponent"], 3);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert!(v["slope"].is_f64());
    assert!(v["slope_ci"].is_array());
}

#[test]
fn convergence_is_deterministic() {
    let args = [
        "convergence",
        "--fn",
        "prod-quad",
        "--d",
        "3",
        "--p",
        "3",
        "--n-range",
        "1..2",
        "--seed",
        "42",
    ];
    let a = qkorobov(&args);
    let b = qkorobov(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(csv(&a)[0].last().unwrap(), "error_p");
}

#[test]
fn resources_examples() {
    let out = qkorobov(&[
        "resources",
        "--d",
        "2",
        "--p",
        "2",
        "--eps",
        "0.5,0.05,0.01",
        "--n-range",
        "1..2",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let est = v["estimates"].as_array().unwrap();
    for e in est {
        let depth = e["predicted_depth_bound"].as_f64().unwrap();
        let width = e["predicted_width_bound"].as_f64().unwrap();
        assert!(depth > 0.0 && width > 0.0);
        assert!(depth <= e["simplified_depth_bound"].as_f64().unwrap());
        assert!(width <= e["simplified_width_bound"].as_f64().unwrap());
    }
    let depths: Vec<f64> = est
        .iter()
        .map(|e| e["predicted_depth_bound"].as_f64().unwrap())
        .collect();
    assert!(depths[1] > depths[0] && depths[2] > depths[1]);

    let out = qkorobov(&["resources", "--d", "1", "--n", "2", "--eps", "0.1"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["measurements"][0]["width"], 4);
    assert_eq!(v["measurements"][0]["estimate_only"], false);
}

#[test]
fn resources_flags_infeasible_measurements() {
    let out = qkorobov(&["resources", "--d", "4", "--n", "8", "--eps", "0.1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["measurements"][0]["estimate_only"], true);
    assert!(v["measurements"][0]["touch_depth"].is_null());
}

#[test]
fn audit_passes_on_corpus() {
    let out = qkorobov(&["audit"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv(&out);
    let sup: Vec<f64> = column(&rows, "max_ratio_sup").iter().map(|c| f(c)).collect();
    assert!(sup.iter().all(|&r| r <= 1.0 + 1e-12));
    assert!(sup.iter().any(|&r| (r - 1.0).abs() <= 1e-12));
    assert!(column(&rows, "dual_max_abs_diff").iter().all(|c| f(c) <= 1e-6));
    let ds: Vec<String> = column(&rows, "d");
    assert!(ds.contains(&"1".to_string()) && ds.contains(&"2".to_string()));
}

#[test]
fn audit_reports_injected_violation() {
    let out = qkorobov(&[
        "audit",
        "--fn",
        "prod-quad",
        "--d",
        "1",
        "--n",
        "2",
        "--scale-coefficients",
        "1.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("level [1] index [1]"), "{err}");
}

#[test]
fn circuit_trace_round_trips() {
    let out = qkorobov(&["circuit", "--fn", "prod-quad", "--d", "1", "--n", "2", "--x", "0.3"]);
    assert!(out.status.success());
    let circuit = from_json(&stdout(&out)).unwrap();
    assert_eq!(circuit.width(), 4);
    assert!(!circuit.is_empty());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"command": "eval", "fn": "prod-quad", "d": 1, "n": 4, "x": [0.125]}"#,
    )
    .unwrap();
    let target = dir.path().join("nested/out.csv");
    let out = qkorobov(&[
        "--config",
        config.to_str().unwrap(),
        "--n",
        "2",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    let rows: Vec<Vec<String>> = text.lines().map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(f(&column(&rows, "classical")[0]), 0.09375);
}

#[test]
fn config_errors_exit_with_2() {
    let cases: [&[&str]; 7] = [
        &["eval", "--fn", "nope", "--x", "0.1"],
        &["eval", "--fn", "asym", "--d", "2", "--x", "0.1,0.2"],
        &["eval", "--fn", "prod-quad", "--x", "1.5"],
        &["convergence", "--fn", "prod-quad", "--p", "1"],
        &["convergence", "--fn", "prod-quad", "--n-range", "5..3"],
        &["circuit", "--fn", "prod-quad", "--x", "0.3", "--format", "csv"],
        &["--bogus-flag"],
    ];
    for args in cases {
        assert_eq!(qkorobov(args).status.code(), Some(2), "{args:?}");
    }
}
