use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use gml_core::validation::mc_moment_check;
use gml_core::{GeneratorParams, GmlDistribution};
use serde_json::Value;

fn gml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gml")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Metadata and numeric rows of CSV output.
fn parse_csv(text: &str) -> (Value, Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let meta = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    let columns = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (meta, columns, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
#[allow(clippy::approx_constant)]
fn constants_table() {
    let (meta, columns, rows) = parse_csv(&stdout(&gml(&["constants"])));
    assert_eq!(meta["command"], "constants");
    assert_eq!(columns, ["n", "c_n", "d_n", "method"]);
    assert_eq!(rows.len(), 18);
    let c = |n: usize| num(&rows[n - 1][1]);
    assert!((c(2) - 0.3183099).abs() < 1e-7);
    assert!((c(6) / (3.0 / (2.0 * PI.powi(5))) - 1.0).abs() < 1e-10);
    assert!((c(18) / (4725.0 / (254.0 * PI.powi(17))) - 1.0).abs() < 1e-10);
    // d_n(1,1,2) = 2^{n/2} c_n
    for n in 1..=18 {
        let d = num(&rows[n - 1][2]);
        assert!((d / (2f64.powf(n as f64 / 2.0) * c(n)) - 1.0).abs() < 1e-9, "n = {n}");
    }
}

#[test]
fn constants_range_is_checked() {
    assert_eq!(gml(&["constants", "--n-max", "19"]).status.code(), Some(2));
    assert_eq!(gml(&["constants", "--n-max", "0"]).status.code(), Some(2));
}

#[test]
fn pdf_grid_center_sum_and_symmetry() {
    let (_, columns, rows) = parse_csv(&stdout(&gml(&["pdf-grid", "--range", "8", "--resolution", "161"])));
    assert_eq!(columns, ["x1", "x2", "pdf"]);
    assert_eq!(rows.len(), 161 * 161);
    let center = &rows[80 * 161 + 80];
    assert_eq!(num(&center[0]), 0.0);
    assert!((num(&center[2]) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    let h = 16.0 / 160.0;
    let total: f64 = rows.iter().map(|r| num(&r[2])).sum::<f64>() * h * h;
    assert!((total - 1.0).abs() < 1e-3, "{total}");
    for i in 0..161 {
        for j in 0..161 {
            let a = &rows[i * 161 + j];
            let b = &rows[(160 - i) * 161 + (160 - j)];
            assert_eq!(num(&a[0]), -num(&b[0]));
            assert_eq!(a[2], b[2]);
        }
    }
}

#[test]
fn pdf_grid_figure_preset() {
    let (meta, columns, rows) = parse_csv(&stdout(&gml(&["pdf-grid", "--figures", "--resolution", "11"])));
    assert_eq!(columns, ["r", "x1", "x2", "pdf"]);
    assert_eq!(rows.len(), 5 * 121);
    assert_eq!(meta["r"], serde_json::json!([0.5, 1.0, 2.0, 5.0, 10.0]));
    let rs: Vec<f64> = rows.iter().map(|r| num(&r[0])).collect();
    for r in [0.5, 1.0, 2.0, 5.0, 10.0] {
        assert_eq!(rs.iter().filter(|&&x| x == r).count(), 121);
    }
}

#[test]
fn pdf_grid_slice_of_higher_dimension() {
    let (_, columns, rows) = parse_csv(&stdout(&gml(&["pdf-grid", "--n", "3", "--resolution", "5"])));
    assert_eq!(columns, ["x1", "x2", "pdf"]);
    let d = GmlDistribution::standard(3, GeneratorParams::logistic()).unwrap();
    for row in rows {
        let want = d.pdf(&[num(&row[0]), num(&row[1]), 0.0]).unwrap();
        assert_eq!(num(&row[2]), want);
    }
}

#[test]
fn sample_header_only_and_repeatable() {
    let (meta, columns, rows) = parse_csv(&stdout(&gml(&["sample", "--count", "0", "--seed", "4"])));
    assert_eq!(meta["seed"], 4);
    assert_eq!(meta["count"], 0);
    assert_eq!(columns, ["x1", "x2"]);
    assert!(rows.is_empty());
    let a = stdout(&gml(&[
        "sample", "--count", "1000", "--seed", "9", "--n", "3", "--r", "0.5",
    ]));
    let b = stdout(&gml(&[
        "sample", "--count", "1000", "--seed", "9", "--n", "3", "--r", "0.5",
    ]));
    assert_eq!(a, b);
}

#[test]
fn sample_values_round_trip_exactly() {
    let text = stdout(&gml(&[
        "sample",
        "--count",
        "500",
        "--seed",
        "2",
        "--mu",
        "1,-2",
        "--sigma",
        "2,0.5,0.5,1",
    ]));
    let (_, _, rows) = parse_csv(&text);
    let d = GmlDistribution::new(
        nalgebra::DVector::from_vec(vec![1.0, -2.0]),
        nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]),
        GeneratorParams::logistic(),
    )
    .unwrap();
    let batch = d.sample(500, 2).unwrap();
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            assert_eq!(num(cell).to_bits(), batch.row(i)[j].to_bits());
        }
    }
}

fn write_sample(dir: &Path, count: usize, seed: u64) -> std::path::PathBuf {
    let path = dir.join("draws.csv");
    let out = gml(&[
        "sample",
        "--count",
        &count.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    path
}

#[test]
fn sample_file_validates_like_in_process_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sample(dir.path(), 200_000, 17);
    let out = gml(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let d = GmlDistribution::standard(2, GeneratorParams::logistic()).unwrap();
    let direct = mc_moment_check(&d, 200_000, 17).unwrap();
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), direct.checks.len());
    for (file, mem) in checks.iter().zip(&direct.checks) {
        assert_eq!(file["name"], mem.name.as_str());
        assert_eq!(file["passed"], mem.passed);
        assert_eq!(file["observed"], serde_json::to_value(mem.observed).unwrap());
    }
}

#[test]
fn tampered_sample_file_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_sample(dir.path(), 50_000, 3);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let mut shifted = format!("{}\n{}\n", lines.next().unwrap(), lines.next().unwrap());
    for line in lines {
        let v: Vec<f64> = line.split(',').map(num).collect();
        shifted.push_str(&format!("{:.16e},{:.16e}\n", v[0] + 0.1, v[1]));
    }
    std::fs::write(&path, shifted).unwrap();
    let out = gml(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn validate_constants_suite() {
    let out = gml(&["validate", "--suite", "constants", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["seed"], 1);
    assert!(report["checks"].as_array().unwrap().len() >= 12);
}

#[test]
fn validate_unknown_suite() {
    assert_eq!(gml(&["validate", "--suite", "everything"]).status.code(), Some(2));
}

#[test]
fn moments_output() {
    let (_, _, rows) = parse_csv(&stdout(&gml(&["moments", "--n", "2", "--sigma", "2,0,0,1"])));
    let get = |name: &str| num(&rows.iter().find(|r| r[0] == name).unwrap()[1]);
    assert!((get("cov_scale") - std::f64::consts::LN_2).abs() < 1e-14);
    assert!((get("cov[0][0]") - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
    assert!((get("E(R^1)") - 2.0 * std::f64::consts::LN_2).abs() < 1e-13);
}

#[test]
fn cf_of_the_normal_case() {
    let text = stdout(&gml(&[
        "cf", "--b", "0.5", "--r", "0", "--mu", "1,0", "--t", "0.3,-0.4", "--t", "0,0", "--format", "json",
    ]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["columns"], serde_json::json!(["t1", "t2", "re", "im"]));
    let row = &doc["rows"][0];
    let (re, im) = (row[2].as_f64().unwrap(), row[3].as_f64().unwrap());
    let modulus = (-0.5 * 0.25f64).exp();
    assert!((re - modulus * 0.3f64.cos()).abs() < 1e-12);
    assert!((im - modulus * 0.3f64.sin()).abs() < 1e-12);
    assert_eq!(doc["rows"][1][2], 1.0);
}

#[test]
fn invalid_input_is_a_usage_error() {
    assert_eq!(gml(&["sample", "--count", "3", "--a", "-1"]).status.code(), Some(2));
    assert_eq!(gml(&["sample", "--count", "3", "--mu", "1,2,3"]).status.code(), Some(2));
    assert_eq!(gml(&["cf", "--t", "1,2,3"]).status.code(), Some(2));
    assert_eq!(gml(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn quadrature_tolerance_from_environment() {
    let bad = Command::new(env!("CARGO_BIN_EXE_gml"))
        .args(["constants"])
        .env("GML_QUAD_TOL", "2")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let loose = Command::new(env!("CARGO_BIN_EXE_gml"))
        .args(["cf", "--n", "3", "--t", "1,1,1", "--method", "quadrature"])
        .env("GML_QUAD_TOL", "1e-6")
        .output()
        .unwrap();
    let (_, _, rows) = parse_csv(&stdout(&loose));
    let d = GmlDistribution::standard(3, GeneratorParams::logistic()).unwrap();
    assert!((num(&rows[0][3]) - d.cf(&[1.0, 1.0, 1.0]).unwrap().re).abs() < 1e-5);
}

#[test]
fn validate_all_suites() {
    let out = gml(&["validate", "--suite", "all"]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&Value> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .collect();
    assert!(failed.is_empty(), "{failed:#?}");
    assert_eq!(out.status.code(), Some(0));
}
