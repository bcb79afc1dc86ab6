use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn holistic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holistic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let body = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

fn manifest(path: &Path) -> Value {
    let m = format!("{}.manifest.json", path.display());
    serde_json::from_str(&std::fs::read_to_string(m).unwrap()).unwrap()
}

#[test]
fn spectrum_first_order_at_pi() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spectrum.csv");
    let kmax = std::f64::consts::PI.to_string();
    let o = holistic(&[
        "spectrum", "--orders", "1,2,3", "--kmax", &kmax, "--points", "200", "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, body) = rows(&out);
    assert_eq!(
        header,
        ["kappa", "lambda_order1", "lambda_order2", "lambda_order3", "exact"]
    );
    assert_eq!(body.len(), 200);
    let last = body.last().unwrap();
    let k: f64 = last[0].parse().unwrap();
    assert_eq!(k, std::f64::consts::PI);
    let l1: f64 = last[1].parse().unwrap();
    assert!((l1 + 12.0).abs() < 1e-12);
    let m = manifest(&out);
    assert_eq!(m["subcommand"], "spectrum");
    assert_eq!(m["params"]["points"], 200);
    assert_eq!(m["outputs"][0], out.to_str().unwrap());
    assert!(m["version"].is_string() && m["duration_seconds"].is_number());
}

#[test]
fn spectrum_default_range_reaches_six_fifths_pi() {
    let o = holistic(&["spectrum", "--orders", "2", "--points", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(r.headers().unwrap().len(), 3);
    let last: Vec<f64> = r
        .records()
        .last()
        .unwrap()
        .unwrap()
        .iter()
        .map(|c| c.parse().unwrap())
        .collect();
    assert!((last[0] - 1.2 * std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn analyze_near_two_thirds_finds_only_the_origin() {
    let o = holistic(&["analyze", "--model", "mixture", "--theta", "0.6667", "--M", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let eq = v["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 1);
    assert_eq!(eq[0]["stable"], true);
    assert_eq!(v["closed_form"]["form"], "mixture_m2");
}

#[test]
fn analyze_advective_two_point_system() {
    let o = holistic(&["analyze", "--model", "mixture", "--theta", "0", "--M", "2", "--box", "20"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let eq = v["equilibria"].as_array().unwrap();
    assert_eq!(eq.len(), 2);
    let unstable = eq.iter().find(|e| e["stable"] == false).unwrap();
    let p: Vec<f64> = serde_json::from_value(unstable["point"].clone()).unwrap();
    assert!((p[0] - 6.0).abs() < 1e-9 && (p[1] + 6.0).abs() < 1e-9);
}

#[test]
fn simulate_zero_amplitude() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let o = holistic(&[
        "simulate", "--model", "holistic1", "--N", "8", "--A", "0", "--output",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let (header, body) = rows(&out);
    assert_eq!(header.len(), 9);
    assert!(body.len() >= 2);
    for row in &body {
        assert!(row[1..].iter().all(|c| c.parse::<f64>().unwrap() == 0.0));
    }
    let t_end: f64 = body.last().unwrap()[0].parse().unwrap();
    assert_eq!(t_end, 10.0);
    assert_eq!(manifest(&out)["summary"]["event"], "none");
}

#[test]
fn simulate_json_reports_the_event() {
    let o = holistic(&[
        "simulate", "--model", "mixture", "--theta", "0", "--N", "3", "--A", "20", "--out", "json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["event"]["kind"], "instability");
    assert_eq!(v["config"]["n"], 3);
    assert!(v["states"].as_array().unwrap().len() >= 2);
}

#[test]
fn sweep_csv_schema_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "sweep".to_string(),
            "--models".into(),
            "mixture:0,holistic1".into(),
            "--Nmin".into(),
            "3".into(),
            "--Nmax".into(),
            "4".into(),
            "--cap".into(),
            "100".into(),
            "--output".into(),
            p.to_str().unwrap().into(),
        ]
    };
    let run = |p: &Path| {
        let owned = args(p);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        assert!(holistic(&refs).status.success());
    };
    run(&a);
    std::env::set_var("HOLISTIC_THREADS", "1");
    run(&b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (header, body) = rows(&a);
    assert_eq!(header, ["model", "N", "sign", "A_star", "event", "t_event"]);
    assert_eq!(body.len(), 8);
    assert_eq!(body[0][..3], ["mixture:0", "3", "1"]);
    assert_eq!(body[0][4], "instability");
    for r in &body {
        assert!(["instability", "irregularity", "none", "failed"].contains(&r[4].as_str()));
        assert_eq!(r[3].is_empty(), r[4] == "none");
    }
    assert_eq!(manifest(&a)["summary"]["cells"], 8);
}

#[test]
fn construct_writes_exact_rationals() {
    let o = holistic(&["construct", "--order", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["max_order"], 2);
    let num = v["rates"][0]["delta2_numerator"].as_array().unwrap();
    assert!(num.iter().all(|c| c.as_str().unwrap().contains('/')));
    // S δ² = 6s/(6 + s) with s the δ² symbol
    assert_eq!(num[1], "6/1");
}

#[test]
fn two_element_series_json() {
    let o = holistic(&["two-element", "--gamma-order", "3", "--alpha-order", "2"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let lin: Vec<f64> = serde_json::from_value(v["linear_coefficients"].clone()).unwrap();
    assert_eq!(lin[0], -3.0);
    assert!((lin[1] - 0.6).abs() < 1e-15);
    let terms = v["series"]["terms"].as_array().unwrap();
    let t22 = terms
        .iter()
        .find(|t| t["gamma_power"] == 2 && t["alpha_power"] == 2)
        .unwrap();
    assert_eq!(t22["rate"][3], "-1/15");
    assert_eq!(v["spectrum"].as_array().unwrap().len(), 6);
}

#[test]
fn bands_start_at_pi_for_full_coupling() {
    let o = holistic(&["bands", "--coupling", "1"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let recs: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    let lo: f64 = recs[1][1].parse().unwrap();
    assert!((lo - std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(recs[0][2].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn field_interpolates_grid_values() {
    let o = holistic(&["field", "--values", "0,1,-1", "--points", "7"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let recs: Vec<Vec<f64>> = r
        .records()
        .map(|x| x.unwrap().iter().map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(recs.len(), 7);
    // x = 2π/3 is grid point 1
    assert!((recs[2][2] - 1.0).abs() < 1e-14);
    for row in &recs {
        assert!((row[2] - row[3]).abs() < 1e-12);
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(holistic(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(holistic(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(holistic(&[]).status.code(), Some(1));
    let o = holistic(&["simulate", "--model", "mixture", "--theta", "2", "--N", "8", "--A", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert_eq!(holistic(&["sweep", "--models", "upwind"]).status.code(), Some(1));
    assert_eq!(holistic(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failures_exit_two() {
    // an absolute tolerance of 1e−300 drives the step size to underflow
    let o = holistic(&[
        "simulate", "--model", "mixture", "--theta", "0", "--N", "3", "--A", "200", "--threshold",
        "1e300", "--T", "1000", "--rtol", "1e-14", "--atol", "1e-300",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("numerical failure"));
    assert_eq!(holistic(&["construct", "--order", "9"]).status.code(), Some(1));
}
