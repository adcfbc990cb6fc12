use std::process::{Command, Output};

use serde_json::Value;

fn relpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relpack"))
        .args(args)
        .output()
        .expect("run relpack")
}

fn records(out: &Output) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    reader.records().map(|r| r.unwrap()).collect()
}

fn header(out: &Output) -> Vec<String> {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    reader.headers().unwrap().iter().map(str::to_string).collect()
}

fn json(out: &Output) -> Vec<Value> {
    serde_json::from_slice::<Value>(&out.stdout).unwrap().as_array().unwrap().clone()
}

#[test]
fn figure1_defaults() {
    let out = relpack(&["figure1"]);
    assert!(out.status.success());
    assert_eq!(
        header(&out)[..3],
        ["beta_t_over_sigma_x", "sigma_par_over_sigma_x", "sigma_perp_over_sigma_x"]
    );
    let rows = records(&out);
    assert_eq!(rows.len(), 101);
    assert_eq!((&rows[0][0], &rows[0][1], &rows[0][2]), ("0", "1", "1"));
    let last = &rows[100];
    assert_eq!(&last[0], "100");
    assert!((last[1].parse::<f64>().unwrap() - 1.030776).abs() < 1e-6);
    assert!((last[2].parse::<f64>().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-6);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.lines().all(|l| !l.ends_with(',')));
}

#[test]
fn figure1_oracle_columns_agree() {
    let out = relpack(&["figure1", "--with-oracle", "--samples", "5"]);
    assert!(out.status.success());
    let h = header(&out);
    let col = |n: &str| h.iter().position(|x| x == n).unwrap();
    let last = records(&out).pop().unwrap();
    let v = |n: &str| last[col(n)].parse::<f64>().unwrap();
    assert!((v("moment_sigma_par_over_sigma_x") / v("sigma_par_over_sigma_x") - 1.0).abs() < 5e-3);
    assert!((v("moment_sigma_perp_over_sigma_x") / v("sigma_perp_over_sigma_x") - 1.0).abs() < 5e-3);
    assert_eq!(&last[col("moment_converged")], "true");
}

#[test]
fn csv_round_trips_against_json() {
    let args = ["spread", "--gamma", "3.7", "--epsilon", "0.023", "--samples", "17", "--t-max", "41.3"];
    let csv_out = relpack(&args);
    let json_out = relpack(&[&args[..], &["--format", "json"]].concat());
    let h = header(&csv_out);
    let rows = records(&csv_out);
    let objs = json(&json_out);
    assert_eq!(rows.len(), objs.len());
    for (row, obj) in rows.iter().zip(&objs) {
        let keys: Vec<&String> = obj.as_object().unwrap().keys().collect();
        assert_eq!(keys, h.iter().collect::<Vec<_>>());
        for (name, cell) in h.iter().zip(row.iter()) {
            match &obj[name] {
                Value::Number(n) => assert_eq!(cell.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{name}"),
                Value::Bool(b) => assert_eq!(cell, b.to_string()),
                other => panic!("unexpected {other}"),
            }
        }
    }
}

#[test]
fn runs_are_byte_identical() {
    let args = ["density", "--gamma", "2", "--epsilon", "0.05", "--samples", "3", "--with-oracle"];
    let a = relpack(&args);
    let b = relpack(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn density_columns() {
    let out = relpack(&["density", "--samples", "3", "--t-max", "50"]);
    assert!(out.status.success());
    let h = header(&out);
    assert!(h.contains(&"density_sigma_par_over_sigma_x".to_string()));
    assert!(!h.contains(&"moment_converged".to_string()));
    let rows = records(&out);
    let col = |n: &str| h.iter().position(|x| x == n).unwrap();
    for r in &rows {
        let analytic = r[col("sigma_perp_over_sigma_x")].parse::<f64>().unwrap();
        let measured = r[col("density_sigma_perp_over_sigma_x")].parse::<f64>().unwrap();
        assert!((measured / analytic - 1.0).abs() < 5e-3);
    }
}

#[test]
fn contract_records() {
    let out = relpack(&["contract", "--json"]);
    assert!(out.status.success());
    let r = &json(&out)[0];
    assert!((r["sigma_par_ratio"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert!((r["sigma_perp_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert_eq!(r["predicted_ratio"], 0.5);
    assert_eq!(r["converged"], true);

    let out = relpack(&["contract", "--beta0", "0"]);
    let h = header(&out);
    let row = &records(&out)[0];
    let col = |n: &str| h.iter().position(|x| x == n).unwrap();
    assert!((row[col("sigma_par_ratio")].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    assert!((row[col("sigma_perp_ratio")].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);

    let out = relpack(&["contract", "--beta0", "-0.6"]);
    assert!(out.status.success());
    let row = &records(&out)[0];
    assert!((row[col("sigma_par_ratio")].parse::<f64>().unwrap() - 0.8).abs() < 1e-3);
}

#[test]
fn contract_warns_when_not_narrow() {
    let out = relpack(&["contract", "--beta0", "0.6", "--sigma-p", "0.2", "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)[0]["narrowness_warning"], true);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn check_json_lists_every_invariant() {
    let out = relpack(&["check", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let items = json(&out);
    assert!(items.len() >= 10);
    for item in &items {
        assert_eq!(item["passed"], true, "{item}");
        assert!(item["invariant"].is_string());
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| relpack(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["figure1", "--help"]), Some(0));

    for bad in [
        &["spread", "--gamma", "abc"][..],
        &["spread", "--gamma", "2", "--p", "1"],
        &["spread", "--epsilon", "0.1", "--sigma-p", "0.1"],
        &["spread", "--gamma", "0.5"],
        &["spread", "--samples", "1"],
        &["spread", "--beta0", "0.5"],
        &["spread", "--quad-nodes", "4"],
        &["contract", "--beta0", "1.2"],
        &["contract", "--epsilon", "0.01"],
        &["check", "--gamma", "2"],
        &["frobnicate"],
        &["figure1", "--format", "xml"],
    ] {
        let out = relpack(bad);
        assert_eq!(out.status.code(), Some(1), "{bad:?}");
        assert!(!out.stderr.is_empty(), "{bad:?}");
        assert!(out.stdout.is_empty(), "{bad:?}");
    }

    let out = relpack(&["figure1", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(2));

    let out = relpack(&["spread", "--with-oracle", "--quad-nodes", "8", "--samples", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("false"));

    let out = relpack(&["contract", "--quad-nodes", "8"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.json");
    let out = relpack(&["figure1", "--samples", "3", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(v[2]["beta_t_over_sigma_x"], 100.0);
}
