use std::process::{Command, Output};

use qracah::sixj::{closed_form_parts, ClosedForm, SixJ};
use qracah::{FloatField, Rat};
use serde_json::Value;

fn qracah(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qracah")).args(args).env_remove("QRACAH_PRECISION").output().expect("runs")
}

fn json(args: &[&str]) -> (Value, String, i32) {
    let out = qracah(args);
    let text = String::from_utf8(out.stdout).unwrap();
    (serde_json::from_str(&text).unwrap(), text, out.status.code().unwrap())
}

fn column(v: &Value, name: &str) -> Vec<String> {
    v["rows"].as_array().unwrap().iter().map(|r| r[name].as_str().unwrap().to_string()).collect()
}

const U: [&str; 10] = ["--a", "1/2", "--b", "9/2", "--alpha", "1", "--beta", "0", "--nmax", "0"];

#[test]
fn degree_zero_is_one() {
    for fam in ["u", "utilde"] {
        for backend in ["exact", "float"] {
            let mut args = vec!["poly", "--family", fam, "--backend", backend];
            args.extend(U);
            let (v, _, code) = json(&args);
            assert_eq!(code, 0);
            let vals = column(&v, "value");
            assert_eq!(vals.len(), 4);
            assert!(vals.iter().all(|x| x == "1"), "{vals:?}");
        }
    }
}

#[test]
fn methods_give_identical_rows() {
    let run = |m: &str| {
        let out = qracah(&[
            "poly",
            "--family",
            "u",
            "--a",
            "1/2",
            "--b",
            "9/2",
            "--alpha",
            "1",
            "--beta",
            "0",
            "--nmax",
            "3",
            "--backend",
            "exact",
            "--method",
            m,
            "--format",
            "csv",
        ]);
        let text = String::from_utf8(out.stdout).unwrap();
        text.lines().filter(|l| !l.starts_with('#')).map(String::from).collect::<Vec<_>>()
    };
    let explicit = run("explicit");
    assert_eq!(explicit.len(), 17);
    assert_eq!(explicit, run("ttrr"));
    assert_eq!(explicit, run("sears"));
}

#[test]
fn exact_output_names_its_variable() {
    let mut args = vec!["poly", "--family", "u", "--backend", "exact", "--format", "csv"];
    args.extend(U);
    let text = String::from_utf8(qracah(&args).stdout).unwrap();
    assert!(text.contains("# t=q^(1/4)"));
}

#[test]
fn sixj_boundary_value_and_symmetry() {
    let (v, _, code) = json(&["sixj", "3/2,1/2,1,3/2,3/2,1", "3/2,1/2,1,3/2,3/2,2", "3/2,1/2,2,3/2,3/2,1", "--precision", "128"]);
    assert_eq!(code, 0);
    let vals = column(&v, "value");
    let f = FloatField::new(Rat::new(7, 10), 128).unwrap();
    let sj = SixJ::from_doubled([3, 1, 2, 3, 3, 2]).unwrap();
    let closed = closed_form_parts(&f, &sj, ClosedForm::MinJ23).unwrap().value().unwrap();
    assert_eq!(vals[0], closed.to_string());
    let (a, b): (f64, f64) = (vals[1].parse().unwrap(), vals[2].parse().unwrap());
    assert!((a - b).abs() < 1e-30);
}

#[test]
fn all_routes_agree() {
    let (v, _, _) = json(&["sixj", "--jmax", "3/2", "--route", "all"]);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.len() > 10);
    for r in rows {
        let vals: Vec<f64> = ["via-u", "via-utilde", "explicit", "explicit-tilde"]
            .iter()
            .map(|k| r[*k].as_str().unwrap().parse().unwrap())
            .collect();
        assert!(vals.iter().all(|x| (x - vals[0]).abs() <= 1e-15 * vals[0].abs().max(1e-30)), "{r}");
    }
}

#[test]
fn exact_sixj_squares() {
    let (v, _, code) = json(&["sixj", "1/2,1/2,1,1/2,1/2,1", "--backend", "exact"]);
    assert_eq!(code, 0);
    let row = &v["rows"][0];
    assert_eq!(row["sign"], 1);
    assert!(row["square"].as_str().unwrap().contains('t'));
}

#[test]
fn triangle_violations() {
    let (v, _, code) = json(&["sixj", "1,3,2,3,1,2"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "TriangleViolation");
    let (v, _, code) = json(&["sixj", "1,3,2,3,1,2", "1/2,1/2,1,1/2,1/2,1", "--lenient"]);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows[0]["error"].as_str().unwrap().is_empty());
    assert_eq!(rows[1]["error"], "");
}

#[test]
fn inadmissible_polynomial_parameters() {
    let (v, _, code) = json(&["poly", "--family", "u", "--a", "1/3", "--b", "4", "--alpha", "0", "--beta", "0", "--nmax", "1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "InadmissibleParams");
}

#[test]
fn verify_suites() {
    let (v, _, code) = json(&["verify", "orthogonality"]);
    assert_eq!(code, 0);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["max_residual"], "0e0");
    let (v, _, code) = json(&["verify", "sixj-unitarity", "--q", "0.7", "--jmax", "2"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["meta"]["q"], "7/10");
    let (v, _, code) = json(&["verify", "bogus"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UnknownSuite");
}

#[test]
fn verification_failure_exits_one() {
    // 64 bits cannot meet a 1e-25 tolerance
    let (v, _, code) = json(&["verify", "sixj-recurrences", "--precision", "64", "--jmax", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
}

#[test]
fn json_round_trips() {
    for args in [
        vec!["poly", "--family", "utilde", "--a", "0", "--b", "4", "--alpha", "1/2", "--beta", "1/2", "--nmax", "3"],
        vec!["sixj", "--jmax", "1", "--route", "all"],
        vec!["verify", "identities"],
    ] {
        let (v, text, _) = json(&args);
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    }
}

#[test]
fn deterministic_and_precision_from_env() {
    let a = qracah(&["sixj", "--jmax", "1"]).stdout;
    assert_eq!(a, qracah(&["sixj", "--jmax", "1"]).stdout);
    let out = Command::new(env!("CARGO_BIN_EXE_qracah"))
        .args(["sixj", "1/2,1/2,1,1/2,1/2,1"])
        .env("QRACAH_PRECISION", "256")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["precision_bits"], "256");
    let out = qracah(&["sixj", "1/2,1/2,1,1/2,1/2,1", "--precision", "32"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qracah(&["sixj", "1/2,1/2,1,1/2,1/2,1", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
