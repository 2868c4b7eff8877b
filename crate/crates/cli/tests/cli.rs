use monoint_cli::{run, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("monoint").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn check_rows() {
    let (code, out, _) = call(&["check", "1", "0.5", "0.1666666667"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["row"], 2);
    let (code, out, _) = call(&["check", "0", "0", "0"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["row"], 1);
    let (code, _, _) = call(&["check", "0", "0", "0", "--strict"]);
    assert_eq!(code, EXIT_FAILED);
    let (code, out, _) = call(&["check", "0.5", "-0.1", "0"]);
    assert_eq!(code, EXIT_FAILED);
    assert_eq!(json(&out)["feasible"], false);
}

#[test]
fn usage_errors() {
    let (code, _, err) = call(&["check", "1", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("Usage"));
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(call(&["check", "x", "0", "0"]).0, EXIT_USAGE);
    assert_eq!(call(&["--help"]).0, EXIT_OK);
}

#[test]
fn sample_is_deterministic() {
    let a = call(&["sample", "--count", "5", "--seed", "9"]);
    let b = call(&["sample", "--count", "5", "--seed", "9"]);
    assert_eq!(a, b);
    let v = json(&a.1);
    assert_eq!(v.as_array().unwrap().len(), 5);
    for t in v.as_array().unwrap() {
        let (x, y, z) = (t["a"].to_string(), t["b"].to_string(), t["c"].to_string());
        let (code, out, _) = call(&["check", &x, &y, &z, "--strict", "--tol", "0"]);
        assert_eq!(code, EXIT_OK, "{out}");
    }
}

#[test]
fn construct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("f.json");
    let report = dir.path().join("r.json");
    let csv = dir.path().join("f.csv");
    let (code, _, err) = call(&[
        "construct",
        "0.55",
        "0.2",
        "0.0525",
        "--out",
        curve.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--points",
        "11",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let rep = json(&std::fs::read_to_string(&report).unwrap());
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("x,f,df\n"));
    assert_eq!(rows.lines().count(), 12);
    for (order, key, want) in [("1", "a", 0.55), ("2", "b", 0.2), ("3", "c", 0.0525)] {
        let (code, out, _) = call(&[
            "integrate",
            "--curve",
            curve.to_str().unwrap(),
            "--order",
            order,
        ]);
        assert_eq!(code, EXIT_OK);
        let got: f64 = out.trim().parse().unwrap();
        assert!((got - want).abs() < 1e-8);
        let achieved = rep["achieved"][key].as_f64().unwrap();
        assert!((got - achieved).abs() < 1e-10);
    }
    let (code, out, _) = call(&[
        "eval",
        "--curve",
        curve.to_str().unwrap(),
        "--at",
        "0,0.5,1",
        "--deriv",
    ]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v[0]["f"], 0.0);
    assert_eq!(v[2]["f"], 1.0);
}

#[test]
fn construct_is_deterministic_and_rejects_boundary() {
    let a = call(&["construct", "0.4", "0.12", "0.03", "--report", "/dev/null"]);
    let b = call(&["construct", "0.4", "0.12", "0.03", "--report", "/dev/null"]);
    assert_eq!(a.0, EXIT_OK, "{}", a.2);
    assert_eq!(a.1, b.1);
    let (code, _, err) = call(&["construct", "1", "0.5", "0.16666666666666666"]);
    assert_eq!(code, EXIT_FAILED);
    assert!(err.contains("error"));
}

#[test]
fn construct_with_jets() {
    let dir = tempfile::tempdir().unwrap();
    let jets = dir.path().join("jets.json");
    std::fs::write(&jets, r#"{"left": [0.5, 1.0], "right": [0.25]}"#).unwrap();
    let curve = dir.path().join("f.json");
    let (code, _, err) = call(&[
        "construct",
        "0.55",
        "0.2",
        "0.0525",
        "--jets",
        jets.to_str().unwrap(),
        "--out",
        curve.to_str().unwrap(),
        "--report",
        "/dev/null",
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (_, out, _) = call(&[
        "eval",
        "--curve",
        curve.to_str().unwrap(),
        "--at",
        "0,1",
        "--deriv",
    ]);
    let v = json(&out);
    assert!((v[0]["df"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v[1]["df"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn wn_and_vn() {
    assert_eq!(call(&["wn", "--n", "1", "0.3", "0.7"]).0, EXIT_OK);
    assert_eq!(call(&["wn", "--n", "1", "0.7", "0.3"]).0, EXIT_FAILED);
    assert_eq!(call(&["wn", "--n", "2", "1", "3"]).0, EXIT_FAILED);
    assert_eq!(call(&["vn", "--n", "1", "0", "0", "1", "2"]).0, EXIT_OK);
    assert_eq!(
        call(&["vn", "--n", "1", "--interval", "0", "2", "0", "1", "1", "0"]).0,
        EXIT_FAILED
    );
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let (code, _, err) = call(&[
        "wn",
        "--n",
        "2",
        "1",
        "3",
        "5",
        "--witness",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let (_, out, _) = call(&["integrate", "--curve", w.to_str().unwrap(), "--order", "2"]);
    assert!((out.trim().parse::<f64>().unwrap() - 1.0).abs() < 1e-7);
}

#[test]
fn verify_suites() {
    for suite in ["necessity", "kernel", "corners", "region", "construct"] {
        let (code, out, _) = call(&["verify", "--suite", suite, "--trials", "20", "--seed", "3"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert_eq!(json(&out)["passed"], 20);
    }
    assert_eq!(call(&["verify", "--suite", "bogus"]).0, EXIT_USAGE);
}
