use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_northcott"));
    c.env_remove("NORTHCOTT_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares with the stored file; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str]) {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    let got = stdout(&o);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &got).unwrap();
    }
    let want =
        std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {name}"));
    assert_eq!(got, want, "{name}");
}

#[test]
fn golden_height() {
    golden(
        "height_golden_ratio.json",
        &["height", "x^2 - x - 1", "--root-index", "0"],
    );
}

#[test]
fn golden_enumerate_csv() {
    golden(
        "enumerate_2_0.1.csv",
        &[
            "enumerate",
            "--degree",
            "2",
            "--height",
            "0.1",
            "--format",
            "csv",
        ],
    );
    let rows = std::fs::read_to_string(golden_path("enumerate_2_0.1.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 9);
}

#[test]
fn golden_tower() {
    golden(
        "tower_2_2.json",
        &["tower", "build", "--groups", "2,2", "--verify"],
    );
    let cert: Value =
        serde_json::from_str(&std::fs::read_to_string(golden_path("tower_2_2.json")).unwrap())
            .unwrap();
    assert_eq!(cert["primes"], serde_json::json!([[3], [83]]));
    assert_eq!(
        cert["steps"][0]["quantity_mid"].as_str().unwrap()[..5],
        *"1.316"
    );
    assert_eq!(
        cert["steps"][1]["quantity_mid"].as_str().unwrap()[..5],
        *"3.018"
    );
}

#[test]
fn golden_field_and_dynamics() {
    golden(
        "lattice_2_3.txt",
        &["field", "lattice", "quad(2) * quad(3)", "--format", "table"],
    );
    golden(
        "relative_3_m83.json",
        &["field", "relative", "quad(3)", "quad(3) * quad(-83)"],
    );
    golden(
        "preperiodic_x2m1.json",
        &["dyn", "preperiodic", "--map", "x^2 - 1", "--degree", "1"],
    );
    golden(
        "constants_x2p1_x.json",
        &["dyn", "constants", "--map", "(x^2 + 1)/x"],
    );
}

#[test]
fn certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let o = run(&["tower", "build", "--groups", "2,3,2"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&path, &o.stdout).unwrap();
    let v = run(&["tower", "verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    let rep: Value = serde_json::from_str(&stdout(&v)).unwrap();
    assert_eq!(rep["passed"], Value::Bool(true));
    assert_eq!(rep["steps"].as_array().unwrap().len(), 3);

    // a forged quantity is refused
    let forged = stdout(&o).replacen("\"quantity_hi\": \"1.", "\"quantity_hi\": \"2.", 1);
    assert_ne!(forged, stdout(&o));
    std::fs::write(&path, forged).unwrap();
    let v = run(&["tower", "verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));

    std::fs::write(&path, "{\"schema\": 1,\n  oops").unwrap();
    let v = run(&["tower", "verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(2));
    assert!(stderr(&v).contains("position"));
}

#[test]
fn escalation_failures_exit_one() {
    // step 2 moved below the escalation bound
    let o = run(&["tower", "build", "--groups", "2,2"]);
    let text = stdout(&o).replace("83", "5");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, text).unwrap();
    let v = run(&["tower", "verify", "--cert", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1), "{}", stdout(&v));
}

#[test]
fn exit_codes() {
    let o = run(&["field", "disc", "quad(2) * sqrt(3)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position 10"), "{}", stderr(&o));

    let o = run(&["height", "x^2 +* 1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position"));

    let o = run(&["enumerate", "--degree", "4", "--height", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let msg: Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(msg["error"], "budget");
    assert_eq!(msg["budget"], 100_000_000);

    let o = run(&[
        "enumerate",
        "--degree",
        "2",
        "--height",
        "0.5",
        "--budget",
        "10",
    ]);
    assert_eq!(o.status.code(), Some(3));

    for args in [
        &["enumerate", "--degree", "2"][..],
        &["height", "2", "--tol", "0"],
        &[
            "enumerate",
            "--degree",
            "1",
            "--height",
            "1",
            "--budget",
            "0",
        ],
        &["tower", "build", "--groups", "S3"],
        &["dyn", "preperiodic", "--map", "x + 1", "--degree", "1"],
        &["bogus"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn validation_and_property_checks() {
    let o = run(&[
        "dyn",
        "validate",
        "--map",
        "x^2 - 1",
        "--samples",
        "200",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["samples"], 200);
    assert_eq!(v["passed"], true);

    let o = run(&[
        "dyn", "check-p", "--map", "x^2 - 1", "--point", "0", "--point", "-1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        (
            v["admissible"].clone(),
            v["invariant"].clone(),
            v["preperiodic"].clone()
        ),
        (true.into(), true.into(), true.into())
    );

    let o = run(&["dyn", "classify-r", "--map", "(2*x + 1)/(x - 3)"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["class"], "moebius");
}

#[test]
fn worker_count_does_not_change_output() {
    for args in [
        &["enumerate", "--degree", "3", "--height", "0.1"][..],
        &["bogomolov", "--degree", "2", "--height", "0.3"],
        &["dyn", "preperiodic", "--map", "x^2", "--degree", "2"],
        &[
            "dyn",
            "validate",
            "--map",
            "(x^2 + 1)/x",
            "--samples",
            "100",
        ],
        &["tower", "build", "--groups", "2x2,3"],
    ] {
        let outs: Vec<Vec<u8>> = ["1", "8"]
            .iter()
            .map(|w| {
                bin()
                    .args(args)
                    .env("NORTHCOTT_WORKERS", w)
                    .output()
                    .unwrap()
                    .stdout
            })
            .collect();
        assert!(!outs[0].is_empty());
        assert_eq!(outs[0], outs[1], "{args:?}");
    }
}
