use std::path::Path;
use std::process::{Command, Output};

use concneg::states::{self, DensityMatrix};
use serde_json::Value;

fn concneg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concneg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn measures_of(path: &Path) -> Value {
    let out = concneg(&["measures", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(&out)).unwrap()
}

#[test]
fn measures_of_reference_states() {
    let dir = tempfile::tempdir().unwrap();
    let bell = dir.path().join("bell.json");
    states::write_state_file(&bell, &DensityMatrix::bell()).unwrap();
    let v = measures_of(&bell);
    for key in ["concurrence", "negativity", "eof", "participation_ratio"] {
        assert_eq!(v[key].as_f64(), Some(1.0), "{key}");
    }

    let mixed = dir.path().join("mixed.json");
    states::write_state_file(&mixed, &DensityMatrix::maximally_mixed()).unwrap();
    let v = measures_of(&mixed);
    assert_eq!(v["concurrence"].as_f64(), Some(0.0));
    assert_eq!(v["negativity"].as_f64(), Some(0.0));
    assert_eq!(v["eof"].as_f64(), Some(0.0));
    assert_eq!(v["participation_ratio"].as_f64(), Some(4.0));
}

#[test]
fn measures_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"rho\": [1, 2").unwrap();
    assert_eq!(
        concneg(&["measures", garbage.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let missing = dir.path().join("missing.json");
    assert_eq!(
        concneg(&["measures", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let skew = dir.path().join("skew.json");
    let mut rho = vec![vec![[0.0, 0.0]; 4]; 4];
    for (i, row) in rho.iter_mut().enumerate() {
        row[i] = [0.25, 0.0];
    }
    rho[0][1] = [0.1, 0.0];
    std::fs::write(&skew, serde_json::json!({ "rho": rho }).to_string()).unwrap();
    let out = concneg(&["measures", skew.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hermiticity violated"));
}

#[test]
fn verify_suites() {
    for suite in ["inequality", "pure", "equality-class", "separable-r3"] {
        let out = concneg(&["verify", suite, "--samples", "500", "--seed", "42"]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["pass"], Value::Bool(true));
        assert_eq!(v["samples"].as_u64(), Some(500));
    }
    assert_eq!(concneg(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(
        concneg(&["verify", "pure", "--samples", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_is_deterministic_and_defaults_to_seed_zero() {
    let a = stdout(&concneg(&["verify", "inequality", "--samples", "300"]));
    let b = stdout(&concneg(&[
        "verify",
        "inequality",
        "--samples",
        "300",
        "--seed",
        "0",
    ]));
    assert_eq!(a, b);
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn curve_figure_two() {
    let out = concneg(&["curve", "--figure", "2", "--step", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    assert_eq!(text, "C,gap\n0,0\n0.5,0.292893218813452\n1,0\n");
}

#[test]
fn curve_figure_one_round_trips() {
    let out = concneg(&["curve", "--figure", "1", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["R", "analytic"]);
    assert_eq!(rows.len(), 31);
    for row in rows {
        let exact = concneg::analytic::me_gap_envelope(row[0]).unwrap();
        assert!((row[1] - exact).abs() <= 1e-14 * exact.abs().max(1.0));
    }

    let (_, rows) = parse_csv(&stdout(&concneg(&[
        "curve", "--figure", "1", "--step", "1",
    ])));
    let expected = [0.0, 0.292893218813452, 0.0, 0.0];
    assert_eq!(rows.len(), 4);
    for (row, e) in rows.iter().zip(expected) {
        assert!((row[1] - e).abs() <= 2e-15, "{row:?}");
    }
}

#[test]
fn curve_numeric_column() {
    let out = concneg(&[
        "curve",
        "--figure",
        "1",
        "--step",
        "1",
        "--numeric",
        "--restarts",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = parse_csv(&stdout(&out));
    assert_eq!(header, ["R", "analytic", "numeric", "residual"]);
    let at_two = &rows[1];
    assert_eq!(at_two[0], 2.0);
    assert!(at_two[2] >= 0.292893 - 1e-4);
    assert!(rows.iter().all(|r| r[3] <= 1e-6 && r[2] >= r[1] - 1e-4));
}

#[test]
fn curve_rejects_bad_arguments() {
    assert_eq!(
        concneg(&["curve", "--figure", "1", "--step", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        concneg(&["curve", "--figure", "5", "--step", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(concneg(&["curve", "--figure", "1"]).status.code(), Some(2));
}

#[test]
fn optimize_and_orbit_commands() {
    let out = concneg(&[
        "optimize",
        "--fix-c",
        "0.5",
        "--restarts",
        "8",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["objective"].as_f64().unwrap() - (1.0 - 0.5f64.sqrt())).abs() <= 1e-4);
    assert_eq!(v["feasible"], Value::Bool(true));
    let state: states::StateFile = serde_json::from_value(v["state"].clone()).unwrap();
    assert!(state.to_state().is_ok());

    let out = concneg(&[
        "orbit-max",
        "--spectrum",
        "0.5,0.5,0,0",
        "--measure",
        "EN",
        "--restarts",
        "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["objective"].as_f64().unwrap() - 0.207107).abs() <= 2e-3);

    assert_eq!(
        concneg(&["optimize", "--fix-r", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        concneg(&["optimize", "--fix-r", "2", "--fix-c", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        concneg(&["orbit-max", "--spectrum", "0.5,0.6,0,0", "--measure", "C"])
            .status
            .code(),
        Some(2)
    );
}
