use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_noon-lab");

fn noon_lab(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("NOON_LAB_NCAP")
        .output()
        .expect("binary runs")
}

fn csv_rows(out: &Output) -> (String, Vec<Vec<f64>>) {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().expect("header line").to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn unknown_scenario_exits_2_with_one_line() {
    let out = noon_lab(&["fridge"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("loss-sweep") && err.contains("opa-visibility"));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(
        noon_lab(&["fringe", "--param", "N=0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        noon_lab(&["fringe", "--param", "steps=1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        noon_lab(&["fringe", "--format", "xml"]).status.code(),
        Some(2)
    );
    assert_eq!(
        noon_lab(&["fringe", "--config", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        noon_lab(&["hom", "--param", "bogus=1"]).status.code(),
        Some(2)
    );
}

#[test]
fn computation_errors_exit_1() {
    // The N00N projector has zero slope at φ = 0.
    let out = noon_lab(&[
        "sensitivity",
        "--param",
        "phi_min=0",
        "--param",
        "phi_max=0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // Photon cap below the N00N photon number.
    let out = noon_lab(&["fringe", "--param", "N=5", "--param", "photon_cap=4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fringe_has_three_maxima_per_turn() {
    let out = noon_lab(&[
        "fringe",
        "--param",
        "input=noon",
        "--param",
        "N=3",
        "--param",
        "steps=361",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "phi_rad,value,variance");
    assert_eq!(rows.len(), 361);
    let top = rows.iter().map(|r| r[1]).fold(f64::MIN, f64::max);
    let two_pi = 2.0 * std::f64::consts::PI;
    let maxima = rows
        .iter()
        .filter(|r| r[0] < two_pi - 1e-9 && (r[1] - top).abs() < 1e-9 * top)
        .count();
    assert_eq!(maxima, 3);
}

#[test]
fn loss_sweep_hits_three_db_row() {
    let out = noon_lab(&["loss-sweep", "--param", "N=3"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "gamma,coherent_contrast,noon_contrast");
    let row = rows
        .iter()
        .find(|r| (r[0] - std::f64::consts::LN_2).abs() < 1e-11)
        .expect("ln 2 on the grid");
    assert!((row[1] - 0.5).abs() < 1e-9);
    assert!((row[2] - 0.125).abs() < 1e-9);
}

#[test]
fn opa_visibility_is_non_increasing() {
    let out = noon_lab(&[
        "opa-visibility",
        "--param",
        "r_max=1.2",
        "--param",
        "r_steps=12",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, "r,value,pair_cutoff");
    assert!(rows.windows(2).all(|w| w[1][1] <= w[0][1]));
}

#[test]
fn json_mirrors_struct_fields() {
    let out = noon_lab(&["fringe", "--format", "json", "--param", "steps=5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["phis", "values", "variances", "observable_tag"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let out = noon_lab(&["loss-sweep", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["gammas", "coherent_contrast", "noon_contrast", "N"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let out = noon_lab(&["herald-lkd", "--format", "json", "--param", "tap_theta=0.6"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["output", "success_probability", "fidelity_to_target"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hom.json");
    std::fs::write(
        &path,
        r#"{"parameters": {"m": 2}, "output_format": "json"}"#,
    )
    .unwrap();
    let cfg = path.to_str().unwrap();

    let (_, rows) = csv_rows(&noon_lab(&["hom", "--config", cfg, "--format", "csv"]));
    let probs: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let expected = [0.375, 0.0, 0.25, 0.0, 0.375];
    assert!(probs
        .iter()
        .zip(expected)
        .all(|(p, e)| (p - e).abs() < 1e-12));

    let (_, rows) = csv_rows(&noon_lab(&[
        "hom", "--config", cfg, "--format", "csv", "--param", "m=1",
    ]));
    assert_eq!(rows.len(), 3);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("limits.csv");
    let out = noon_lab(&["limits", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,wavelength,snl_phi"));
    assert!(text.contains("1.59154943092e-19"));
}

#[test]
fn env_cap_is_honoured() {
    let out = Command::new(BIN)
        .args(["fringe", "--param", "N=5"])
        .env("NOON_LAB_NCAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(BIN)
        .args(["fringe"])
        .env("NOON_LAB_NCAP", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
