use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phykey"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn ber_curve_columns_and_gap() {
    let o = run(&["ber-curve", "--m", "4", "--theta-b-deg", "45,90,180", "--sinr-db", "0:30:301"]);
    let csv = stdout(&o);
    assert!(csv.starts_with("sinr_db,ber_theta_45,ber_theta_90,ber_theta_180\n"));
    assert!(!csv.contains('\r'));
    let x = column(&csv, 0);
    for c in 1..=3 {
        let y = column(&csv, c);
        assert!(y.windows(2).all(|w| w[1] < w[0]), "column {c} not decreasing");
    }
    let cross = |c| {
        let y = column(&csv, c);
        let i = y.iter().position(|&b| b < 0.1).unwrap();
        x[i - 1] + (x[i] - x[i - 1]) * (y[i - 1] - 0.1) / (y[i - 1] - y[i])
    };
    let gap = cross(1) - cross(3);
    assert!((10.0..=12.0).contains(&gap), "gap {gap}");
}

#[test]
fn ber_curve_from_scenario_defaults() {
    let path = scenario("default.json");
    let o = run(&["ber-curve", path.to_str().unwrap(), "--sinr-db=-inf,10"]);
    let csv = stdout(&o);
    assert_eq!(csv.lines().next().unwrap(), "sinr_db,ber_theta_90");
    assert_eq!(csv.lines().nth(1).unwrap(), "-inf,0.5");
}

#[test]
fn region_map_proposed_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.csv");
    let path = scenario("default.json");
    let o = run(&["region-map", path.to_str().unwrap(), "--res", "40", "--out", out.to_str().unwrap()]);
    stdout(&o);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 40 * 40);
    assert!(csv.starts_with("x_m,y_m,ber\n"));
    let side: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert!((side["radius_over_d"].as_f64().unwrap() - 0.101).abs() < 1e-3);
    assert!((side["security"]["security_factor"].as_f64().unwrap() - 0.0102).abs() < 1e-4);
    assert_eq!(side["security"]["secure"], Value::Bool(true));
}

#[test]
fn region_map_directional_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dir.csv");
    let path = scenario("directional.json");
    let o = run(&[
        "region-map",
        path.to_str().unwrap(),
        "--scheme",
        "directional",
        "--res",
        "30",
        "--out",
        out.to_str().unwrap(),
    ]);
    stdout(&o);
    let side: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let sf = side["security"]["security_factor"].as_f64().unwrap();
    assert!((sf / 3.2 - 1.0).abs() < 0.02, "{sf}");
    assert_eq!(side["eve_sector"]["half_angle"].as_f64().unwrap(), 30f64.to_radians());
}

#[test]
fn silent_master_flags_violation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("silent.csv");
    let path = scenario("silent-master.json");
    let o = run(&["region-map", path.to_str().unwrap(), "--res", "10", "--out", out.to_str().unwrap()]);
    stdout(&o);
    let side: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(side["alpha_r"].as_f64().unwrap(), 0.0);
    assert_eq!(side["security"]["secure"], Value::Bool(false));
    assert!(side["security"]["security_factor"].is_null());
    assert!(side["security"]["diagnostic"].as_str().unwrap().contains("unbounded"));
}

#[test]
fn compare_reports() {
    let path = scenario("default.json");
    let v: Value = serde_json::from_str(&stdout(&run(&["compare", path.to_str().unwrap()]))).unwrap();
    assert!((v["proposed"]["security_factor"].as_f64().unwrap() - 0.0102).abs() < 1e-4);
    assert!((v["directional"]["security_factor"].as_f64().unwrap() - 3.162).abs() < 1e-3);
    assert_eq!(v["proposed_more_secure"], Value::Bool(true));
    let p = v["key_intercept"]["probability"].as_f64().unwrap();
    assert!((p / 2.7e-5 - 1.0).abs() < 0.02);

    let weak = scenario("weak-interference.json");
    let v: Value = serde_json::from_str(&stdout(&run(&["compare", weak.to_str().unwrap()]))).unwrap();
    assert!((v["proposed"]["security_factor"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["proposed"]["secure"], Value::Bool(false));
}

#[test]
fn simulate_is_byte_identical_and_single_point_has_two_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("default.json");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let o = run(&[
            "simulate",
            path.to_str().unwrap(),
            "--sweep",
            "eve-ratio:0.05:0.5:4",
            "--out",
            out.to_str().unwrap(),
        ]);
        stdout(&o);
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs[0].clone()).unwrap();
    assert!(text.starts_with("eve_distance_over_d,ber_master,ber_eve,eve_ci_lo,eve_ci_hi\n"));

    let one = stdout(&run(&["simulate", path.to_str().unwrap(), "--sweep", "p-ratio-db:10:10:1"]));
    assert_eq!(one.lines().count(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"schema_version\": 1, \"radio\": { \"frequency_ghz\": 2.4 } }").unwrap();
    let o = run(&["compare", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json:1:"));

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["compare", missing.to_str().unwrap()]).status.code(), Some(2));

    let path = scenario("default.json");
    let o = run(&["simulate", path.to_str().unwrap(), "--sweep", "height:0:1:2"]);
    assert_eq!(o.status.code(), Some(2));

    // Eve placed on the master: the simulation itself fails.
    let o = run(&["simulate", path.to_str().unwrap(), "--sweep", "eve-ratio:1:1:1"]);
    assert_eq!(o.status.code(), Some(3));

    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}
