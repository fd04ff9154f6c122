use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use steklov_core::mesh::build_unit_disk;
use steklov_core::modular::{DesignDensity, NodalField};

const BIN: &str = env!("CARGO_BIN_EXE_steklov");

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(command: &str, config: &Path, out: &Path) -> (i32, Value) {
    let status = Command::new(BIN)
        .args([command, "--quiet", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .unwrap();
    let summary = std::fs::read_to_string(out.join("summary.json")).map(|t| serde_json::from_str(&t).unwrap()).unwrap_or(Value::Null);
    (status.code().unwrap(), summary)
}

fn exit_code(command: &str, config: &Path, out: &Path) -> i32 {
    run(command, config, out).0
}

#[test]
fn free_disk_matches_bessel_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"young":{"family":"power","p":2.0},"domain":{"kind":"disk","level":5},"alpha":0.0,"c":0.5}"#);
    let (code, s) = run("solve", &cfg, &dir.path().join("o"));
    assert_eq!(code, 0);
    let lambda = s["results"]["state"]["lambda"].as_f64().unwrap();
    assert!((lambda - 0.44639).abs() / 0.44639 < 1e-3, "lambda = {lambda}");
}

#[test]
fn invalid_configs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let far = write_config(dir.path(), "a.json", r#"{"young":{"family":"power","p":2.0},"domain":{"kind":"square","n":4},"alpha":1.0,"c":2.0}"#);
    assert_eq!(exit_code("solve", &far, &out), 1);
    let linear = write_config(dir.path(), "b.json", r#"{"young":{"family":"power","p":1.0},"domain":{"kind":"square","n":4},"alpha":1.0,"c":0.5}"#);
    assert_eq!(exit_code("solve", &linear, &out), 1);
    let unknown = write_config(dir.path(), "d.json", r#"{"young":{"family":"power","p":2.0},"domain":{"kind":"square","n":4},"colour":1}"#);
    assert_eq!(exit_code("solve", &unknown, &out), 1);
    let faster = write_config(
        dir.path(),
        "e.json",
        r#"{"young":{"family":"power","p":2.0},"boundary_young":{"family":"power","p":3.0},"domain":{"kind":"square","n":4}}"#,
    );
    assert_eq!(exit_code("young-check", &faster, &out), 1);
    assert_eq!(exit_code("solve", &dir.path().join("missing.json"), &out), 1);
}

#[test]
fn deterministic_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"young":{"family":"power_sum","p":2.0,"q":3.0},"domain":{"kind":"square","n":6},"alpha":5.0,"c":0.3,"seed":7}"#);
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timestamp");
        v["config"].as_object_mut().unwrap().remove("output_dir");
        v
    };
    let (a_code, a) = run("optimize", &cfg, &dir.path().join("a"));
    let (b_code, b) = run("optimize", &cfg, &dir.path().join("b"));
    assert_eq!((a_code, b_code), (0, 0));
    assert_eq!(strip(a), strip(b));
    for f in ["u.csv", "phi.csv", "outer_history.csv"] {
        assert_eq!(std::fs::read(dir.path().join("a").join(f)).unwrap(), std::fs::read(dir.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn written_fields_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write_config(dir.path(), "c.json", r#"{"young":{"family":"power","p":2.0},"domain":{"kind":"disk","level":3},"alpha":10.0,"c":0.8}"#);
    assert_eq!(exit_code("optimize", &cfg, &out), 0);
    let mesh = build_unit_disk(3).unwrap();
    let u = NodalField::from_csv(std::fs::read(out.join("u.csv")).unwrap().as_slice()).unwrap();
    assert_eq!(u.len(), mesh.n_vertices());
    assert_eq!(u.to_csv(), std::fs::read_to_string(out.join("u.csv")).unwrap());
    let phi = DesignDensity::from_csv(&mesh, std::fs::read(out.join("phi.csv")).unwrap().as_slice()).unwrap();
    assert!((phi.volume() - 0.8).abs() < 1e-9);

    // The optimal density fed back to `solve` reproduces the optimal value.
    let phi_path = out.join("phi.csv");
    let again = write_config(
        dir.path(),
        "d.json",
        &format!(
            r#"{{"young":{{"family":"power","p":2.0}},"domain":{{"kind":"disk","level":3}},"alpha":10.0,"c":0.8,"density":{{"kind":"file","path":{}}}}}"#,
            serde_json::to_string(&phi_path).unwrap()
        ),
    );
    let (_, opt) = run("optimize", &cfg, &dir.path().join("p"));
    let (code, s) = run("solve", &again, &dir.path().join("s"));
    assert_eq!(code, 0);
    let a = opt["results"]["pair"]["lambda"].as_f64().unwrap();
    let b = s["results"]["state"]["lambda"].as_f64().unwrap();
    assert!((a - b).abs() <= 1e-6 * a, "{a} vs {b}");
}

#[test]
fn empty_design_optimum_is_the_free_solve() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"young":{"family":"power_log","p":2.0},"domain":{"kind":"square","n":6},"alpha":3.0,"c":0.0}"#);
    let (a, opt) = run("optimize", &cfg, &dir.path().join("a"));
    let (b, sol) = run("solve", &cfg, &dir.path().join("b"));
    assert_eq!((a, b), (0, 0));
    let x = opt["results"]["pair"]["lambda"].as_f64().unwrap();
    let y = sol["results"]["state"]["lambda"].as_f64().unwrap();
    assert!((x - y).abs() <= 1e-8 * y, "{x} vs {y}");
}

#[test]
fn sweep_and_limit_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"young":{"family":"power","p":2.0},"domain":{"kind":"disk","level":3},"alpha":[1,10,100,1000,10000],"c":0.785,"c_grid":[0.4,0.8,1.2]}"#,
    );
    let (code, s) = run("sweep", &cfg, &dir.path().join("s"));
    assert_eq!(code, 0);
    assert_eq!(s["results"]["records"].as_array().unwrap().len(), 5);
    let sweep = std::fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 6);
    let (code, s) = run("limit", &cfg, &dir.path().join("l"));
    assert_eq!(code, 0);
    assert!(s["results"]["lambda"].as_f64().unwrap() <= s["results"]["k"].as_f64().unwrap());
    assert_eq!(std::fs::read_to_string(dir.path().join("l/monotonicity.csv")).unwrap().lines().count(), 4);
}

#[test]
fn radial_polar_field_is_its_own_rearrangement() {
    let dir = tempfile::tempdir().unwrap();
    let (rings, angles) = (12, 32);
    let mut csv = String::from("ring,angle,value\n");
    for i in 0..=rings {
        for j in 0..angles {
            csv.push_str(&format!("{i},{j},{}\n", 1.0 + (i * i) as f64 / 50.0));
        }
    }
    let field = dir.path().join("polar.csv");
    std::fs::write(&field, csv).unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &format!(
            r#"{{"young":{{"family":"power","p":2.0}},"domain":{{"kind":"disk","level":3}},"alpha":1.0,"polar":{{"rings":{rings},"angles":{angles}}},"field":{}}}"#,
            serde_json::to_string(&field).unwrap()
        ),
    );
    let (code, s) = run("symmetry", &cfg, &dir.path().join("o"));
    assert_eq!(code, 0);
    assert_eq!(s["results"]["field_deviation"].as_f64().unwrap(), 0.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("o/polar_u.csv")).unwrap(), std::fs::read_to_string(dir.path().join("o/polar_u_star.csv")).unwrap());
}

#[test]
fn symmetry_rejects_square() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", r#"{"young":{"family":"power","p":2.0},"domain":{"kind":"square","n":4},"alpha":1.0,"c":0.3}"#);
    assert_eq!(exit_code("symmetry", &cfg, &dir.path().join("o")), 1);
}

#[test]
fn young_check_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        r#"{"young":{"family":"power_sum","p":2.0,"q":4.0},"boundary_young":{"family":"power","p":2.0},"domain":{"kind":"square","n":4},"samples":200}"#,
    );
    let (code, s) = run("young-check", &cfg, &dir.path().join("o"));
    assert_eq!(code, 0);
    assert_eq!(s["results"]["laws"].as_array().unwrap().len(), 2);
    let table = std::fs::read_to_string(dir.path().join("o/young_check.csv")).unwrap();
    assert!(table.starts_with("law,property,samples,failures,worst\n"));
    assert!(table.lines().skip(1).all(|l| l.split(',').nth(3) == Some("0")));
}
