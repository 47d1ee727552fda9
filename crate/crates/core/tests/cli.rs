//! End-to-end runs of the `npweyl` binary: exit codes, output files, config
//! precedence, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

fn npweyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_npweyl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_lines(output: &Output) -> Vec<String> {
    String::from_utf8_lossy(&output.stdout)
        .lines()
        .map(|l| l.to_string())
        .collect()
}

fn stdout_value(output: &Output, key: &str) -> f64 {
    let prefix = format!("{key}=");
    stdout_lines(output)
        .iter()
        .find_map(|l| l.strip_prefix(&prefix).map(|v| v.parse().unwrap()))
        .unwrap_or_else(|| panic!("missing {key} in stdout"))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn geometry_sphere_hits_the_reference_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let result = npweyl(&[
        "geometry", "--shape", "sphere", "--rho", "1", "--res", "64x128", "--out", out,
    ]);
    assert!(result.status.success(), "{result:?}");
    let report = read_json(&dir.path().join("geometry.json"));
    let c = report["predicted_weyl_constant"].as_f64().unwrap();
    assert!((c - 0.25).abs() <= 1e-6, "C = {c}");
    assert!((stdout_value(&result, "predicted_weyl_constant") - c).abs() < 1e-15);
    // quadrature dump is written alongside
    let quad = read_json(&dir.path().join("quad.json"));
    assert_eq!(quad["chi"], 2);
    assert_eq!(quad["nodes"].as_array().unwrap().len(), 64 * 128);
}

#[test]
fn geometry_clifford_torus_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let result = npweyl(&[
        "geometry", "--shape", "clifford", "--res", "64x64", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let report = read_json(&dir.path().join("geometry.json"));
    let w = report["willmore_energy"].as_f64().unwrap();
    let c = report["predicted_weyl_constant"].as_f64().unwrap();
    assert!((w - 2.0 * std::f64::consts::PI.powi(2)).abs() <= 1e-8);
    assert!((c - (3.0 * std::f64::consts::PI).sqrt() / 8.0).abs() <= 1e-8);
}

#[test]
fn invalid_torus_radii_exit_with_config_code() {
    let result = npweyl(&["geometry", "--shape", "torus", "--R", "1", "--r", "2"]);
    assert_eq!(result.status.code(), Some(1));
    let err = String::from_utf8_lossy(&result.stderr);
    assert!(err.contains("R > r"), "stderr: {err}");
}

#[test]
fn unknown_flag_is_a_config_error() {
    let result = npweyl(&["geometry", "--no-such-flag"]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn spectrum_writes_csv_and_fit_with_echoed_window() {
    let dir = tempfile::tempdir().unwrap();
    let result = npweyl(&[
        "spectrum", "--shape", "sphere", "--res", "8x16", "--window", "4:10", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("j,re,im,modulus,singular_value"));
    assert_eq!(csv.lines().count(), 1 + 8 * 16);
    let first = csv.lines().nth(1).unwrap();
    let lambda0: f64 = first.split(',').nth(3).unwrap().parse().unwrap();
    assert!((lambda0 - 0.5).abs() < 1e-12);

    let fit = read_json(&dir.path().join("fit.json"));
    assert_eq!(fit["window"][0], 4);
    assert_eq!(fit["window"][1], 10);
    for key in ["c", "slope", "predicted", "rel_dev"] {
        assert!(fit[key].is_number(), "missing {key}");
    }
}

#[test]
fn open_mesh_fails_with_geometry_code_and_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("open.off");
    std::fs::write(&mesh_path, "OFF\n3 1 3\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
    let out_dir = dir.path().join("out");
    let result = npweyl(&[
        "spectrum",
        "--shape",
        &format!("mesh:{}", mesh_path.display()),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    let err = String::from_utf8_lossy(&result.stderr);
    assert!(err.contains("open surface"), "stderr: {err}");
    assert!(!out_dir.join("spectrum.csv").exists());
    assert!(!out_dir.join("fit.json").exists());
}

const ICOSAHEDRON_OFF: &str = "OFF
12 20 30
0 1.618033988749895 1
0 1.618033988749895 -1
0 -1.618033988749895 1
0 -1.618033988749895 -1
1.618033988749895 1 0
1.618033988749895 -1 0
-1.618033988749895 1 0
-1.618033988749895 -1 0
1 0 1.618033988749895
-1 0 1.618033988749895
1 0 -1.618033988749895
-1 0 -1.618033988749895
3 0 8 4
3 0 4 1
3 0 1 6
3 0 6 9
3 0 9 8
3 4 8 5
3 4 5 10
3 4 10 1
3 1 10 11
3 1 11 6
3 6 11 7
3 6 7 9
3 9 7 2
3 9 2 8
3 8 2 5
3 2 3 5
3 2 7 3
3 3 7 11
3 3 11 10
3 3 10 5
";

#[test]
fn mesh_geometry_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("icosa.off");
    std::fs::write(&mesh_path, ICOSAHEDRON_OFF).unwrap();
    let result = npweyl(&[
        "geometry",
        "--shape",
        "mesh",
        "--mesh",
        mesh_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let report = read_json(&dir.path().join("geometry.json"));
    assert_eq!(report["euler_characteristic"], 2);
}

#[test]
fn sphere_exact_rows_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let result = npweyl(&[
        "sphere-exact", "--count", "4", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sphere_exact.csv")).unwrap();
    let values: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 4);
    assert_eq!(values[0], 0.5);
    for v in &values[1..] {
        assert!((v - 1.0 / 6.0).abs() < 1e-15);
    }

    let result = npweyl(&["sphere-exact", "--count", "0"]);
    assert_eq!(result.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let result = npweyl(&[
        "sphere-exact", "--count", "10000", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sphere_exact.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    let value: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 1.0 / 398.0).abs() < 1e-18);
}

#[test]
fn mobius_inversion_preserves_willmore_energy() {
    let dir = tempfile::tempdir().unwrap();
    let result = npweyl(&[
        "mobius", "--shape", "sphere", "--mobius", "invert:3,0,0,1", "--res", "32x64",
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{result:?}");
    let rel = stdout_value(&result, "delta_willmore_relative");
    assert!(rel <= 1e-6, "relative Willmore drift {rel}");
    assert!(dir.path().join("geometry_before.json").exists());
    assert!(dir.path().join("geometry_after.json").exists());
}

#[test]
fn mobius_scaling_changes_area_but_not_energy() {
    let dir = tempfile::tempdir().unwrap();
    let result = npweyl(&[
        "mobius", "--shape", "sphere", "--mobius", "scale:3", "--res", "16x32", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(result.status.success());
    assert!(stdout_value(&result, "delta_willmore") <= 1e-10);
    assert!(stdout_value(&result, "delta_area").abs() > 1.0);
}

#[test]
fn mobius_center_on_surface_is_a_geometry_error() {
    let result = npweyl(&[
        "mobius", "--shape", "sphere", "--mobius", "invert:1,0,0,1", "--res", "16x32",
    ]);
    assert_eq!(result.status.code(), Some(2));
    let err = String::from_utf8_lossy(&result.stderr);
    assert!(err.contains("too close"), "stderr: {err}");
}

#[test]
fn mobius_requires_a_map() {
    let result = npweyl(&["mobius", "--shape", "sphere"]);
    assert_eq!(result.status.code(), Some(1));
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(&config, "shape=sphere\nrho=2.0\nres=16x32\n").unwrap();
    let out_a = dir.path().join("a");
    let result = npweyl(&[
        "geometry", "--config", config.to_str().unwrap(), "--out", out_a.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let area = read_json(&out_a.join("geometry.json"))["area"].as_f64().unwrap();
    assert!((area - 16.0 * std::f64::consts::PI).abs() < 1e-6, "{area}");

    // the flag beats the file
    let out_b = dir.path().join("b");
    let result = npweyl(&[
        "geometry", "--config", config.to_str().unwrap(), "--rho", "1", "--out",
        out_b.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let area = read_json(&out_b.join("geometry.json"))["area"].as_f64().unwrap();
    assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-6, "{area}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (out_a, out_b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&out_a, &out_b] {
        let result = npweyl(&[
            "spectrum", "--shape", "torus", "--R", "2", "--r", "1", "--res", "8x16",
            "--seed", "11", "--out", out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    for name in ["spectrum.csv", "fit.json"] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    let (out_c, out_d) = (dir.path().join("c"), dir.path().join("d"));
    for out in [&out_c, &out_d] {
        let result = npweyl(&[
            "geometry", "--shape", "ellipsoid", "--a", "1", "--b", "1.3", "--c", "1.7",
            "--res", "16x32", "--out", out.to_str().unwrap(),
        ]);
        assert!(result.status.success());
    }
    for name in ["geometry.json", "quad.json"] {
        let a = std::fs::read(out_c.join(name)).unwrap();
        let b = std::fs::read(out_d.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}
