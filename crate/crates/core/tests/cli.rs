// reference values are quoted at the precision they were computed to
#![allow(clippy::excessive_precision)]

use std::path::Path;
use std::process::{Command, Output};

use gibbsgeo::pipeline::{CURVATURE_HEADER, EDGE_HEADER, EXPONENT_HEADER, MESH_HEADER, SATURATION_HEADER};

fn gibbsgeo(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gibbsgeo"))
        .args(args)
        .env("GIBBSGEO_OUT", out)
        .output()
        .expect("binary runs")
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn all_writes_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = gibbsgeo(&["all"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let cases: [(&str, &[&str], usize); 5] = [
        ("saturation.csv", &SATURATION_HEADER, 50),
        ("curvature.csv", &CURVATURE_HEADER, 50),
        ("edge.csv", &EDGE_HEADER, 50),
        ("surface_mesh.csv", &MESH_HEADER, 33 * 48 + 2 * 50),
        ("exponents.csv", &EXPONENT_HEADER, 0),
    ];
    for (name, header, count) in cases {
        let (h, rows) = read_rows(&dir.path().join(name));
        assert_eq!(h, header, "{name}");
        if count > 0 {
            assert_eq!(rows.len(), count, "{name}");
        } else {
            assert!(!rows.is_empty());
        }
    }
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.lines().any(|l| l == "result = PASS"), "{summary}");
}

#[test]
fn saturation_row_matches_reference() {
    let dir = tempfile::tempdir().unwrap();
    let out = gibbsgeo(
        &["coexist", "--set", "grid.t_max=0.9", "--set", "grid.count=5", "--set", "grid.spacing=\"linear\""],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (h, rows) = read_rows(&dir.path().join("saturation.csv"));
    assert_eq!(rows.len(), 5);
    let last = &rows[4];
    let col = |name: &str| last[h.iter().position(|c| c == name).unwrap()].parse::<f64>().unwrap();
    assert_eq!(col("T"), 0.9);
    let close = |a: f64, b: f64| ((a - b) / b).abs() <= 1e-11;
    assert!(close(col("V_L"), 0.60340190317800295001));
    assert!(close(col("V_G"), 2.3488423762022276877));
    assert!(close(col("P_sat"), 0.24262438195209418276));
    assert!(close(col("mu_sat"), 0.95237917232241023662));
    // every number carries 17 significant digits
    for cell in last {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 18, "{cell}");
    }
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[grid]\ncount = 12\n").unwrap();
    let out = gibbsgeo(&["coexist", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(out.status.success());
    assert_eq!(read_rows(&dir.path().join("saturation.csv")).1.len(), 12);

    let out = gibbsgeo(&["coexist", "--config", cfg.to_str().unwrap(), "--set", "grid.count=7"], dir.path());
    assert!(out.status.success());
    assert_eq!(read_rows(&dir.path().join("saturation.csv")).1.len(), 7);
}

#[test]
fn bad_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = gibbsgeo(&["coexist", "--set", "grid.bogus=1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = gibbsgeo(&["coexist", "--config", "/nonexistent/run.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = gibbsgeo(&["coexist", "--set", "grid.t_max=1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_tolerance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = gibbsgeo(&["coexist", "--set", "tolerances.identity=1e-30"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.lines().any(|l| l == "result = FAIL"));
}

#[test]
fn output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert!(gibbsgeo(&["edge"], d.path()).status.success());
    }
    for name in ["edge.csv", "summary.txt"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}
