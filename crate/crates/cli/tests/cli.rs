use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn hypermin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermin")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn ball_mesh_has_every_vertex_inside_the_ball() {
    let dir = tempdir().unwrap();
    let obj = dir.path().join("h.obj");
    let out = hypermin(&["sample", "--a", "5", "--model", "ball", "--grid", "80,120", "--out", obj.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&obj).unwrap();
    let verts: Vec<[f64; 3]> = text
        .lines()
        .filter(|l| l.starts_with("v "))
        .map(|l| {
            let c: Vec<f64> = l[2..].split(' ').map(|x| x.parse().unwrap()).collect();
            [c[0], c[1], c[2]]
        })
        .collect();
    assert_eq!(verts.len(), 9600);
    assert!(verts.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() < 1.0));
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 79 * 119);
}

#[test]
fn zero_pitch_is_a_totally_geodesic_plane() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = hypermin(&["sample", "--a", "0", "--model", "hyperboloid", "--format", "csv", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 80 * 120);
    assert!(rows.iter().all(|r| r[5] == 0.0));
}

#[test]
fn upper_half_space_closed_form() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let a = 10.0;
    let out = hypermin(&[
        "sample", "--a", "10", "--model", "upper-half", "--format", "csv", "--grid", "15,15", "--domain", "-1,1,-0.3,0.3",
        "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    for r in csv_rows(&csv) {
        let (u, v) = (r[0], r[1]);
        let m = v.exp() * u.tanh();
        let (zx, zy) = (m * (a * v).cos(), m * (a * v).sin());
        let t = v.exp() / u.cosh();
        let scale = 1.0 + m.abs() + t;
        assert!((r[2] - zx).abs() < 1e-10 * scale, "{r:?}");
        assert!((r[3] - zy).abs() < 1e-10 * scale, "{r:?}");
        assert!((r[4] - t).abs() < 1e-10 * scale, "{r:?}");
    }
}

#[test]
fn check_passes_and_fault_injection_fails() {
    let dir = tempdir().unwrap();
    let json = dir.path().join("c.json");
    let out = hypermin(&["check", "--a", "1", "--out", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let out = hypermin(&["check", "--a", "1", "--inject-fault", "round-trip", "--out", json.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let failed: Vec<_> = report["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "model-round-trip");
}

#[test]
fn spherical_catenoid_profile_identities() {
    let out = hypermin(&["check", "--surface", "cat-spherical", "--atilde", "1", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("profile-identity,") && l.ends_with(",true")), "{text}");
}

#[test]
fn flags_take_precedence_over_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    let csv = dir.path().join("p.csv");
    fs::write(&cfg, r#"{"a": 3.0, "grid": [4, 5], "format": "csv", "model": "hyperboloid"}"#).unwrap();
    let out = hypermin(&["sample", "--config", cfg.to_str().unwrap(), "--grid", "3,2", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(csv_rows(&csv).len(), 6);
    assert!(String::from_utf8_lossy(&out.stderr).contains("a = 3"));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"pitch": 2.0}"#).unwrap();
    assert_eq!(code(&hypermin(&["check", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&hypermin(&["check", "--surface", "cat-ball"])), 2);
    assert_eq!(code(&hypermin(&["sample", "--a", "1", "--grid", "1,1"])), 2);
    assert_eq!(code(&hypermin(&["sample", "--a", "1", "--domain", "1,2,3"])), 2);
}

#[test]
fn csv_is_twelve_digit_and_reproducible() {
    let args = ["lambda1", "--a", "2", "--domain", "-2,2,-2,2", "--spacing", "0.1"];
    let first = hypermin(&args);
    let second = hypermin(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let lambda = row[8];
    let mantissa = lambda.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 12, "{lambda}");
}

#[test]
fn sweep_writes_rows_in_order_and_a_plot() {
    let dir = tempdir().unwrap();
    let svg = dir.path().join("s.svg");
    let out = Command::new(env!("CARGO_BIN_EXE_hypermin"))
        .args(["sweep", "--a-values", "2.5,1", "--ks", "1,2", "--spacing", "0.1", "--plot", svg.to_str().unwrap()])
        .env("HYPERMIN_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<(String, String)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].to_string(), c[1].to_string())
        })
        .collect();
    let want = [("2.5", "1"), ("2.5", "2"), ("1", "1"), ("1", "2")];
    assert_eq!(keys.len(), 4);
    for ((a, k), (wa, wk)) in keys.iter().zip(want) {
        assert_eq!(a.parse::<f64>().unwrap(), wa.parse::<f64>().unwrap());
        assert_eq!(k.parse::<f64>().unwrap(), wk.parse::<f64>().unwrap());
    }
    let plot = fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.contains("zero at"));
}

#[test]
fn critical_trace_brackets_the_estimate() {
    let out = hypermin(&["critical", "--domain", "-3,3,-3,3", "--spacing", "0.1", "--bracket", "1,6", "--tol", "0.05"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let last: Vec<&str> = text.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "estimate");
    let (est, lo, hi): (f64, f64, f64) = (last[1].parse().unwrap(), last[4].parse().unwrap(), last[5].parse().unwrap());
    assert!(lo <= est && est <= hi && hi - lo <= 0.05);
    assert!((2.1..2.35).contains(&est), "{est}");
}

#[test]
fn invalid_bracket_is_reported() {
    let out = hypermin(&["critical", "--domain", "-2,2,-2,2", "--spacing", "0.2", "--bracket", "0.5,1"]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().starts_with("error,"), "{text}");
}

#[test]
fn conjugacy_rows_agree() {
    let out = hypermin(&["conjugacy", "--a-values", "2.5", "--ks", "1,2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "unstable");
    assert_eq!(row[7], "unstable");
    assert_eq!(row[8], "true");
}

#[test]
fn profiles_are_odd_about_the_waist() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = hypermin(&["profile", "--surface", "cat-hyperbolic", "--atilde", "1", "--grid", "11,1", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 11);
    for (r, m) in rows.iter().zip(rows.iter().rev()) {
        assert!((r[1] - m[1]).abs() < 1e-12 && (r[4] + m[4]).abs() < 1e-12);
    }
    let out = hypermin(&["profile", "--surface", "cat-ball", "--abar", "0.5", "--grid", "5,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&hypermin(&["profile", "--a", "1"])), 2);
}
