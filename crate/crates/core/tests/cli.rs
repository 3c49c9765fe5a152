use std::path::Path;
use std::process::{Command, Output};

use softgrip::geometry::FingertipGeometry;
use softgrip::joint::{protocol_alphas_deg, protocol_pressures_kpa};
use tempfile::TempDir;

fn softgrip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softgrip"))
        .args(args)
        .output()
        .expect("spawn softgrip")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Noise-free log of the default ring model, two trials per cell.
fn synthetic_log(skip: Option<(f64, f64)>) -> String {
    let a1 = FingertipGeometry::default().a1_mm;
    let mut s = String::from("alpha_deg,pressure_kpa,fy_n,fz_n\n");
    for a in protocol_alphas_deg() {
        for pr in protocol_pressures_kpa() {
            if skip == Some((a, pr)) {
                continue;
            }
            let tau = (200.0 + 4.0 * pr) * a.to_radians();
            let fy = -tau / (a1 * a.to_radians().cos());
            for _ in 0..2 {
                s.push_str(&format!("{a},{pr},{fy},0\n"));
            }
        }
    }
    s
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn calibrate_recovers_model() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("log.csv");
    std::fs::write(&log, synthetic_log(None)).unwrap();
    let out = dir.path().join("out");
    let o = softgrip(&["calibrate", p(&log), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("joint_model.json")).unwrap()).unwrap();
    let k0 = model["data"]["k0_nmm_per_rad"].as_f64().unwrap();
    let k1 = model["data"]["k1_nmm_per_rad_per_kpa"].as_f64().unwrap();
    assert!((k0 - 200.0).abs() < 1e-6 && (k1 - 4.0).abs() < 1e-8, "{k0} {k1}");
    assert!(out.join("calibration_grid.json").exists());
    let res = std::fs::read_to_string(out.join("calibration_residuals.csv")).unwrap();
    assert_eq!(data_rows(&res).len(), 17 * 16);
}

#[test]
fn calibrate_reports_missing_cell() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("log.csv");
    std::fs::write(&log, synthetic_log(Some((20.0, 70.0)))).unwrap();
    let o = softgrip(&["calibrate", p(&log), "--out", p(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("alpha=20") && err.contains("pressure=70"), "{err}");
}

#[test]
fn calibrate_rejects_empty_log() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("log.csv");
    std::fs::write(&log, "").unwrap();
    let o = softgrip(&["calibrate", p(&log), "--out", p(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no rows"));
}

#[test]
fn torque_map_shape() {
    let dir = TempDir::new().unwrap();
    let o = softgrip(&["torque-map", "--out", p(dir.path())]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("torque_map.csv")).unwrap();
    assert!(csv.starts_with("# config_sha256="));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 272);
    let val = |r: &Vec<String>, i: usize| r[i].parse::<f64>().unwrap();
    for r in &rows {
        if val(r, 0) == 0.0 {
            assert_eq!(val(r, 2), 0.0);
        }
    }
    // rows are alpha-major, pressure-minor
    for w in rows.windows(2) {
        if val(&w[0], 0) == val(&w[1], 0) {
            assert!(val(&w[1], 2) >= val(&w[0], 2));
        }
    }
    assert!(dir.path().join("torque_map.svg").exists());
}

#[test]
fn grasp_sweep_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let o = softgrip(&["grasp-sweep", "--out", p(d), "--trials", "200", "--seed", "7"]);
        assert!(o.status.success());
    }
    for f in ["grasp_sweep.csv", "grasp_sweep.json", "grasp_sweep.svg"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let csv = std::fs::read_to_string(a.join("grasp_sweep.csv")).unwrap();
    assert!(csv.contains("# seed=7\n"));
    assert_eq!(data_rows(&csv).len(), 48);
}

#[test]
fn objects_groups_and_assumptions() {
    let dir = TempDir::new().unwrap();
    let o = softgrip(&["objects", "--out", p(dir.path()), "--trials", "100"]);
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("objects.json")).unwrap()).unwrap();
    assert!(!json["assumptions"].as_array().unwrap().is_empty());
    let csv = std::fs::read_to_string(dir.path().join("objects.csv")).unwrap();
    let mut names: Vec<String> = data_rows(&csv)
        .iter()
        .map(|r| r[1].split(';').next().unwrap().to_string())
        .collect();
    names.dedup();
    assert_eq!(names.len(), 5);
}

#[test]
fn config_file_overrides_and_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "seed = 3\nn_trials = 20\n[joint]\nk0_nmm_per_rad = 150.0\nk1_nmm_per_rad_per_kpa = 3.0\n[sweep]\nalphas_deg = [45.0]\npressures_kpa = [0.0, 100.0]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = softgrip(&["grasp-sweep", "--config", p(&cfg), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("grasp_sweep.csv")).unwrap();
    assert!(csv.contains("# seed=3\n"));
    assert_eq!(data_rows(&csv).len(), 2);

    std::fs::write(&cfg, "bogus_key = 1\n").unwrap();
    assert_eq!(softgrip(&["grasp-sweep", "--config", p(&cfg), "--out", p(&out)]).status.code(), Some(2));
    std::fs::write(&cfg, "[compare]\nconditions = [\"c9\"]\n").unwrap();
    assert_eq!(softgrip(&["compare-rigid", "--config", p(&cfg), "--out", p(&out)]).status.code(), Some(2));
    let missing = dir.path().join("nope.toml");
    assert_eq!(softgrip(&["torque-map", "--config", p(&missing)]).status.code(), Some(2));
}

#[test]
fn config_calibration_log_is_relative_to_config() {
    let dir = TempDir::new().unwrap();
    let sub = dir.path().join("cfg");
    std::fs::create_dir(&sub).unwrap();
    std::fs::write(sub.join("log.csv"), synthetic_log(None)).unwrap();
    std::fs::write(sub.join("run.toml"), "[joint]\ncalibration_csv = \"log.csv\"\n").unwrap();
    let out = dir.path().join("out");
    let o = softgrip(&["torque-map", "--config", p(&sub.join("run.toml")), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fitted = std::fs::read_to_string(out.join("torque_map.csv")).unwrap();
    let default_dir = dir.path().join("default");
    assert!(softgrip(&["torque-map", "--out", p(&default_dir)]).status.success());
    let default = std::fs::read_to_string(default_dir.join("torque_map.csv")).unwrap();
    // same surface, different provenance
    let body = |s: &str| s.lines().skip(2).map(|l| l.to_string()).collect::<Vec<_>>();
    assert_eq!(data_rows(&fitted).len(), 272);
    assert_ne!(fitted.lines().next(), default.lines().next());
    for (a, b) in body(&fitted).iter().zip(body(&default)).skip(1) {
        let x: f64 = a.rsplit(',').next().unwrap().parse().unwrap();
        let y: f64 = b.rsplit(',').next().unwrap().parse().unwrap();
        assert!((x - y).abs() <= 1e-6 * y.abs().max(1.0), "{a} vs {b}");
    }
}
