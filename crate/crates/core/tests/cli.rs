use std::fs;
use std::path::Path;
use std::process::Command;

use circarray::io::parse_covariance_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circarray"))
}

fn manifest(name: &str) -> String {
    format!("{}/../../manifests/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn figure2_is_deterministic_and_matches_shipped_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(run(&["figure", "2", "--out", a.to_str().unwrap()]).status.success());
    let from_file = run(&["covariance", "--config", &manifest("fig2.json"), "--out", b.to_str().unwrap()]);
    assert!(from_file.status.success());
    let (fa, fb) = (read_dir_sorted(&a), read_dir_sorted(&b));
    assert_eq!(fa.len(), 6);
    assert_eq!(fa, fb);

    let text = fs::read_to_string(a.join("covariance_rN2_N8_display.csv")).unwrap();
    let m = parse_covariance_csv(&text).unwrap().matrix;
    for r in 0..16 {
        for c in 0..16 {
            if r / 2 != c / 2 {
                assert_eq!(m[(r, c)], 0.0);
            }
        }
    }
}

#[test]
fn zero_distance_gives_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&[
        "covariance",
        "--config",
        &manifest("fig2.json"),
        "--profile",
        "rN4",
        "--z",
        "0",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(tmp.path().join("covariance_rN4_N8.csv")).unwrap();
    let csv = parse_covariance_csv(&text).unwrap();
    assert_eq!(csv.z, 0.0);
    assert_eq!(csv.matrix, nalgebra::DMatrix::<f64>::identity(16, 16));
}

#[test]
fn vlf_sweep_with_loss_records_affine_map() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_modes": 8, "coupling_per_mm": 0.45, "eta_per_mm": 0.015,
            "pump": {"kind": "uniform_phase"}, "z_max_mm": 20.0, "z_steps": 40}"#,
    )
    .unwrap();
    let out = run(&["vlf-sweep", "--config", cfg.to_str().unwrap(), "--loss", "0.5", "--out", tmp.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(tmp.path().join("vlf_r0.csv")).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    assert_eq!(rows.len(), 41 * 6);
    for r in &rows {
        let value: f64 = r[col("value")].parse().unwrap();
        let lossless: f64 = r[col("lossless_value")].parse().unwrap();
        assert!((value - (0.5 * lossless + 2.0)).abs() < 1e-12);
        assert_eq!(r[col("transmittance")], "0.5");
    }
}

#[test]
fn verify_passes_on_default_grid() {
    let out = run(&["verify"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.lines().last().unwrap().ends_with("checks passed"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn verify_reports_rejected_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"n_modes": 6, "coupling_per_mm": 0.45, "eta_per_mm": 0.015,
            "pump": {"kind": "alternating_half_pi"}, "z_max_mm": 20.0}"#,
    )
    .unwrap();
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("r = N/4 requires N ≡ 0 mod 4, got N = 6"), "{stdout}");

    let out = run(&["covariance", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N ≡ 0 mod 4"));
}

#[test]
fn custom_profile_file() {
    let tmp = tempfile::tempdir().unwrap();
    let phases = tmp.path().join("phases.json");
    fs::write(&phases, "[0.0, 0.5, 1.0, 1.5, 2.0]").unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_modes": 5, "coupling_per_mm": 0.45, "eta_per_mm": 0.015,
            "pump": {"kind": "uniform_phase"}, "z_max_mm": 10.0}"#,
    )
    .unwrap();
    let spec = format!("custom:{}", phases.display());
    let ok = run(&["covariance", "--config", cfg.to_str().unwrap(), "--profile", &spec, "--out", tmp.path().to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(tmp.path().join("covariance_custom_N5.csv").exists());

    let analytic = run(&[
        "covariance",
        "--config",
        cfg.to_str().unwrap(),
        "--profile",
        &spec,
        "--analytic",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(!analytic.status.success());
}

#[test]
fn oracle_and_analytic_flags_conflict() {
    let out = run(&["covariance", "--config", &manifest("fig2.json"), "--oracle", "--analytic"]);
    assert!(!out.status.success());
}

#[test]
fn unknown_figure_is_rejected() {
    assert!(!run(&["figure", "5"]).status.success());
}
