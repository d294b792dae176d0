//! End-to-end CLI checks: exit codes, file outputs, spec'd command examples.

use std::path::Path;
use std::process::Command;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_cheegerlab")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(exe()).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn last_csv_field(csv: &str, column: usize) -> f64 {
    let line = csv.lines().last().unwrap();
    line.split(',').nth(column).unwrap().parse().unwrap()
}

#[test]
fn model_hyperbolic_quotient_column() {
    let (code, stdout, _) = run(&["model", "--b", "-1", "--m", "2", "--rmax", "10"]);
    assert_eq!(code, 0);
    // q_w(10) = (cosh 10 - 1)/sinh 10 ~ 0.99991.
    let q = last_csv_field(&stdout, 6);
    assert!((q - 0.99991).abs() < 1e-4, "q = {q}");
}

#[test]
fn model_flat_quotient_is_r_over_m() {
    let (code, stdout, _) = run(&["model", "--b", "0", "--m", "3", "--rmax", "1"]);
    assert_eq!(code, 0);
    let q = last_csv_field(&stdout, 6);
    assert!((q - 1.0 / 3.0).abs() < 1e-9, "q = {q}");
}

#[test]
fn model_rejects_bad_csv_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "r,w\n0,0\n1,1\n0.5,0.5\n").unwrap();
    let (code, _, stderr) = run(&["model", "--w-csv", bad.to_str().unwrap(), "--m", "2", "--rmax", "0.9"]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.contains("increasing"));
}

#[test]
fn constellation_reports_verdicts_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("cons.json");
    std::fs::write(
        &spec,
        r#"{ "m": 2, "ambient": {"b": -1.0}, "h": {"kind": "zero"}, "R": 50.0 }"#,
    )
    .unwrap();
    let (code, stdout, _) = run(&["constellation", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["balance"]["balanced_above"], true);
    assert_eq!(v["balance"]["balanced_below"], true);
    let upper = v["cheeger_upper"]["value"].as_f64().unwrap();
    let lower = v["cheeger_lower"]["value"].as_f64().unwrap();
    assert!((upper - 1.0).abs() < 1e-6 && (lower - 1.0).abs() < 1e-6);
}

#[test]
fn constellation_unbalanced_verdicts_are_data_not_failures() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("cons.json");
    std::fs::write(
        &spec,
        r#"{ "m": 3, "ambient": {"b": -1.0}, "h": {"kind": "constant", "value": 1.5}, "R": 50.0 }"#,
    )
    .unwrap();
    let (code, stdout, _) = run(&["constellation", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0, "unfavorable verdicts still exit 0");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["balance"]["balanced_above"], true);
    assert_eq!(v["balance"]["balanced_below"], false);
    assert!(v["balance"]["witness_below"].is_object());
    // The lower bound is negative here (vacuous) and carries a warning.
    let lower = v["cheeger_lower"]["value"].as_f64().unwrap();
    assert!(lower < 0.0);
    let warnings = v["cheeger_lower"]["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("vacuous")));
}

#[test]
fn constellation_exp_profile_example() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("cons.json");
    std::fs::write(
        &spec,
        r#"{ "m": 2, "ambient": {"profile": "exp-r2"}, "h": {"kind": "zero"}, "R": 50.0 }"#,
    )
    .unwrap();
    // Verdicts are data: the command succeeds, reports (above=F, below=T),
    // and carries the divergent tails as per-value errors (this profile has
    // no finite quotient limit).
    let (code, stdout, stderr) = run(&["constellation", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["balance"]["balanced_above"], false);
    assert_eq!(v["balance"]["balanced_below"], true);
    assert!(v["balance"]["witness_above"]["r"].as_f64().unwrap() > 0.5);
    assert!(v["cheeger_upper"]["error"].as_str().unwrap().contains("tail"));
    assert!(v["cheeger_lower"]["error"].as_str().unwrap().contains("tail"));
}

#[test]
fn gen_analyze_pipeline_with_mismatch_guards() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("plane.off");
    let (code, _, stderr) = run(&[
        "gen", "--kind", "plane", "--tmax", "6", "--density", "0.5", "--out",
        mesh.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    assert!(mesh.exists());

    let flat = dir.path().join("flat.json");
    std::fs::write(
        &flat,
        r#"{ "m": 2, "ambient": {"b": 0.0}, "h": {"kind": "zero"}, "R": 30.0 }"#,
    )
    .unwrap();
    let hyp = dir.path().join("hyp.json");
    std::fs::write(
        &hyp,
        r#"{ "m": 2, "ambient": {"b": -1.0}, "h": {"kind": "zero"}, "R": 30.0 }"#,
    )
    .unwrap();

    // Matching ambient: full analysis succeeds and writes both artifacts.
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&[
        "analyze", "--mesh", mesh.to_str().unwrap(), "--constellation", flat.to_str().unwrap(),
        "--t-min", "1", "--t-max", "5.5", "--t-count", "20",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["isoperimetric"]["pass"], true);
    assert!(out.join("profile.csv").exists());

    // Ambient mismatch: hyperbolic constellation against a Euclidean mesh.
    let (code, _, stderr) = run(&[
        "analyze", "--mesh", mesh.to_str().unwrap(), "--constellation", hyp.to_str().unwrap(),
        "--t-min", "1", "--t-max", "5.5", "--t-count", "20",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stderr.contains("tagged"));

    // Radii beyond the truncation radius.
    let (code, _, stderr) = run(&[
        "analyze", "--mesh", mesh.to_str().unwrap(), "--constellation", flat.to_str().unwrap(),
        "--t-min", "1", "--t-max", "9.0", "--t-count", "20",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stderr.contains("truncation"));
}

#[test]
fn laplacian_and_divergence_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("plane.off");
    assert_eq!(
        run(&["gen", "--kind", "plane", "--tmax", "6", "--density", "0.7", "--out", mesh.to_str().unwrap()]).0,
        0
    );
    let flat = dir.path().join("flat.json");
    std::fs::write(
        &flat,
        r#"{ "m": 2, "ambient": {"b": 0.0}, "h": {"kind": "zero"}, "R": 30.0 }"#,
    )
    .unwrap();

    let (code, stdout, _) = run(&[
        "laplacian-check", "--mesh", mesh.to_str().unwrap(),
        "--constellation", flat.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["pass"], true);

    let (code, stdout, _) = run(&[
        "divergence-audit", "--mesh", mesh.to_str().unwrap(),
        "--constellation", flat.to_str().unwrap(), "--t", "4",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["pass"], true);

    // Degenerate radius: error, not a silent zero.
    let (code, _, _) = run(&[
        "divergence-audit", "--mesh", mesh.to_str().unwrap(),
        "--constellation", flat.to_str().unwrap(), "--t", "0.001",
    ]);
    assert_eq!(code, 4);
}

#[test]
fn catenoid_analysis_example() {
    // Scaled-down version of the corollary run: flat comparison,
    // estimate decays like 2/t.
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("cat.off");
    assert_eq!(
        run(&["gen", "--kind", "catenoid", "--neck", "1", "--tmax", "25", "--density", "0.5",
              "--out", mesh.to_str().unwrap()]).0,
        0
    );
    let flat = dir.path().join("flat.json");
    std::fs::write(
        &flat,
        r#"{ "m": 2, "ambient": {"b": 0.0}, "h": {"kind": "zero"}, "R": 40.0 }"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let (code, _, stderr) = run(&[
        "analyze", "--mesh", mesh.to_str().unwrap(), "--constellation", flat.to_str().unwrap(),
        "--t-min", "1.3", "--t-max", "24.5", "--t-count", "40",
        "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("verdict.json")).unwrap()).unwrap();
    let est = v["cheeger"]["upper_estimate_from_exhaustion"].as_f64().unwrap();
    assert!(est < 0.1, "estimate {est}");
    assert_eq!(v["cheeger"]["sandwich_verdict"], true);
}

#[test]
fn mesh_files_round_trip_through_the_loader() {
    let dir = tempfile::tempdir().unwrap();
    let mesh_path = dir.path().join("h2.off");
    assert_eq!(
        run(&["gen", "--kind", "h2-in-h3", "--b", "-1", "--tmax", "4", "--density", "1",
              "--out", mesh_path.to_str().unwrap()]).0,
        0
    );
    let text = std::fs::read_to_string(&mesh_path).unwrap();
    assert!(text.starts_with("#ambient hyperboloid b=-1\nOFF\n"), "header: {}", &text[..60]);
    let mesh = cheegerlab::mesh::SampledSubmanifold::read_off(Path::new(&mesh_path)).unwrap();
    assert!(mesh.truncation_radius() >= 4.0);
}
