use std::path::Path;
use std::process::Command;

use serde_json::Value;

const EXAMPLE1: &str = "37/(x-3) + 37/sqrt(pi) + 6*(-271*sqrt(pi) + 192*sqrt(2*pi))*sqrt(2/pi)*x \
    + (-sqrt(2) + 315*sqrt(pi) - 222*sqrt(2*pi))*sqrt(2/pi)*(2*x^2 - 1) \
    + (3513*sqrt(pi) - 2484*sqrt(2*pi))*sqrt(2/pi)*(4*x^3 - 3*x) \
    + (sqrt(2) + 10674*sqrt(pi) - 7548*sqrt(2*pi))*sqrt(2/pi)*(8*x^4 - 8*x^2 + 1)";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pade-ortho"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fabry_writes_ratio_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "fabry",
            "--function",
            "1/(x-2)",
            "--measure",
            "chebyshev1",
            "--n-max",
            "24",
            "-o",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("fabry.csv")).unwrap();
    assert!(csv.starts_with("n,re_tau,im_tau,abs_tau\n"));
    let s = read_json(&dir.path().join("summary.json"));
    let rho0 = s["rho0"].as_f64().unwrap();
    assert!((rho0 - 3.732_050_807_568_877).abs() < 1e-6, "{rho0}");
    assert_eq!(s["converged"], Value::Bool(true));
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["job"]["command"], "fabry");
    assert!(m["wall_time_seconds"].is_number());
}

#[test]
fn example1_approx_reports_non_unique() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["approx", "--function", EXAMPLE1, "--n", "1", "--m", "2", "-o"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let a = read_json(&dir.path().join("approximant.json"));
    assert_eq!(a["unique"], Value::Bool(false));
    assert_eq!(a["n"], 1);
    assert_eq!(a["m"], 2);
    assert!(a["certificate"]["sample_denominators"].as_array().unwrap().len() >= 2);
}

#[test]
fn missing_m_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["approx", "--function", "1/(z-2)", "--n", "3", "-o"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("m: required"), "{err}");
}

#[test]
fn job_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let job = dir.path().join("job.json");
    std::fs::write(
        &job,
        r#"{"command": "approx", "function": "1/(z-3)", "n": 2, "m": 1, "measure": {"kind": "chebyshev1"}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("--job")
        .arg(&job)
        .args(["--n", "4", "-o"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let a = read_json(&out_dir.join("approximant.json"));
    assert_eq!(a["n"], 4);
    assert!((a["poles"][0][0].as_f64().unwrap() - 3.0).abs() < 1e-10);
}

#[test]
fn outputs_are_deterministic() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = bin()
            .args([
                "poles",
                "--function",
                "1/(z-2)+1/(z-5)",
                "--m",
                "2",
                "--n-min",
                "4",
                "--n-max",
                "12",
                "-o",
            ])
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        (
            std::fs::read(dir.path().join("poles.csv")).unwrap(),
            std::fs::read(dir.path().join("summary.json")).unwrap(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn numerical_failure_writes_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    // a polynomial has no pole correspondence: both denominators are degenerate
    let out = bin()
        .args(["compare-classical", "--function", "z^2", "--n", "4", "--m", "1", "-o"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let d = read_json(&dir.path().join("diagnostic.json"));
    assert_eq!(d["command"], "compare-classical");
}

#[test]
fn json_format_converts_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "expand",
            "--function",
            "exp(z)",
            "--n-max",
            "12",
            "--format",
            "json",
            "-o",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = read_json(&dir.path().join("coeffs.json"));
    assert_eq!(rows.as_array().unwrap().len(), 13);
    assert_eq!(rows[0]["n"], 0);
}
