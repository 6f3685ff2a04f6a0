use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylcurve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn json(file: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap()
}

fn viviani(dir: &Path) -> String {
    let out = path(dir, "viviani.csv");
    let args = [
        "generate", "viviani", "--tmin", "0.1", "--tmax", "3.0", "--n", "500", "--output", &out,
    ];
    assert_eq!(code(&args), 0);
    out
}

#[test]
fn viviani_passes_on_its_cylinder_only() {
    let dir = tempfile::tempdir().unwrap();
    let pts = viviani(dir.path());
    let report = path(dir.path(), "report.json");
    let args = [
        "test", "--input", &pts, "--rho", "1", "--noisy", "--trim", "8", "--output", &report,
    ];
    assert_eq!(code(&args), 0);
    let r = json(&report);
    assert_eq!(r["verdict"], "pass");
    assert!(r["max_residual"].as_f64().unwrap() < 1e-3);
    assert!(dir.path().join("report.csv").exists());
    assert_eq!(
        code(&["test", "--input", &pts, "--rho", "1.3", "--noisy", "--trim", "8"]),
        1
    );
}

#[test]
fn untrimmed_ends_fail_the_strict_rule() {
    let dir = tempfile::tempdir().unwrap();
    let pts = viviani(dir.path());
    assert_eq!(code(&["test", "--input", &pts, "--rho", "1", "--noisy"]), 1);
}

#[test]
fn spectral_search_recovers_helix_radius() {
    let dir = tempfile::tempdir().unwrap();
    let pts = path(dir.path(), "helix.csv");
    let args = [
        "generate", "helix", "--kappa0", "2", "--tau0", "1", "--n", "400", "--output", &pts,
    ];
    assert_eq!(code(&args), 0);
    let report = path(dir.path(), "search.json");
    let args = [
        "test",
        "--input",
        &pts,
        "--rho-range",
        "0.05",
        "5",
        "--noisy",
        "--spectral",
        "--trim",
        "8",
        "--output",
        &report,
    ];
    assert_eq!(code(&args), 0);
    let r = json(&report);
    let rho = r["search"]["rho_best"].as_f64().unwrap();
    assert!((rho - 0.4).abs() < 4e-4, "{rho}");
}

#[test]
fn fit_recovers_helix_radius() {
    let dir = tempfile::tempdir().unwrap();
    let pts = path(dir.path(), "helix.csv");
    let args = [
        "generate", "helix", "--kappa0", "2", "--tau0", "1", "--output", &pts,
    ];
    assert_eq!(code(&args), 0);
    let out = path(dir.path(), "fit.json");
    assert_eq!(code(&["fit", "--input", &pts, "--output", &out]), 0);
    let f = json(&out);
    assert!((f["radius"].as_f64().unwrap() - 0.4).abs() < 1e-9);
    assert!(f["rms"].as_f64().unwrap() < 1e-9);
}

#[test]
fn analyzed_profile_can_be_tested_directly() {
    let dir = tempfile::tempdir().unwrap();
    let pts = viviani(dir.path());
    let profile = path(dir.path(), "profile.csv");
    assert_eq!(code(&["analyze", "--input", &pts, "--output", &profile]), 0);
    let header = fs::read_to_string(&profile).unwrap();
    assert!(header.lines().any(|l| l.contains("kappa")));
    assert_eq!(
        code(&["test", "--input", &profile, "--rho", "1", "--noisy", "--trim", "8"]),
        0
    );
}

#[test]
fn noisy_generation_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str, seed: &str| {
        let out = path(dir.path(), name);
        let args = [
            "generate", "--noise", "1e-3", "--seed", seed, "--output", &out, "ellipse", "--a", "2",
            "--b", "1",
        ];
        assert_eq!(code(&args), 0);
        fs::read(out).unwrap()
    };
    assert_eq!(gen("a.csv", "5"), gen("b.csv", "5"));
    assert_ne!(gen("a.csv", "5"), gen("c.csv", "6"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let pts = viviani(dir.path());
    assert_eq!(code(&["test", "--input", &pts]), 2);
    assert_eq!(
        code(&["test", "--input", &pts, "--rho", "1", "--trim", "250"]),
        2
    );
    assert_eq!(
        code(&[
            "test",
            "--input",
            &path(dir.path(), "missing.csv"),
            "--rho",
            "1"
        ]),
        2
    );
    assert_eq!(
        code(&[
            "test",
            "--input",
            &pts,
            "--rho",
            "1",
            "--rho-range",
            "0.5",
            "2"
        ]),
        2
    );
}

#[test]
fn malformed_points_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.csv");
    fs::write(&bad, "t,x,y,z\n0,1,2,3\n1,oops,2,3\n").unwrap();
    assert_eq!(code(&["fit", "--input", &bad]), 3);
}
