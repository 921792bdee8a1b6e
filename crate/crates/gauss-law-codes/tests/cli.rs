//! The command line against the bundled specs: outputs and exit codes.

mod common;

use std::process::Command;

use common::spec_path;
use gauss_law_codes::cli::run;

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
fn glcodes(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("glcodes".to_string()).chain(args.iter().map(|a| a.to_string()));
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn spec(name: &str) -> String {
    spec_path(name).display().to_string()
}

#[test]
fn params_reports_triangle_parameters() {
    let (code, out, _) = glcodes(&["--format", "records", "params", "--spec", &spec("z2-triangle-pure.spec")]);
    assert_eq!(code, 0);
    let first = out.lines().next().unwrap();
    assert!(first.starts_with("params=[3,1,3] "), "{first}");
    assert!(first.contains("d_z=1"));
    assert_eq!(out.lines().filter(|l| l.starts_with("stabilizer=")).count(), 3);
}

#[test]
fn params_with_oracle_agrees_on_bosonic_code() {
    let (code, out, _) = glcodes(&["params", "--spec", &spec("z2-triangle-bosonic.spec"), "--oracle"]);
    assert_eq!(code, 0);
    assert!(out.contains("parameters  [6,3,3], d_Z=1"), "{out}");
    assert!(out.contains("agrees"), "{out}");
}

#[test]
fn params_on_large_torus_is_symbolic() {
    let (code, out, _) = glcodes(&["--format", "records", "params", "--spec", &spec("z2-torus-4x4-pure.spec")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("params=[32,17,4] "), "{out}");
}

#[test]
fn kl_flags_the_mixed_set() {
    let args = [
        "--format",
        "records",
        "kl",
        "--spec",
        &spec("z2-triangle-pure.spec"),
        "--errors",
        &spec("z2-triangle-mixed.errors"),
        "--oracle",
    ];
    let (code, out, _) = glcodes(&args);
    assert_eq!(code, 1);
    assert!(out.contains("a=X1 b=X0X2 verdict=violation witness=(1,1,1) oracle=loops-only agree=true"), "{out}");
}

#[test]
fn kl_passes_single_flips() {
    let args =
        ["kl", "--spec", &spec("z2-triangle-pure.spec"), "--errors", &spec("z2-triangle-single-flips.errors"), "--oracle"];
    let (code, out, _) = glcodes(&args);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("oracle      0 disagreements"), "{out}");
}

#[test]
fn sections_validate_and_reject() {
    for file in ["z2-triangle-single-flips.section", "z2-triangle-double-flips.section"] {
        let args = ["--format", "records", "sections", "--spec", &spec("z2-triangle-pure.spec"), "--section", &spec(file)];
        let (code, out, _) = glcodes(&args);
        assert_eq!(code, 0, "{file}");
        assert!(out.contains("entries=4 correctable=true maximality=maximal"), "{out}");
    }
    let args = ["sections", "--spec", &spec("z2-triangle-pure.spec"), "--section", &spec("z2-triangle-not-a-section.section")];
    let (code, _, err) = glcodes(&args);
    assert_eq!(code, 1);
    assert!(err.contains("not a section"), "{err}");
}

#[test]
fn simulate_is_seeded_and_recovers() {
    let args = ["--format", "records", "simulate", "--spec", &spec("z2-triangle-bosonic.spec"), "--trials", "20", "--seed", "3"];
    let first = glcodes(&args);
    let second = glcodes(&args);
    assert_eq!(first, second, "same seed, same transcript");
    assert_eq!(first.0, 0);
    assert!(first.1.contains("successes=20 trials=20"), "{}", first.1);
}

#[test]
fn simulate_reports_logical_flip() {
    let args = ["simulate", "--spec", &spec("z2-triangle-pure.spec"), "--trials", "2", "--inject", "W[0:1] W[1:1] W[2:1]"];
    let (code, out, _) = glcodes(&args);
    assert_eq!(code, 1);
    assert!(out.contains("logical_flip=true"), "{out}");
    assert!(out.contains("success 0/2"), "{out}");
}

#[test]
fn equiv_passes_on_the_triangle() {
    let args =
        ["--format", "records", "equiv", "--spec", &spec("z2-triangle-vacuum.spec"), "--gl-spec", &spec("z2-triangle-pure.spec")];
    let (code, out, _) = glcodes(&args);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().filter(|l| l.starts_with("check=")).all(|l| l.contains("verdict=pass")));
}

#[test]
fn equiv_reports_oscillator_kernel() {
    let args = [
        "--format",
        "records",
        "equiv",
        "--spec",
        &spec("scalar-qed-truncated.spec"),
        "--gl-spec",
        &spec("z4-triangle-pure.spec"),
    ];
    let (code, out, _) = glcodes(&args);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("kernel=(1,1)_vs_(0,0)"), "{out}");
    assert!(out.contains("check=coarse-grained-section verdict=pass"), "{out}");
}

#[test]
fn equiv_rejects_mismatched_groups() {
    let args = ["equiv", "--spec", &spec("z2-triangle-vacuum.spec"), "--gl-spec", &spec("z4-triangle-pure.spec")];
    assert_eq!(glcodes(&args).0, 1);
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = std::env::temp_dir().join(format!("glcodes-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.spec");
    std::fs::write(&bad, "group = Z1\n").unwrap();
    let (code, _, err) = glcodes(&["params", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "{err}");
    assert_eq!(glcodes(&["params", "--spec", "/nonexistent/x.spec"]).0, 2);
    assert_eq!(glcodes(&["frobnicate"]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_glcodes");
    let ok = Command::new(bin).args(["params", "--spec", &spec("z2-triangle-pure.spec")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("[3,1,3]"));
    let bad = Command::new(bin).args(["params", "--spec", "/nonexistent/x.spec"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
