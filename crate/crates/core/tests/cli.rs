use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radial-entropy"))
}

fn run(dir: &Path, args: &[&str], config: &str) -> (i32, String, String) {
    let cfg = dir.join("exp.conf");
    fs::write(&cfg, config).unwrap();
    let out = bin()
        .args(args)
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn passing_run_exits_zero_and_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(tmp.path(), &["run"], "scenario = manufactured\n");
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("PASS max_nodal_error"));
    let dir = tmp.path().join("out/manufactured-0000");
    for f in ["config.echo", "report.csv", "field.txt", "diagnostics.csv"] {
        assert!(dir.join(f).is_file(), "missing {f}");
    }
}

#[test]
fn failing_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(tmp.path(), &["run"], "scenario = bounded\ncheck.tolerance = 1e-15\n");
    assert_eq!(code, 1, "{stdout}");
    assert!(stdout.contains("FAIL sup_refinement"));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    for text in [
        "scenario = nope\n",
        "scenario = bounded\nmesh.cells = 0\n",
        "scenario = bounded\nmesh.cells = 64\nmesh.cells = 128\n",
        "scenario = bounded\nnot a pair\n",
        "problem.p = 2\n",
        "scenario = manufactured\nsweep.cells = 64, 128\n",
    ] {
        let (code, _, stderr) = run(tmp.path(), &["run"], text);
        assert_eq!(code, 2, "{text:?}: {stderr}");
        assert!(stderr.contains("config error") || stderr.contains("error"), "{stderr}");
    }
    let out = bin().args(["run", "/nonexistent/exp.conf"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_three_and_keeps_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(tmp.path(), &["run"], "scenario = bounded\nsolver.max_iterations = 1\n");
    assert_eq!(code, 3, "{stdout}");
    assert!(stdout.contains("solver failure"));
    let diag = fs::read_to_string(tmp.path().join("out/bounded-0000/diagnostics.csv")).unwrap();
    assert!(diag.starts_with("# schema=1"));
    assert!(diag.lines().count() > 2, "{diag}");
}

#[test]
fn sweep_writes_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = run(
        tmp.path(),
        &["sweep", "--workers", "2"],
        "scenario = exponent-atlas\natlas.samples = 5\nsweep.theta = 0, 0.5, 1\n",
    );
    assert_eq!(code, 0, "{stdout}{stderr}");
    let summary = fs::read_to_string(tmp.path().join("out/sweep-exponent-atlas-0000/summary.csv")).unwrap();
    let lines: Vec<&str> = summary.lines().collect();
    assert_eq!(lines[0], "# schema=1");
    assert!(lines[1].starts_with("point,problem.theta,exit_code,pass"));
    assert_eq!(lines.len(), 5);
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, _, _) = run(tmp.path(), &["run", "--seed", "99"], "scenario = exponent-atlas\nseed = 3\natlas.samples = 3\n");
    assert_eq!(code, 0);
    let echo = fs::read_to_string(tmp.path().join("out/exponent-atlas-0000/config.echo")).unwrap();
    assert!(echo.lines().any(|l| l == "seed = 99"), "{echo}");
}

#[test]
fn atlas_prints_regime() {
    let out = bin().args(["atlas", "N=3,p=2,theta=0.5,gamma2=0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theta=0.5"));

    let out = bin().args(["atlas", "N=3", "p=2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["atlas", "N=3,p=2,theta=0.5,gamma2=0.5,q=1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
