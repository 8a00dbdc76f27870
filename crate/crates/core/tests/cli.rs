use std::fs;
use std::path::Path;
use std::process::Command;

use interlace::{run_command, ConvergenceReport, Error};
use tempfile::TempDir;

fn run(args: &[&str]) -> Result<String, Error> {
    run_command(std::iter::once("interlace").chain(args.iter().copied())).map(|o| o.text)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_interlace"))
}

#[test]
fn simulate_from_minimal_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"command": "simulate", "driver": "poisson", "N": 3, "horizon": 10, "seed": 7}"#,
    );
    let out = dir.path().join("traj.csv");
    let status = bin()
        .args(["simulate", "--config", &cfg, "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("time,level,index,value\n"), "{}", &text[..80]);
    assert!(text.contains("\"seed\":7"));
    assert!(text.contains("# seed 7"));
    assert!(text.contains("\"grid_step\":0.001"));
    assert!(text.contains("\n0,1,1,0\n"));
}

#[test]
fn flags_override_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"command": "simulate", "N": 2, "horizon": 5, "seed": 1}"#,
    );
    let a = run(&["simulate", "--config", &cfg, "--seed", "2"]).unwrap();
    let b = run(&["simulate", "--levels", "2", "--horizon", "5", "--seed", "2"]).unwrap();
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&a), body(&b));
    assert!(a.contains("# seed 2"));
}

#[test]
fn converge_is_byte_reproducible() {
    let args = [
        "converge",
        "--levels",
        "3",
        "--n-values",
        "25,100,400",
        "--replicas",
        "40",
        "--seed",
        "5",
    ];
    let a = run(&args).unwrap();
    let b = run(&args).unwrap();
    assert_eq!(a, b);
    let report: ConvergenceReport = serde_json::from_str(&a).unwrap();
    assert_eq!(report.entries.len(), 3 * 6);
    assert_eq!(report.seed, 5);
    assert_eq!(report.run_config.as_ref().unwrap()["seed"], 5);
}

#[test]
fn malformed_driver_file_fails_with_regularity_diagnostic() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "bad.csv",
        "# horizon 3\n# init 1 1 0\ntime,level,index,increment\n1,1,1,1\n2,1,1,2\n",
    );
    let out = bin().args(["simulate", "--driver-file", &path]).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("driving:"), "{err}");
    assert!(err.contains("increments must be ±1"), "{err}");
    assert!(err.contains("time 2"), "{err}");
}

#[test]
fn driver_file_replays_exactly() {
    let dir = TempDir::new().unwrap();
    let path = write(
        dir.path(),
        "push.csv",
        "# horizon 2\n# init 1 1 0\n# init 2 1 -1\n# init 2 2 0\ntime,level,index,increment\n1,1,1,1\n",
    );
    let text = run(&["simulate", "--driver-file", &path]).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(
        rows,
        ["0,1,1,0", "0,2,1,-1", "0,2,2,0", "1,1,1,1", "1,2,1,-1", "1,2,2,1"]
    );
}

#[test]
fn unknown_config_key_is_named() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"command": "simulate", "N": 2, "horizon": 1, "ratee": 2}"#,
    );
    let err = run(&["simulate", "--config", &cfg]).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert!(err.to_string().starts_with("config:"), "{err}");
    assert!(err.to_string().contains("ratee"), "{err}");
}

#[test]
fn zero_levels_exit_nonzero() {
    let out = bin()
        .args(["warren", "--levels", "0", "--horizon", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("config:"));
}

#[test]
fn warren_then_compare() {
    let dir = TempDir::new().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let grid = run(&[
        "warren",
        "--levels",
        "2",
        "--horizon",
        "0.1",
        "--grid-step",
        "0.01",
        "--stride",
        "5",
        "--replicas",
        "200",
        "--samples-out",
        &p("w.csv"),
    ])
    .unwrap();
    assert!(grid.starts_with("time,level,index,value\n"));
    // stride 5 over 10 steps keeps grid points 0, 5, 10
    assert_eq!(grid.lines().filter(|l| !l.starts_with('#')).count(), 1 + 3 * 3);

    run(&[
        "simulate",
        "--levels",
        "2",
        "--horizon",
        "0.1",
        "--n-values",
        "400",
        "--replicas",
        "200",
        "--samples-out",
        &p("d.csv"),
    ])
    .unwrap();
    let report = run(&[
        "compare",
        "--sample-a",
        &p("w.csv"),
        "--sample-b",
        &p("d.csv"),
        "--out",
        &p("cmp.json"),
    ])
    .unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(p("cmp.json")).unwrap()).unwrap();
    assert_eq!(v, serde_json::from_str::<serde_json::Value>(&report).unwrap());
    assert_eq!(v["slots"].as_array().unwrap().len(), 3);
    assert_eq!(v["replicas_a"], 200);
    assert!(v["max_ks"].as_f64().unwrap() <= 1.0);
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("simulate"));
}
