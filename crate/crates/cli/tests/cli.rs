//! End-to-end tests of the binary: spawn it like a user would and check
//! output, files, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use manakit::states::{format_density, named_state, StateName};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_manakit"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn mana_of_named_states() {
    let out = run(&["mana", "--state", "maximally_mixed"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.000000000");

    let out = run(&["mana", "--state", "strange"]);
    assert!(out.status.success());
    let single: f64 = stdout(&out).trim().parse().unwrap();
    assert!((single - (5.0f64 / 3.0).log2()).abs() < 1e-9);

    // Copies double the mana.
    let out = run(&["mana", "--state", "strange", "--copies", "2"]);
    let doubled: f64 = stdout(&out).trim().parse().unwrap();
    assert!((doubled - 2.0 * single).abs() < 1e-8);
}

#[test]
fn mana_from_state_file_matches_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("norrell.txt");
    let (rho, dims) = named_state(StateName::Norrell, 1).unwrap();
    std::fs::write(&path, format_density(&rho, &dims)).unwrap();

    let from_file = run(&["mana", "--state", path.to_str().unwrap()]);
    let from_name = run(&["mana", "--state", "norrell"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&from_name));
}

#[test]
fn wigner_grid_of_basis_state_sums_to_one() {
    let out = run(&["wigner", "--state", "basis_0"]);
    assert!(out.status.success());
    let values: Vec<f64> = stdout(&out)
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 9);
    let sum: f64 = values.iter().sum();
    assert!((sum - 1.0).abs() < 1e-8);
    assert!(values.iter().all(|&v| v >= -1e-9), "basis state has a positive grid");
}

#[test]
fn feasible_emits_a_verifiable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let w_path = dir.path().join("w.csv");
    let out = run(&[
        "feasible",
        "--from",
        "strange",
        "--to",
        "norrell",
        "--emit",
        w_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("YES"), "got: {text}");
    assert!(Path::new(&w_path).exists());
    let header = std::fs::read_to_string(&w_path).unwrap();
    assert!(header.starts_with("# W 9 x 9"), "got: {header}");

    let verify = run(&[
        "verify-w",
        "--w",
        w_path.to_str().unwrap(),
        "--from",
        "strange",
        "--to",
        "norrell",
    ]);
    assert!(verify.status.success());
    assert_eq!(stdout(&verify).trim(), "OK");

    // The same W must fail against a mismatched pair.
    let verify = run(&[
        "verify-w",
        "--w",
        w_path.to_str().unwrap(),
        "--from",
        "norrell",
        "--to",
        "strange",
    ]);
    assert!(!verify.status.success());
    assert!(stdout(&verify).starts_with("FAIL"));
}

#[test]
fn feasible_rejects_mana_increase() {
    let out = run(&["feasible", "--from", "hmagic", "--to", "strange"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("NO"));
}

#[test]
fn nu_values_and_strict_exit_code() {
    let out = run(&["nu", "--from", "strange", "--to", "norrell", "--eps", "0"]);
    assert!(out.status.success());
    let nu: f64 = stdout(&out).trim().parse().unwrap();
    assert!(nu.abs() < 1e-5);

    let out = run(&["nu", "--from", "norrell", "--to", "strange", "--eps", "0"]);
    let nu: f64 = stdout(&out).trim().parse().unwrap();
    assert!(nu > 1e-3);

    let out = run(&["nu", "--from", "tmagic", "--to", "strange", "--eps", "0"]);
    assert!(out.status.success(), "without --strict infeasibility is an answer");
    assert_eq!(stdout(&out).trim(), "INFEASIBLE");

    let out = run(&[
        "nu", "--from", "tmagic", "--to", "strange", "--eps", "0", "--strict",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn sweep_writes_sorted_csv_with_threshold_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--from",
        "tmagic",
        "--to",
        "norrell",
        "--steps",
        "6",
        "--jobs",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(
        lines.next().unwrap().starts_with("# feasibility threshold:"),
        "threshold header expected when rows are infeasible"
    );
    assert_eq!(lines.next().unwrap(), "eps,nu,status,solve_time_ms");
    let mut last_eps = -1.0f64;
    let mut last_nu: Option<f64> = None;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 4, "row: {line}");
        let eps: f64 = fields[0].parse().unwrap();
        assert!(eps > last_eps, "rows sorted by eps");
        last_eps = eps;
        match fields[2] {
            "ok" => {
                let nu: f64 = fields[1].parse().unwrap();
                if let Some(prev) = last_nu {
                    assert!(nu <= prev + 1e-6, "nu non-increasing");
                }
                last_nu = Some(nu);
            }
            "infeasible" => assert_eq!(fields[1], "INFEASIBLE"),
            other => panic!("unexpected status {other}"),
        }
    }
}

#[test]
fn sweep_rejects_bad_grid() {
    let out = run(&[
        "sweep", "--from", "strange", "--to", "strange", "--eps-start", "0.5",
        "--eps-end", "0.1", "--out", "/tmp/unused.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_cost_values_and_domain_errors() {
    let out = run(&["sample-cost", "--nu", "0", "--eps", "0.1", "--delta", "0.05"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "738");

    let out = run(&["sample-cost", "--nu", "0.5", "--eps", "0.1", "--delta", "0.05"]);
    assert_eq!(stdout(&out).trim(), "1476");

    let out = run(&["sample-cost", "--nu", "0", "--eps", "0.1", "--delta", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_state_is_a_usage_error() {
    let out = run(&["mana", "--state", "sparkle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn higher_dimension_stabilizer_states() {
    let out = run(&["mana", "--state", "basis_4", "--dim", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0.000000000");

    let out = run(&["mana", "--state", "basis_4", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
