use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use optout::cli::{parse_scenario, run};

const SCENARIO: &str = r#"{"distribution":{"kind":"uniform","lo":0.0,"hi":1.0},"benefit":0.6,"revenue_rate":1.0,"gamma":0.3}"#;
const DUOPOLY: &str = r#"{"distribution":{"kind":"uniform","lo":0.0,"hi":1.0},"benefit":1.0,"revenue_rate":1.0,"gamma":0.5,"duopoly":{"benefit2":1.0,"revenue_rate2":1.0,"gamma2":0.5}}"#;

fn optout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optout"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_single_reports_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", SCENARIO);
    let out = optout(&["solve-single", "--scenario", &s, "--step", "0.01"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("c_star=0.6 revenue_star=0.72 "), "{text}");
}

#[test]
fn sweep_writes_the_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", SCENARIO);
    let csv = dir.path().join("g.csv");
    let out = optout(&[
        "sweep",
        "--scenario",
        &s,
        "--param",
        "gamma",
        "--values",
        "0:1:0.5",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "gamma,c_star,revenue_star,revenue_no_optout,optout_share"
    );
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[1], "0,0.6,0.6,0.6,0.4");
}

#[test]
fn solve_duopoly_marks_the_race_to_the_bottom() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "d.json", DUOPOLY);
    let csv = dir.path().join("m.csv");
    let out = optout(&[
        "solve-duopoly",
        "--scenario",
        &s,
        "--grid",
        "0:1:0.1",
        "--dynamics",
        "--start",
        "0,0",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c1,c2,u1,u2,is_nash"));
    assert_eq!(lines.next(), Some("0,0,0.25,0.25,true"));
    assert_eq!(text.lines().count(), 1 + 121);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(
        summary.contains("dynamics outcome=converged c1=0 c2=0 path_len=1"),
        "{summary}"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", SCENARIO);
    let bad = write(dir.path(), "bad.json", &SCENARIO.replace("0.3}", "1.5}"));

    let out = optout(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = optout(&["solve-single", "--scenario", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma"));

    let out = optout(&["solve-single", "--scenario", "/nonexistent/s.json"]);
    assert_eq!(out.status.code(), Some(1));

    let out = optout(&["solve-duopoly", "--scenario", &s, "--grid", "1:0:0.1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = optout(&[
        "sweep",
        "--scenario",
        &s,
        "--param",
        "delta",
        "--values",
        "0:1:0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = optout(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn dumped_scenario_reparses_to_the_same_value() {
    let dir = tempfile::tempdir().unwrap();
    for text in [SCENARIO, DUOPOLY] {
        let s = write(dir.path(), "s.json", text);
        let mut stdout = Vec::new();
        let mut stderr = Vec::new();
        let code = run(
            [
                "optout",
                "solve-single",
                "--scenario",
                &s,
                "--dump-scenario",
            ],
            &mut stdout,
            &mut stderr,
        );
        assert_eq!(code, 0);
        let printed = String::from_utf8(stdout).unwrap();
        let json = &printed[..printed.rfind('}').unwrap() + 1];
        assert_eq!(parse_scenario(json).unwrap(), parse_scenario(text).unwrap());
    }
}

#[test]
fn simulate_prints_both_columns() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "d.json", DUOPOLY);
    let mut stdout = Vec::new();
    let code = run(
        [
            "optout",
            "simulate",
            "--scenario",
            &s,
            "--n",
            "20000",
            "--seed",
            "4",
            "--cost",
            "0.2",
            "--cost2",
            "0.5",
        ],
        &mut stdout,
        &mut Vec::new(),
    );
    assert_eq!(code, 0);
    let text = String::from_utf8(stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], "targeted_1");
    assert_eq!(rows[0][1], "0.1");
    assert_eq!(rows[1][1], "0.8");
    for row in rows {
        assert!(row[3].parse::<f64>().unwrap() <= 0.02);
    }
}

#[test]
fn duopoly_sweep_lists_equilibria() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "d.json", DUOPOLY);
    let mut stdout = Vec::new();
    let code = run(
        [
            "optout",
            "sweep",
            "--scenario",
            &s,
            "--param",
            "gamma",
            "--values",
            "0.5",
            "--grid",
            "0:1:0.1",
        ],
        &mut stdout,
        &mut Vec::new(),
    );
    assert_eq!(code, 0);
    let text = String::from_utf8(stdout).unwrap();
    assert!(text.starts_with("gamma,c1,c2,u1,u2\n"));
    assert!(text.lines().any(|l| l == "0.5,0,0,0.25,0.25"), "{text}");
}
