//! End-to-end tests against the built binary: output shapes, exit codes,
//! JSON round-trips, and determinism across worker counts and reruns.

use std::process::{Command, Output};

use shor_prep::census::CensusRecord;
use shor_prep::shor::{AttemptRecord, CompareReport, FactorSummary};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shor-prep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is utf-8")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited")
}

#[test]
fn jacobi_command() {
    let out = run(&["jacobi", "7", "15"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "-1\n");
    assert_eq!(stdout(&run(&["jacobi", "1", "15"])), "1\n");
    assert_eq!(stdout(&run(&["jacobi", "6", "15"])), "0\n");
    assert_eq!(
        stdout(&run(&["jacobi", "7", "15", "--format", "json"])),
        "{\"a\":7,\"n\":15,\"symbol\":-1}\n"
    );
    assert_eq!(
        stdout(&run(&["jacobi", "7", "15", "--format", "csv"])),
        "a,n,symbol\n7,15,-1\n"
    );
    // Even modulus is a domain error.
    assert_eq!(exit_code(&run(&["jacobi", "7", "14"])), 1);
}

#[test]
fn order_command() {
    assert_eq!(stdout(&run(&["order", "7", "15"])), "4\n");
    assert_eq!(stdout(&run(&["order", "1", "15"])), "1\n");
    assert_eq!(stdout(&run(&["order", "2", "21"])), "6\n");
    // Non-units have no order.
    assert_eq!(exit_code(&run(&["order", "6", "21"])), 1);
}

#[test]
fn census_command_verifies_and_roundtrips() {
    let out = run(&["census", "3", "5", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let record: CensusRecord = serde_json::from_str(text.trim()).expect("census json parses");
    assert_eq!(serde_json::to_string(&record).unwrap() + "\n", text);
    assert_eq!(record.n, 15);
    assert_eq!(record.usable_filtered, 3);

    let out = run(&["census", "3", "7"]);
    assert_eq!(exit_code(&out), 0);

    // Non-prime inputs are domain errors; an over-cap pair is a resource error.
    assert_eq!(exit_code(&run(&["census", "4", "6"])), 1);
    assert_eq!(exit_code(&run(&["census", "2503", "4001"])), 3);
}

#[test]
fn census_output_is_worker_invariant() {
    let base = run(&["census", "193", "199", "--format", "json", "--workers", "1"]);
    assert_eq!(exit_code(&base), 0);
    for workers in ["2", "8"] {
        let other = run(&["census", "193", "199", "--format", "json", "--workers", workers]);
        assert_eq!(stdout(&base), stdout(&other));
    }
}

#[test]
fn sweep_command() {
    let out = run(&["sweep", "5", "5", "--format", "csv"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "header plus the single (3, 5) profile");
    assert!(lines[1].starts_with("15,3,5,"));

    let out = run(&["sweep", "3", "3"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "swept 0 profiles, 0 violations\n");

    let out = run(&["sweep", "31", "31", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines: Vec<&str> = text.lines().collect();
    let summary = lines.pop().unwrap();
    assert!(summary.contains("\"violations\":0"));
    for line in lines {
        let record: CensusRecord = serde_json::from_str(line).expect("sweep row parses");
        assert_eq!(serde_json::to_string(&record).unwrap(), line);
    }
}

#[test]
fn factor_command() {
    let out = run(&["factor", "15", "--strategy", "jacobi", "--seed", "1", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines: Vec<&str> = text.lines().collect();
    let summary: FactorSummary = serde_json::from_str(lines.pop().unwrap()).unwrap();
    assert_eq!(summary.factors, Some([3, 5]));
    assert_eq!(summary.seed, 1);
    for line in lines {
        let record: AttemptRecord = serde_json::from_str(line).expect("attempt line parses");
        assert_eq!(serde_json::to_string(&record).unwrap(), line);
    }

    // Filtered selection factors 21 on the first attempt.
    let out = run(&["factor", "21", "--strategy", "jacobi", "--seed", "7", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let summary: FactorSummary = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(summary.factors, Some([3, 7]));
    assert_eq!(summary.attempts_used, 1);

    assert_eq!(exit_code(&run(&["factor", "17"])), 1);
    assert_eq!(exit_code(&run(&["factor", "45"])), 1);
}

#[test]
fn factor_runs_are_deterministic() {
    let args = ["factor", "8633", "--strategy", "uniform", "--seed", "11", "--format", "json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(exit_code(&first), 0);
}

#[test]
fn compare_command() {
    let out = run(&["compare", "15", "21", "--trials", "200", "--seed", "5", "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let reports: Vec<CompareReport> = text
        .lines()
        .map(|line| serde_json::from_str(line).expect("compare json parses"))
        .collect();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0].n, 15);
    assert_eq!(reports[1].n, 21);
    let filtered21 = &reports[1].strategies[1];
    assert_eq!(filtered21.total_attempts, 200);
    for (line, report) in text.lines().zip(&reports) {
        assert_eq!(serde_json::to_string(report).unwrap(), line);
    }

    // Zero trials: an empty table and a clean exit.
    let out = run(&["compare", "15", "--trials", "0", "--format", "csv"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1, "header only");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = std::env::temp_dir().join(format!("shor-prep-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("defaults.conf");
    std::fs::write(&path, "format=json\nseed=1\n").unwrap();
    let path_str = path.to_str().unwrap();

    let out = run(&["jacobi", "7", "15", "--config", path_str]);
    assert_eq!(stdout(&out), "{\"a\":7,\"n\":15,\"symbol\":-1}\n");

    // An explicit flag beats the config value.
    let out = run(&["jacobi", "7", "15", "--config", path_str, "--format", "text"]);
    assert_eq!(stdout(&out), "-1\n");

    // The config seed feeds seeded commands.
    let from_config = run(&["factor", "15", "--config", path_str]);
    let from_flag = run(&["factor", "15", "--seed", "1", "--format", "json"]);
    assert_eq!(stdout(&from_config), stdout(&from_flag));

    // Unknown keys are rejected.
    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "colour=red\n").unwrap();
    assert_eq!(exit_code(&run(&["jacobi", "7", "15", "--config", bad.to_str().unwrap()])), 1);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn usage_errors_exit_with_domain_code() {
    assert_eq!(exit_code(&run(&["factor"])), 1);
    assert_eq!(exit_code(&run(&["no-such-command"])), 1);
    assert_eq!(exit_code(&run(&["--help"])), 0);
}
