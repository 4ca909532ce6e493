//! Command-level behavior: exit-code discipline, report shapes, and the
//! strict/lenient parse switch, driven through the real binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use wsrel_cli::report::{ComposeReport, MonitorWindowReport, SolveReport};

fn wsrel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsrel"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn validate_accepts_every_bundled_model() {
    for name in [
        "pascal_triangle.json",
        "direct_edge.json",
        "self_loop.json",
        "two_node.json",
        "always_fault.json",
    ] {
        let out = wsrel(&["validate", &fixture(name)]);
        assert_eq!(code(&out), 0, "{name}: {}", stderr(&out));
        assert_eq!(stdout(&out), "OK\n");
    }
}

#[test]
fn validate_reports_violations_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad_row_sum.json");
    std::fs::write(
        &path,
        r#"{
            "formatVersion": "1",
            "model": {
                "start": "n",
                "nodes": ["n"],
                "edges": [
                    {"from": "n", "to": "C", "probability": 0.6},
                    {"from": "n", "to": "F", "probability": 0.3}
                ]
            }
        }"#,
    )
    .unwrap();
    let out = wsrel(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report = stdout(&out);
    assert!(report.contains("row sum != 1 at n"), "report: {report}");
}

#[test]
fn missing_file_and_bad_syntax_exit_two() {
    let out = wsrel(&["validate", "/nonexistent/model.json"]);
    assert_eq!(code(&out), 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trailing.json");
    std::fs::write(&path, "{").unwrap();
    let out = wsrel(&["solve", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("syntax error"));
}

#[test]
fn unknown_flags_exit_four() {
    let out = wsrel(&["solve", "--frobnicate"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn help_exits_zero() {
    let out = wsrel(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("wsrel"));
}

#[test]
fn solve_reports_the_fault_only_model_as_unreliable() {
    let out = wsrel(&["solve", &fixture("always_fault.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let report: SolveReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.reliability, 0.0);
    assert!(!report.is_reliable);
}

#[test]
fn solve_text_renders_six_significant_digits() {
    let out = wsrel(&["solve", &fixture("self_loop.json")]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("reliability        0.888889"), "{text}");
    assert!(text.contains("is_reliable        true"), "{text}");
}

#[test]
fn ensemble_at_time_zero_reports_full_availability() {
    let out = wsrel(&[
        "simulate", "ensemble", "--mtbf", "9", "--mttr", "1", "--t", "0",
        "--trials", "1000", "--seed", "1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "availability  1.00000\n");
}

#[test]
fn solve_iterative_matches_direct() {
    let direct = wsrel(&["solve", &fixture("pascal_triangle.json"), "--json"]);
    let iterative = wsrel(&[
        "solve",
        &fixture("pascal_triangle.json"),
        "--iterative",
        "--json",
    ]);
    let d: SolveReport = serde_json::from_str(&stdout(&direct)).unwrap();
    let i: SolveReport = serde_json::from_str(&stdout(&iterative)).unwrap();
    assert_eq!(d.method, "direct");
    assert_eq!(i.method, "iterative");
    assert!((d.reliability - i.reliability).abs() < 1e-10);
}

#[test]
fn solve_iteration_budget_failure_exits_three() {
    let out = wsrel(&[
        "solve",
        &fixture("self_loop.json"),
        "--iterative",
        "--max-iter",
        "1",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("no convergence"));
}

#[test]
fn avail_text_mode_prints_six_significant_digits() {
    let out = wsrel(&["avail", "--mtbf", "71394", "--mttr", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("availability    0.999986 (99.99860%)"), "{text}");
    assert!(text.contains("unavailability  1.40066e-5 (0.0014007%)"), "{text}");
}

#[test]
fn avail_domain_errors_exit_four() {
    let out = wsrel(&["avail", "--tm", "0", "--lambda", "1"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("tm"));
    let out = wsrel(&["avail", "--r", "0", "--t", "1"]);
    assert_eq!(code(&out), 4);
    // Negative values reach the domain checks and come back named.
    let out = wsrel(&["avail", "--tm", "1", "--lambda", "-0.5"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("lambda"));
    let out = wsrel(&["monitor", &fixture("updown.csv"), "--at", "-1"]);
    assert_eq!(code(&out), 4);
    assert!(stderr(&out).contains("outside"));
}

#[test]
fn avail_conversion_families() {
    let out = wsrel(&["avail", "--tm", "2", "--lambda", "0.5"]);
    assert!(stdout(&out).contains("availability    0.500000"));
    let out = wsrel(&["avail", "--tm", "2", "--availability", "0.5"]);
    assert!(stdout(&out).contains("failure_intensity  0.500000"));
    let out = wsrel(&["avail", "--lambda", "0", "--t", "100", "--reliability"]);
    assert!(stdout(&out).contains("reliability  1.00000"));
    let out = wsrel(&["avail", "--r", "0.36787944117144233", "--t", "10"]);
    assert!(stdout(&out).contains("failure_intensity  0.100000"));
}

#[test]
fn compose_json_round_trips_and_matches_declared_figures() {
    let out = wsrel(&["compose", &fixture("table1.json"), "--json"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let report: ComposeReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.sets.len(), 3);
    let reservation = &report.sets[0].services[0];
    assert_eq!(reservation.name, "Reservation");
    assert!((reservation.availability - 36441.6 / 36442.6).abs() < 1e-15);
    // Re-rendering the parsed report reproduces the bytes: the JSON layer is
    // the documented schema, not a lossy view.
    assert_eq!(wsrel_cli::report::to_json(&report), text);
}

#[test]
fn compose_prefers_attached_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let profile_path = dir.path().join("reservation.csv");
    std::fs::write(
        &profile_path,
        "timestamp_hours,state\n0,up\n5,down\n# horizon=10\n",
    )
    .unwrap();
    let spec = format!("Reservation={}", profile_path.display());
    let out = wsrel(&["compose", &fixture("table1.json"), "--profile", &spec, "--json"]);
    assert_eq!(code(&out), 0);
    let report: ComposeReport = serde_json::from_str(&stdout(&out)).unwrap();
    let reservation = &report.sets[0].services[0];
    assert_eq!(reservation.source, "operational-profile");
    assert_eq!(reservation.availability, 0.5);
    let untouched = &report.sets[0].services[1];
    assert_eq!(untouched.source, "mtbf/mttr");
}

#[test]
fn compose_warns_on_unmatched_profile_names() {
    let dir = tempfile::tempdir().unwrap();
    let profile_path = dir.path().join("ghost.csv");
    std::fs::write(&profile_path, "timestamp_hours,state\n0,up\n# horizon=1\n").unwrap();
    let spec = format!("Ghost={}", profile_path.display());
    let out = wsrel(&["compose", &fixture("table1.json"), "--profile", &spec]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("matches no service"));
}

#[test]
fn monitor_modes_and_errors() {
    let profile = fixture("updown.csv");
    let out = wsrel(&["monitor", &profile, "--window", "10", "--json"]);
    let report: MonitorWindowReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report.average_availability, 0.5);

    let out = wsrel(&["monitor", &profile, "--at", "7"]);
    assert_eq!(stdout(&out), "0\n");
    let out = wsrel(&["monitor", &profile, "--at", "3"]);
    assert_eq!(stdout(&out), "1\n");

    let out = wsrel(&["monitor", &profile, "--at", "99"]);
    assert_eq!(code(&out), 4);
    let out = wsrel(&["monitor", &profile]);
    assert_eq!(code(&out), 4);
    let out = wsrel(&["monitor", &profile, "--at", "1", "--window", "2"]);
    assert_eq!(code(&out), 4);
}

#[test]
fn monitor_horizon_flag_overrides_the_comment() {
    let out = wsrel(&["monitor", &fixture("updown.csv"), "--horizon", "20", "--window", "20"]);
    assert_eq!(code(&out), 0);
    // Up 5 of 20 hours under the stretched horizon.
    assert!(stdout(&out).contains("0.250000"));
}

#[test]
fn renewal_output_parses_as_a_valid_profile() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("generated.csv");
    let out = wsrel(&[
        "simulate",
        "renewal",
        "--mtbf",
        "9",
        "--mttr",
        "1",
        "--horizon",
        "1000",
        "--seed",
        "7",
        "--service",
        "генератор",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let check = wsrel(&["monitor", out_path.to_str().unwrap(), "--window", "1000"]);
    assert_eq!(code(&check), 0, "{}", stderr(&check));
}

#[test]
fn simulate_bad_flags_exit_four() {
    let out = wsrel(&[
        "simulate", "renewal", "--mtbf", "0", "--mttr", "1", "--horizon", "10",
    ]);
    assert_eq!(code(&out), 4);
    let out = wsrel(&[
        "simulate",
        "walk",
        &fixture("self_loop.json"),
        "--trials",
        "0",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn lenient_downgrades_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("extra.json");
    std::fs::write(
        &path,
        r#"{
            "formatVersion": "1",
            "model": {
                "start": "n",
                "nodes": ["n"],
                "edges": [{"from": "n", "to": "C", "probability": 1.0}],
                "annotation": "kept for humans"
            }
        }"#,
    )
    .unwrap();
    let strict = wsrel(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&strict), 2);
    let lenient = wsrel(&["validate", path.to_str().unwrap(), "--lenient"]);
    assert_eq!(code(&lenient), 0);
    assert!(stderr(&lenient).contains("annotation"));
}
