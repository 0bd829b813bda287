//! End-to-end checks of the `rbo` binary: golden renderings, exit
//! codes, environment overrides and reproducibility across worker
//! counts and repeated invocations.

use std::path::PathBuf;
use std::process::Command;

fn rbo() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rbo"));
    cmd.env_remove("RBO_EXHAUSTIVE_CAP");
    cmd
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let output = cmd.output().expect("binary spawns");
    (
        output.status.code().expect("no signal"),
        String::from_utf8(output.stdout).expect("utf-8 stdout"),
        String::from_utf8(output.stderr).expect("utf-8 stderr"),
    )
}

fn scratch_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("rbo-cli-test-{}-{name}", std::process::id()))
}

#[test]
fn trace_renders_the_hand_checked_run() {
    let (code, stdout, _) = run(rbo().args([
        "trace",
        "--k",
        "2",
        "--keys",
        "10,20,30,40",
        "--query",
        "25:35",
        "--s",
        "1",
    ]));
    assert_eq!(code, 0);
    let expected = "\
cycle: k=2 n=4 start=1
query: [25, 35] -> targets r_lo=2 r_hi=2
     t  index radio      key     action    lb    ub
     1      2    on       30   in-range     0     3
     2      1    on       20      lb->2     2     3
     3      3    on       40      ub->2     2     2
     4      0   off       10          -     2     2
energy: left=1 right=1 extra=2 total=3
final window: lb=2 ub=2
";
    assert_eq!(stdout, expected);
}

#[test]
fn trace_csv_keeps_the_empty_marker_on_its_slot() {
    let (code, stdout, _) = run(rbo().args([
        "trace",
        "--k",
        "2",
        "--targets",
        "2:1",
        "--s",
        "0",
        "--format",
        "csv",
    ]));
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "0,0,0,lb-update\n1,2,4,ub-update\n2,1,2,lb-update\n2,1,2,empty-detected\n"
    );
}

#[test]
fn trace_json_carries_energy_and_final_window() {
    let (code, stdout, _) = run(rbo()
        .args([
            "trace",
            "--k",
            "2",
            "--keys",
            "10,20,30,40",
            "--query",
            "25:35",
            "--s",
            "1",
        ])
        .args(["--format", "json"]));
    assert_eq!(code, 0);
    let value: serde_json::Value = serde_json::from_str(&stdout).expect("valid json");
    assert_eq!(value["energy"]["extra"], 2);
    assert_eq!(value["final_lb"], 2);
    assert_eq!(value["final_ub"], 2);
    assert_eq!(value["slots"].as_array().expect("slot rows").len(), 4);
    assert_eq!(value["empty_detected"], serde_json::Value::Null);
}

#[test]
fn decompose_renders_the_segment_ladder() {
    let (code, stdout, _) = run(rbo().args(["decompose", "--k", "3", "--s", "5"]));
    assert_eq!(code, 0);
    let expected = "\
ladder: k=3 n=8 s=5 last=2
  i  t_start level                y       beta    alpha  x_image
  0        5     0            [5,5]      (101)      (1)  {5}
  1        6     1            [6,7]       (11)        -  {3,7}
  2        8     3           [8,15]         ()        -  {0,1,2,3,4,5,6,7}
gammas: (0) (01)
";
    assert_eq!(stdout, expected);
}

#[test]
fn verify_passes_and_summarizes_a_small_range() {
    let (code, stdout, _) = run(rbo().args(["verify", "--k-range", "2:3"]));
    assert_eq!(code, 0);
    assert!(stdout.contains("all checks passed"), "got: {stdout}");
    assert!(stdout.contains("mode=exhaustive scheme=distinct k=2..3"));
}

#[test]
fn worst_names_the_heaviest_run() {
    let (code, stdout, _) = run(rbo().args(["worst", "--k", "3"]));
    assert_eq!(code, 0);
    assert!(
        stdout
            .contains("k=3: extra=6 at s=7 targets=(4,4) left=3 right=3 (bound 9, previously 14)"),
        "got: {stdout}"
    );
}

#[test]
fn lemmas_pass_and_list_every_statement() {
    let (code, stdout, _) = run(rbo().args(["lemmas", "--k", "3"]));
    assert_eq!(code, 0);
    assert!(stdout.contains("all statements hold"), "got: {stdout}");
    for name in [
        "suffix-chain",
        "right-steps-chain",
        "left-restart-invariance",
    ] {
        assert!(stdout.contains(name), "missing {name} in: {stdout}");
    }
}

#[test]
fn cap_env_var_limits_exhaustive_sweeps() {
    let (code, _, stderr) = run(rbo()
        .args(["verify", "--k-range", "2:4"])
        .env("RBO_EXHAUSTIVE_CAP", "3"));
    assert_eq!(code, 2);
    assert!(stderr.contains("cap of 3"), "got: {stderr}");
}

#[test]
fn cap_env_var_must_be_numeric() {
    let (code, _, stderr) = run(rbo()
        .args(["verify", "--k", "2"])
        .env("RBO_EXHAUSTIVE_CAP", "banana"));
    assert_eq!(code, 2);
    assert!(stderr.contains("RBO_EXHAUSTIVE_CAP"), "got: {stderr}");
}

#[test]
fn selecting_both_query_and_targets_is_an_error() {
    let (code, _, _) = run(rbo().args(["trace", "--k", "2", "--query", "1:2", "--targets", "0:1"]));
    assert_eq!(code, 2);
}

#[test]
fn trace_requires_a_selector() {
    let (code, _, _) = run(rbo().args(["trace", "--k", "2"]));
    assert_eq!(code, 2);
}

#[test]
fn sweeps_require_an_exponent() {
    let (code, _, stderr) = run(rbo().args(["verify"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("--k"), "got: {stderr}");
}

#[test]
fn malformed_keys_file_reports_the_line() {
    let path = scratch_path("bad-keys");
    std::fs::write(&path, "10\ntwenty\n30\n40\n").expect("scratch file");
    let (code, _, stderr) = run(rbo().args([
        "trace",
        "--keys-file",
        path.to_str().expect("utf-8 path"),
        "--query",
        "1:2",
    ]));
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 2);
    assert!(stderr.contains(":2"), "got: {stderr}");
    assert!(stderr.contains("twenty"), "got: {stderr}");
}

#[test]
fn key_count_must_be_a_power_of_two() {
    let (code, _, stderr) = run(rbo().args(["trace", "--keys", "1,2,3", "--query", "1:2"]));
    assert_eq!(code, 2);
    assert!(stderr.contains("power of two"), "got: {stderr}");
}

#[test]
fn keys_must_ascend() {
    let (code, _, _) = run(rbo().args(["trace", "--keys", "4,3,2,1", "--query", "1:2"]));
    assert_eq!(code, 2);
}

#[test]
fn exponent_flag_must_match_explicit_keys() {
    let (code, _, stderr) = run(rbo().args([
        "trace",
        "--k",
        "3",
        "--keys",
        "10,20,30,40",
        "--query",
        "1:2",
    ]));
    assert_eq!(code, 2);
    assert!(stderr.contains("does not match"), "got: {stderr}");
}

#[test]
fn infeasible_targets_are_rejected() {
    let (code, _, _) = run(rbo().args(["trace", "--k", "2", "--targets", "0:9"]));
    assert_eq!(code, 2);
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let (code_a, one, _) =
        run(rbo().args(["verify", "--k", "4", "--format", "json", "--jobs", "1"]));
    let (code_b, three, _) =
        run(rbo().args(["verify", "--k", "4", "--format", "json", "--jobs", "3"]));
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(one, three);
}

#[test]
fn random_mode_reproduces_under_a_seed() {
    let args = [
        "verify",
        "--k",
        "5",
        "--mode",
        "random",
        "--samples",
        "100",
        "--seed",
        "11",
        "--format",
        "json",
    ];
    let (code_a, first, _) = run(rbo().args(args));
    let (code_b, second, _) = run(rbo().args(args));
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(first, second);
}

#[test]
fn out_flag_writes_the_report_file() {
    let path = scratch_path("csv-report");
    let (code, stdout, _) = run(rbo().args([
        "verify",
        "--k",
        "2",
        "--format",
        "csv",
        "--out",
        path.to_str().expect("utf-8 path"),
    ]));
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let body = std::fs::read_to_string(&path).expect("report written");
    std::fs::remove_file(&path).ok();
    assert!(
        body.starts_with(
            "k,runs,max_left,max_right,max_extra,bound_left,bound_right,bound_extra,verdict"
        ),
        "got: {body}"
    );
    assert!(body.contains("\n2,60,"), "got: {body}");
}
