//! End-to-end runs of the `rsub` binary: the documented example flows,
//! exit-code mapping, JSON shapes, and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsub"))
        .args(args)
        .env_remove("RS_THREADS")
        .output()
        .expect("binary runs")
}

fn rsub_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsub"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

struct Tmp {
    dir: tempfile::TempDir,
}

impl Tmp {
    fn new() -> Self {
        Tmp {
            dir: tempfile::tempdir().expect("tempdir"),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn gen(&self, name: &str, args: &[&str]) -> PathBuf {
        let p = self.path(name);
        let mut full: Vec<&str> = vec!["gen"];
        full.extend_from_slice(args);
        full.push("--out");
        let s = p.to_str().expect("utf8 path").to_owned();
        let leaked: &str = Box::leak(s.into_boxed_str());
        full.push(leaked);
        let out = rsub(&full);
        assert_eq!(code(&out), 0, "gen failed: {}", stderr(&out));
        p
    }
}

fn arg(p: &Path) -> &str {
    p.to_str().expect("utf8 path")
}

#[test]
fn hypercube_has_no_rainbow_cycle() {
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&["rainbow-cycle", arg(&q3), "--max-len", "8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "none");

    let out = rsub(&["rainbow-cycle", arg(&q3), "--max-len", "8", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["schema"], "1");
    assert!(v["cycle"].is_null());
}

#[test]
fn check_reports_basic_stats() {
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&["check", arg(&q3)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "n=8 m=12 k=3 degrees min=3 max=3 avg=3");
}

#[test]
fn connect_fails_honestly_when_a_colour_is_banned() {
    // every 0-1 path in the cube must flip bit 0 somewhere, and all those
    // edges carry colour 0
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&[
        "connect",
        arg(&q3),
        "--x",
        "0",
        "--y",
        "1",
        "--avoid-colours",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 1, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("no path"));
}

#[test]
fn connect_finds_a_path_when_one_exists() {
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&["connect", arg(&q3), "--x", "0", "--y", "7", "--seed", "1"]);
    assert_eq!(code(&out), 0, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("path of length"));
}

#[test]
fn connect_rejects_equal_endpoints() {
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&["connect", arg(&q3), "--x", "0", "--y", "0", "--seed", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("error"));
}

#[test]
fn find_subdivision_emits_a_verifiable_certificate() {
    let tmp = Tmp::new();
    let rc = tmp.gen("rc30.cg", &["rainbow-complete", "--n", "30"]);
    let cert = tmp.path("cert.json");
    let out = rsub(&[
        "find-subdivision",
        arg(&rc),
        "--t",
        "4",
        "--seed",
        "7",
        "--max-len",
        "12",
        "--out",
        arg(&cert),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("found a rainbow K_4 subdivision"));

    let text = std::fs::read_to_string(&cert).expect("cert written");
    let v: serde_json::Value = serde_json::from_str(&text).expect("cert is json");
    assert_eq!(v["schema"], "1");
    assert_eq!(v["branch"].as_array().expect("branch").len(), 4);
    assert_eq!(v["paths"].as_array().expect("paths").len(), 6);

    let out = rsub(&["verify", arg(&rc), arg(&cert), "--t", "4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "valid");
}

#[test]
fn verify_rejects_a_tampered_certificate() {
    let tmp = Tmp::new();
    let rc = tmp.gen("rc30.cg", &["rainbow-complete", "--n", "30"]);
    let cert = tmp.path("cert.json");
    let out = rsub(&[
        "find-subdivision",
        arg(&rc),
        "--t",
        "4",
        "--seed",
        "7",
        "--max-len",
        "12",
        "--out",
        arg(&cert),
    ]);
    assert_eq!(code(&out), 0);

    let text = std::fs::read_to_string(&cert).expect("cert");
    let mut v: serde_json::Value = serde_json::from_str(&text).expect("json");
    let paths = v["paths"].as_array_mut().expect("paths");
    paths.pop();
    std::fs::write(&cert, serde_json::to_string(&v).expect("json")).expect("write");

    let out = rsub(&["verify", arg(&rc), arg(&cert), "--t", "4"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("invalid"));
}

#[test]
fn find_subdivision_fails_honestly_on_the_hypercube() {
    // a K_3-subdivision is a rainbow cycle, which the cube does not have
    let tmp = Tmp::new();
    let q4 = tmp.gen("q4.cg", &["hypercube", "--m", "4"]);
    let out = rsub(&[
        "find-subdivision",
        arg(&q4),
        "--t",
        "3",
        "--seed",
        "3",
        "--max-len",
        "12",
    ]);
    assert_eq!(code(&out), 1, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("no subdivision"));
}

#[test]
fn extract_minimal_exit_codes() {
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&["extract-minimal", arg(&q3), "--d", "5/2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("minimal at d=5/2"));

    // asking above the average degree is an input error, not a failure
    let out = rsub(&["extract-minimal", arg(&q3), "--d", "7/2"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("below"));
}

#[test]
fn cover_requires_a_lambda_choice() {
    let tmp = Tmp::new();
    let q3 = tmp.gen("q3.cg", &["hypercube", "--m", "3"]);
    let out = rsub(&["cover", arg(&q3), "--eps", "1/4"]);
    assert_eq!(code(&out), 2);

    let out = rsub(&["cover", arg(&q3), "--eps", "1/4", "--paper-mode"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("piece 0:"));
    assert!(stdout(&out).contains("covered"));
}

#[test]
fn usage_and_input_errors_exit_2() {
    let out = rsub(&["check", "/nonexistent/graph.cg"]);
    assert_eq!(code(&out), 2);

    let out = rsub(&["gen", "hypercube", "--m", "0"]);
    assert_eq!(code(&out), 2);

    // clap handles unknown flags itself, also with exit 2
    let out = rsub(&["check", "--definitely-not-a-flag"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let tmp = Tmp::new();
    let rc = tmp.gen("rc30.cg", &["rainbow-complete", "--n", "30"]);
    let args = [
        "find-subdivision",
        arg(&rc),
        "--t",
        "4",
        "--seed",
        "7",
        "--max-len",
        "12",
        "--json",
    ];
    let a = rsub(&args);
    let b = rsub(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let g1 = rsub(&["gen", "random", "--n", "40", "--p", "0.4", "--seed", "9"]);
    let g2 = rsub(&["gen", "random", "--n", "40", "--p", "0.4", "--seed", "9"]);
    assert_eq!(code(&g1), 0);
    assert_eq!(g1.stdout, g2.stdout);
}

const BENCH_SPEC: &str = r#"{
  "schema": "1",
  "grids": [
    {
      "name": "random-check",
      "generator": { "kind": "random", "n": [100, 200], "p": [0.2, 0.5] },
      "task": { "kind": "check" },
      "seeds": [1]
    },
    {
      "name": "cube-cycles",
      "generator": { "kind": "hypercube", "m": [3, 4, 5] },
      "task": { "kind": "rainbow-cycle", "max_len": 8 },
      "seeds": [0]
    }
  ]
}"#;

#[test]
fn bench_runs_grids_in_order() {
    let tmp = Tmp::new();
    let spec = tmp.path("spec.json");
    std::fs::write(&spec, BENCH_SPEC).expect("write spec");
    let out = rsub(&["bench", arg(&spec)]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4 + 3);
    assert_eq!(lines[0], "grid,cell,seed,n,e,avg_degree,task,outcome,detail");
    assert!(lines[1].starts_with("random-check,n=100;p=0.2,1,100,"));
    assert!(lines[4].starts_with("random-check,n=200;p=0.5,1,200,"));
    for cube in &lines[5..8] {
        assert!(cube.starts_with("cube-cycles,m="));
        assert!(cube.contains(",none,"), "hypercube row: {cube}");
    }
    // every row has the same column count as the header
    for line in &lines {
        assert_eq!(line.split(',').count(), 9, "row: {line}");
    }
}

#[test]
fn bench_is_deterministic_across_runs_and_thread_counts() {
    let tmp = Tmp::new();
    let spec = tmp.path("spec.json");
    std::fs::write(&spec, BENCH_SPEC).expect("write spec");
    let a = rsub(&["bench", arg(&spec)]);
    let b = rsub(&["bench", arg(&spec)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let single = rsub_env(&["bench", arg(&spec)], "RS_THREADS", "1");
    assert_eq!(code(&single), 0);
    assert_eq!(a.stdout, single.stdout);
}

#[test]
fn bench_empty_spec_is_header_only() {
    let tmp = Tmp::new();
    let spec = tmp.path("spec.json");
    std::fs::write(&spec, r#"{"grids": []}"#).expect("write spec");
    let out = rsub(&["bench", arg(&spec)]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout(&out),
        "grid,cell,seed,n,e,avg_degree,task,outcome,detail\n"
    );
}

#[test]
fn bench_timing_appends_a_column() {
    let tmp = Tmp::new();
    let spec = tmp.path("spec.json");
    std::fs::write(
        &spec,
        r#"{"grids": [{"name": "g", "generator": {"kind": "hypercube", "m": 3},
             "task": {"kind": "check"}, "seeds": [0]}]}"#,
    )
    .expect("write spec");
    let out = rsub(&["bench", arg(&spec), "--timing"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].ends_with(",wall_ms"));
    assert_eq!(lines[1].split(',').count(), 10);
}
