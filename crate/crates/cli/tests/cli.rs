// Copyright 2026 the basm Authors
// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

fn corpus(path: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    root.join(path).to_string_lossy().into_owned()
}

fn golden(path: &str) -> String {
    std::fs::read_to_string(corpus(path)).unwrap()
}

fn basm(args: &[&str]) -> Output {
    basm_with_input(args, None)
}

fn basm_with_input(args: &[&str], input: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_basm"))
        .args(args)
        .env_remove("ASM_MAX_STEPS")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    if let Some(bytes) = input {
        stdin.write_all(bytes).unwrap();
    }
    drop(stdin);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_euclid_from_files() {
    let o = basm(&[
        "run",
        "--program",
        &corpus("euclid/program.basm"),
        "--init",
        &corpus("euclid/init/a12b8.state"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stderr.is_empty());
    let out = stdout(&o);
    let tail = out.lines().last().unwrap();
    assert!(tail.contains(r#"{"loc":"d","value":4}"#), "{tail}");
    assert_eq!(out, golden("euclid/golden/a12b8.jsonl"));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2)
        .map(|i| dir.path().join(format!("t{i}.jsonl")).to_string_lossy().into_owned())
        .collect();
    for p in &paths {
        let o = basm(&[
            "run", "--program", "primality", "--init", "init/n15k3.state", "--policy", "uniform", "--seed", "42",
            "--trace", p,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn clash_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("clash.basm");
    std::fs::write(&p, "vocab { var x: Integer; }\ndo until x = 1 { par { x := 1; x := 2 } }\n").unwrap();
    let o = basm(&["run", "--program", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("clash"));
    assert!(stdout(&o).contains(r#""outcome":"error""#));
}

#[test]
fn parse_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.basm");
    std::fs::write(&p, "vocab { var x: Integer; }\ndo until x = 1 {\n  x := y\n}\n").unwrap();
    let o = basm(&["run", "--program", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.basm:3:8: unknown-symbol"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn step_limit_exits_3_and_respects_the_environment() {
    let o = basm(&["run", "--program", "euclid", "--max-steps", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_basm"))
        .args(["run", "--program", "euclid"])
        .env("ASM_MAX_STEPS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(basm(&["check", "nonsense"]).status.code(), Some(2));
    assert_eq!(basm(&["run", "--program", "euclid", "--seed", "3"]).status.code(), Some(2));
    assert_eq!(basm(&["run", "--program", "euclid", "--policy", "script"]).status.code(), Some(2));
    assert_eq!(basm(&["run", "--program", "/no/such/file.basm"]).status.code(), Some(2));
    assert_eq!(basm(&["check", "equiv", "--a", "x"]).status.code(), Some(2));
}

#[test]
fn check_bexp_on_euclid() {
    let o = basm(&["check", "bexp", "--program", "euclid", "--trials", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"checkName\":\"bexp\",\"trials\":1000,\"failures\":[]}\n");
    assert!(o.stderr.is_empty());
}

#[test]
fn check_equiv() {
    let t0 = corpus("tangent/golden/choice0.jsonl");
    let t1 = corpus("tangent/golden/choice1.jsonl");
    let same = basm(&["check", "equiv", "--a", &t0, "--b", &t0]);
    assert_eq!(same.status.code(), Some(0));
    assert!(same.stderr.is_empty());
    let differ = basm(&["check", "equiv", "--a", &t0, "--b", &t1]);
    assert_eq!(differ.status.code(), Some(1));
    assert!(stdout(&differ).contains("update sets differ"));
}

#[test]
fn check_iso_and_replay() {
    let o = basm(&["check", "iso", "--program", "enum-graph"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = basm(&["check", "replay", "--program", "primality", "--trials", "20", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"trials\":20"));
}

#[test]
fn run_output_always_replays() {
    let dir = tempfile::tempdir().unwrap();
    for (name, policy) in [("tangent", "builtin"), ("primality", "uniform"), ("enum-graph", "uniform")] {
        let trace = dir.path().join(format!("{name}.jsonl"));
        let trace = trace.to_str().unwrap();
        let mut args = vec!["run", "--program", name, "--policy", policy, "--trace", trace];
        if policy == "uniform" {
            args.extend(["--seed", "99"]);
        }
        assert_eq!(basm(&args).status.code(), Some(0));
        let o = basm(&["check", "replay", "--program", name, "--trace", trace]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let o = basm(&["replay", "--program", name, "--trace", trace]);
        assert_eq!(stdout(&o), "match\n");
        assert!(o.stderr.is_empty());
    }
}

#[test]
fn interactive_candidate_index() {
    let o = basm_with_input(&["run", "--program", "tangent", "--policy", "interactive"], Some(b"0\n0\n"));
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), golden("tangent/golden/choice0.jsonl"));
    let prompts = stderr(&o);
    assert_eq!(prompts.lines().count(), 2);
    assert!(prompts.contains("\"candidates\""));
}

#[test]
fn interactive_piped_answers_match_the_script() {
    let script = corpus("tangent/scripts/choice1.jsonl");
    let scripted = basm(&["run", "--program", "tangent", "--policy", "script", "--script", &script]);
    let answers = b"point(2.5, 4.330127018922194)\npoint(2.5, 4.330127018922194)\n";
    let piped = basm_with_input(&["run", "--program", "tangent", "--policy", "interactive"], Some(answers));
    assert_eq!(piped.status.code(), Some(0));
    assert_eq!(stdout(&piped), stdout(&scripted));
}

#[test]
fn interactive_empty_stdin_aborts_with_partial_trace() {
    let o = basm_with_input(&["run", "--program", "tangent", "--policy", "interactive"], Some(b""));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("aborted"));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().last().unwrap().contains(r#""kind":"aborted""#));
}

#[test]
fn oracle_static_mod_is_logged() {
    let o = basm(&["run", "--program", "euclid", "--oracle-static", "mod"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(r#"{"oracle":"mod","args":[12,8],"answer":4}"#));
    assert_eq!(basm(&["run", "--program", "euclid", "--oracle-static", "gcd"]).status.code(), Some(2));
}

#[test]
fn corpus_list_and_run() {
    let o = basm(&["corpus", "list"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "euclid\neuclid-implicit\neuclid-while\ntangent\nprimality\nenum-graph\n"
    );
    let o = basm(&["corpus", "run", "primality", "--init", "init/n7k2.state", "--policy", "uniform:42"]);
    assert_eq!(stdout(&o), golden("primality/golden/n7k2-seed42.jsonl"));
    assert_eq!(basm(&["corpus", "run", "nope"]).status.code(), Some(2));
}
