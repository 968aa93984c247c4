//! End-to-end runs of the `quantlang` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use quantlang::fixtures::FIXTURES;
use quantlang::{format, LassoWord};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_quantlang"))
        .args(args)
        .output()
        .unwrap();
    Run {
        code: o.status.code().unwrap(),
        out: String::from_utf8(o.stdout).unwrap(),
        err: String::from_utf8(o.stderr).unwrap(),
    }
}

fn workdir() -> (tempfile::TempDir, impl Fn(&str) -> PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    for f in FIXTURES {
        std::fs::write(dir.path().join(format!("{}.wa", f.name)), f.text).unwrap();
    }
    let root = dir.path().to_path_buf();
    (dir, move |name: &str| root.join(name))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_prints_value_and_witness() {
    let (_d, p) = workdir();
    let r = run(&["eval", s(&p("disc_gap_witness.wa")), "--word", "a | b"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut lines = r.out.lines();
    assert_eq!(lines.next(), Some("5/6"));
    assert!(lines.next().unwrap().starts_with("witness: "));
    let r = run(&["eval", s(&p("sum_count_a.wa")), "--word", "a a b"]);
    assert_eq!(r.out.lines().next(), Some("2"));
}

#[test]
fn compose_writes_a_file_and_the_result_evaluates() {
    let (_d, p) = workdir();
    let out = p("max.wa");
    let r = run(&[
        "compose",
        "--op",
        "max",
        s(&p("limavg_count_a.wa")),
        s(&p("limavg_count_b.wa")),
        "--nondet",
        "-o",
        s(&out),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("Theorem 12"), "{}", r.out);
    let r = run(&["eval", s(&out), "--word", "| a b b"]);
    assert_eq!(r.out.lines().next(), Some("2/3"));
}

#[test]
fn refused_compositions_exit_two_with_citation() {
    let (_d, p) = workdir();
    let r = run(&[
        "compose",
        "--op",
        "max",
        s(&p("limavg_count_a.wa")),
        s(&p("limavg_count_b.wa")),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("Theorem 13"), "{}", r.err);
    let r = run(&[
        "compose",
        "--op",
        "sum",
        s(&p("limavg_count_a.wa")),
        s(&p("limavg_count_b.wa")),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("Theorem 29"));
    let r = run(&["complement", s(&p("limavg_count_a.wa"))]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("Theorem 22"));
}

#[test]
fn complement_shift_scale_to_stdout() {
    let (_d, p) = workdir();
    let r = run(&["complement", s(&p("disc_gap_witness.wa"))]);
    assert_eq!(r.code, 0, "{}", r.err);
    let c = format::parse(&r.out).unwrap();
    let w = LassoWord::from_strs("a", "b").unwrap();
    assert_eq!(quantlang::eval_lasso(&c, &w).unwrap().value, "1/6".parse().unwrap());
    let r = run(&["shift", s(&p("sum_count_a.wa")), "--by", "-1/2"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let r = run(&["scale", s(&p("sum_count_a.wa")), "--by", "-1"]);
    assert_eq!(r.code, 4);
}

#[test]
fn parse_failures_exit_three() {
    let (_d, p) = workdir();
    std::fs::write(p("bad.wa"), "automaton x\nsemantics sometimes\n").unwrap();
    let r = run(&["validate", s(&p("bad.wa"))]);
    assert_eq!(r.code, 3);
    assert!(r.err.contains("line 2"), "{}", r.err);
    let partial = "automaton p\nsemantics limavg\nalphabet a b\nstates 1\ninitial 0\ntrans 0 a 0 1/1\n";
    std::fs::write(p("partial.wa"), partial).unwrap();
    let r = run(&["validate", s(&p("partial.wa"))]);
    assert_eq!(r.code, 3);
    assert!(r.out.contains("missing"), "{}", r.out);
    let r = run(&["eval", s(&p("partial.wa")), "--word", "| a"]);
    assert_eq!(r.code, 3);
}

#[test]
fn usage_errors_exit_one() {
    let (_d, p) = workdir();
    assert_eq!(run(&[]).code, 1);
    assert_eq!(run(&["eval"]).code, 1);
    assert_eq!(run(&["eval", s(&p("nope.wa")), "--word", "| a"]).code, 1);
    assert_eq!(run(&["check", "--suite", "everything"]).code, 1);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn precondition_failures_exit_four() {
    let (_d, p) = workdir();
    let r = run(&["cutpoint", s(&p("limavg_count_a.wa")), "--eta", "1/3"]);
    assert_eq!(r.code, 4);
    assert!(r.err.contains("not isolated"), "{}", r.err);
    let r = run(&["cutpoint", s(&p("limavg_max_ab.wa")), "--eta", "2"]);
    assert_eq!(r.code, 4);
    let r = run(&["eval", s(&p("limavg_count_a.wa")), "--word", "| z"]);
    assert_eq!(r.code, 4);
    let r = run(&["determinize", s(&p("limavg_count_a.wa"))]);
    assert_eq!(r.code, 4);
}

#[test]
fn cutpoint_then_member() {
    let (_d, p) = workdir();
    let dbw = p("dbw.wa");
    let r = run(&["cutpoint", s(&p("limavg_max_ab.wa")), "--eta", "2", "-o", s(&dbw)]);
    assert_eq!(r.code, 4, "nondeterministic LimAvg is refused");
    let r = run(&[
        "cutpoint",
        s(&p("disc_gap_witness.wa")),
        "--eta",
        "2",
        "--epsilon",
        "1/4",
        "-o",
        s(&dbw),
    ]);
    assert_eq!(r.code, 4, "η = 2 is not isolated: {}", r.out);
    let r = run(&[
        "cutpoint",
        s(&p("disc_gap_witness.wa")),
        "--eta",
        "3",
        "--epsilon",
        "1/4",
        "-o",
        s(&dbw),
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("unfolding depth"));
    let r = run(&["member", s(&dbw), "--word", "| a"]);
    assert_eq!(r.out.trim(), "false");
}

#[test]
fn booleanize_and_determinize() {
    let (_d, p) = workdir();
    let r = run(&["booleanize", s(&p("limavg_count_a.wa"))]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.err.contains("n_A = 1"));
    let liminf = "automaton g\nsemantics liminf\nalphabet a b\nstates 2\ninitial 0\n\
                  trans 0 a 0 0/1\ntrans 0 a 1 0/1\ntrans 0 b 0 0/1\ntrans 1 a 1 1/1\ntrans 1 b 1 0/1\n";
    std::fs::write(p("g.wa"), liminf).unwrap();
    let r = run(&["determinize", s(&p("g.wa"))]);
    assert_eq!(r.code, 0, "{}", r.err);
    let d = format::parse(&r.out).unwrap();
    assert!(d.is_deterministic().unwrap());
}

#[test]
fn dot_table_fixture_check() {
    let (_d, p) = workdir();
    let r = run(&["dot", s(&p("bank_a1.wa"))]);
    assert!(r.out.starts_with("digraph \"bank_a1\""));
    let r = run(&["table"]);
    assert!(r.out.contains("Theorem 20"));
    let r = run(&["fixture"]);
    assert_eq!(r.out.lines().count(), FIXTURES.len());
    let r = run(&["fixture", "bank_a2"]);
    assert_eq!(r.out, FIXTURES.iter().find(|f| f.name == "bank_a2").unwrap().text);
    let r = run(&["check", "--suite", "closure", "--trials", "5", "--seed", "3"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("passed 5/5"));
}
