use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn oneann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oneann"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = oneann(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails(args: &[&str], code: i32, kind: &str) {
    let out = oneann(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let err = String::from_utf8(out.stderr).unwrap();
    let last = err.lines().last().unwrap_or_default();
    assert!(last.starts_with(&format!("error: {kind}:")), "{last}");
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

const ENDS_IN_ZERO: &str = "input 0 1\ne 0 e - 1\ne 1 o - 1\no 0 e - 0\no 1 o - 0\n";
const ACCEPT_ALL_AB: &str = "input a b\ns a s - 1\ns b s - 1\n";

#[test]
fn trace_reproduces_golden_rows() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "cut.anet");
    ok(&["build-cut", "27/8", "1/4", &net]);
    let tsv = ok(&["trace", &net, "101"]);
    let rows: Vec<Vec<&str>> = tsv.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    let y8 = [
        "0", "0", "19/27", "38/81", "76/243", "152/729", "304/2187", "608/6561", "15067/19683", "30134/59049",
        "60268/177147",
    ];
    let bits = [
        "0010000", "0101001", "0000100", "0010010", "1001000", "0000100", "0010000", "0101001", "0000100",
        "0010010", "1001000",
    ];
    assert_eq!(rows.len(), 11);
    for (t, row) in rows.iter().enumerate() {
        assert_eq!(row[0], t.to_string());
        assert_eq!(row[1..8].concat(), bits[t], "t={t}");
        assert_eq!(row[8], y8[t], "t={t}");
    }
    let verdicts = ok(&["run", &net, "101"]);
    assert_eq!(verdicts, "ε\taccept\n1\treject\n10\taccept\n101\treject\n");
}

#[test]
fn compare_cut_with_ends_in_zero_automaton() {
    let dir = TempDir::new().unwrap();
    let (cut, fa, tsv) = (path(&dir, "cut.anet"), path(&dir, "end0.anet"), path(&dir, "end0.tsv"));
    fs::write(&tsv, ENDS_IN_ZERO).unwrap();
    ok(&["build-cut", "27", "1/28", &cut]);
    ok(&["compile-fa", &tsv, &fa]);
    assert_eq!(ok(&["compare", &cut, &fa, "12"]), "EQUAL\n");
    let other = path(&dir, "cut2.anet");
    ok(&["build-cut", "216/125", "1/2", &other]);
    let diff = ok(&["compare", &cut, &other, "3"]);
    assert!(diff.starts_with("DIFFERENT\t"), "{diff}");
}

#[test]
fn qp_reports_verdict_and_evidence() {
    let a = ok(&["qp", "27/8", "1/4"]);
    assert!(a.starts_with("verdict\tno-expansion\n"), "{a}");
    assert!(a.contains("r_1\t{}"), "{a}");
    let b = ok(&["qp", "27", "1/28", "--depth", "8"]);
    assert!(b.starts_with("verdict\tno-expansion\n"), "{b}");
}

#[test]
fn outputs_reload_and_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let cut = path(&dir, "cut.anet");
    ok(&["build-cut", "27/8", "1/4", &cut]);
    let q1 = path(&dir, "q1.anet");
    let q2 = path(&dir, "q2.anet");
    for q in [&q1, &q2] {
        ok(&["quotient", &cut, "0", "1", "--mode", "L1-L2", q]);
    }
    assert_eq!(fs::read(&q1).unwrap(), fs::read(&q2).unwrap());
    let first = ok(&["enum", &q1, "6"]);
    assert_eq!(first, ok(&["enum", &q1, "6"]));
    let part = ok(&["partition", &cut, "7", "--starts", "all"]);
    assert_eq!(part, ok(&["partition", &cut, "7", "--starts", "all"]));
    assert!(!ok(&["partition", &cut, "4", "--method", "exhaustive"]).is_empty());
}

#[test]
fn reduce_resolves_paths_next_to_the_spec() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("all.tsv"), ACCEPT_ALL_AB).unwrap();
    ok(&["compile-fa", &path(&dir, "all.tsv"), &path(&dir, "all.anet")]);
    let spec = "inner = \"all.anet\"\nv1 = \"a\"\nv2 = \"a\"\nv3 = \"b\"\nv4 = \"b\"\nv5 = \"b\"\npad = 4\n";
    fs::write(dir.path().join("red.toml"), spec).unwrap();
    let out = path(&dir, "red.anet");
    ok(&["reduce", &path(&dir, "red.toml"), &out]);
    assert!(Path::new(&out).exists());
    let words: Vec<String> = ok(&["enum", &out, "6"]).lines().map(String::from).collect();
    assert_eq!(words.len(), 15);
    for w in &words {
        let m = w.chars().take_while(|&c| c == '0').count();
        assert!(m >= 1 && m < w.len() && w[m..].chars().all(|c| c == '1'), "{w}");
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = oneann(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));

    let bad = path(&dir, "bad.anet");
    fs::write(&bad, "anet v1\nsize x\n").unwrap();
    fails(&["enum", &bad, "2"], 2, "parse");
    fails(&["enum", &path(&dir, "missing.anet"), "2"], 2, "io");
    fails(&["build-cut", "1/2", "1/4", &path(&dir, "x.anet")], 2, "unsupported-parameter");

    let cut = path(&dir, "cut.anet");
    ok(&["build-cut", "27/8", "1/4", &cut]);
    fails(&["run", &cut, "102"], 2, "input");
    fails(&["partition", &cut, "7", "--method", "exhaustive", "--budget", "2"], 3, "budget");

    // nxt fires once at t = 0 and never again
    let stalled = path(&dir, "stalled.anet");
    fs::write(
        &stalled,
        "anet v1\nsize 4\nanalog 4\ninputs 1 2\nnxt 3\nout 3\ndelta 2\ninit 3\nw 3 0 -1\n",
    )
    .unwrap();
    fails(&["run", &stalled, "01"], 4, "delta-violation");
}
