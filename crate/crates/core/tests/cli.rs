//! Exit codes and output formats of the `morphic` binary.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_morphic"));
    cmd.env_remove("MORPHIC_NODE_BUDGET")
        .env_remove("MORPHIC_TIMEOUT")
        .env_remove("MORPHIC_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn generate_prints_prefixes() {
    let o = run(&["generate", "--morphism", "012/02/1", "--length", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "012021012102\n");

    let o = run(&[
        "generate",
        "--morphism",
        "012/02/1",
        "--outer",
        "122/12/10",
        "--length",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "122121012\n");
}

#[test]
fn repetition_commands() {
    let o = run_stdin(&["squares", "--stdin"], "0010\n010\n");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "00\n001001\n010010\n");

    let o = run_stdin(&["overlaps", "--stdin"], "0010010");
    assert_eq!(stdout(&o), "0010010\n");

    let o = run_stdin(&["exponent", "--stdin"], "0010010");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "exponent 7/3\nstart 0\nperiod 3\nfactor 0010010\n"
    );
}

#[test]
fn match_lists_assignments() {
    let o = run_stdin(
        &["match", "--formula", "ABA", "--stdin", "--cap", "1"],
        "01020",
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l.starts_with("A=")));
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let c = file(&dir, "sf.cons", "alphabet 3\nforbid-formula AA\n");
    let o = run_stdin(&["check", "--constraints", &c, "--stdin"], "0120");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ok\n");

    let o = run_stdin(&["check", "--constraints", &c, "--stdin"], "0121010");
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("violation "), "{text}");
    assert!(text.contains("witness 1010"), "{text}");
}

#[test]
fn search_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let bin2 = file(&dir, "b.cons", "alphabet 2\nforbid-formula AA\n");
    let o = run(&["search", "--constraints", &bin2, "--budget-length", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "outcome exhausted\nmax_length 3\nwitness 010\ntree_nodes 6\n"
    );

    let tern = file(&dir, "t.cons", "alphabet 3\nforbid-formula AA\n");
    let o = run(&["search", "--constraints", &tern, "--budget-length", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("outcome reached_budget\nmax_length 40\n"));

    let o = run(&[
        "search",
        "--constraints",
        &tern,
        "--budget-length",
        "5000",
        "--budget-nodes",
        "50",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("longest good word so far"));
}

#[test]
fn counts_and_extendable() {
    let dir = tempfile::tempdir().unwrap();
    let c = file(&dir, "t.cons", "alphabet 3\nforbid-formula AA\n");
    let o = run(&["counts", "--constraints", &c, "--max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\t3\n2\t6\n3\t12\n4\t18\n5\t30\n");

    let o = run(&[
        "--workers",
        "2",
        "counts",
        "--constraints",
        &c,
        "--max",
        "5",
    ]);
    assert_eq!(stdout(&o), "1\t3\n2\t6\n3\t12\n4\t18\n5\t30\n");

    let o = run(&[
        "extendable",
        "--constraints",
        &c,
        "--length",
        "2",
        "--horizon",
        "6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "01\n02\n10\n12\n20\n21\n");
}

#[test]
fn verify_manifests() {
    let m = repo().join("manifests/b3");
    let o = run(&["-q", "verify", "--manifest", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("VERDICT b3 PASS"));

    let dir = tempfile::tempdir().unwrap();
    let cons = repo().join("manifests/constraints/pd-new.cons");
    let bad = file(
        &dir,
        "bad",
        &format!(
            "name wrong-target\nconstraints {}\ntarget-inner 01/0\ncheck-length 8\n",
            cons.display()
        ),
    );
    let o = run(&["-q", "verify", "--manifest", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("VERDICT wrong-target FAIL"));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));

    let o = run(&["generate", "--morphism", "01/x", "--length", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["generate", "--morphism", "1/0", "--length", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: "));

    let o = run(&["check", "--constraints", "/nonexistent.cons", "--stdin"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run_stdin(&["squares", "--stdin"], "01a");
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["exponent", "--input", "/nonexistent/word"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.txt");
    let o = run(&[
        "generate",
        "--morphism",
        "01/0",
        "--length",
        "8",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(target).unwrap(), "01001010\n");
}

#[test]
fn env_budget_applies() {
    let dir = tempfile::tempdir().unwrap();
    let c = file(&dir, "t.cons", "alphabet 3\nforbid-formula AA\n");
    let o = bin()
        .args(["search", "--constraints", &c, "--budget-length", "5000"])
        .env("MORPHIC_NODE_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_all_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["b3", "fib", "k5-p5-walk"] {
        let text = std::fs::read_to_string(repo().join("manifests").join(name)).unwrap();
        let cons = repo().join("manifests/constraints");
        let text = text.replace("constraints/", &format!("{}/", cons.display()));
        file(&dir, name, &text);
    }
    let d = dir.path().to_str().unwrap();
    let runs: Vec<Output> = ["1", "2", "1"]
        .iter()
        .map(|w| run(&["-q", "--workers", w, "verify-all", "--dir", d]))
        .collect();
    for o in &runs {
        assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
    }
    assert_eq!(runs[0].stdout, runs[1].stdout);
    assert_eq!(runs[0].stdout, runs[2].stdout);
    assert_eq!(stdout(&runs[0]).matches("VERDICT").count(), 3);
}
