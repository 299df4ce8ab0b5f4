//! The three subcommands through the built binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const EXAMPLE: &str = "h 1 2 0\nh -2 0\n1 -1 0\n2 3 -4 0\n3 4 -5 0\n";

fn maxcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxcert")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Files {
    _dir: tempfile::TempDir,
    input: PathBuf,
    output: PathBuf,
    proof: PathBuf,
}

impl Files {
    fn new(input: &str) -> Files {
        let dir = tempfile::tempdir().unwrap();
        let p = |n: &str| dir.path().join(n);
        fs::write(p("in.wcnf"), input).unwrap();
        Files { input: p("in.wcnf"), output: p("out.wcnf"), proof: p("proof.pbp"), _dir: dir }
    }

    fn preprocess(&self, extra: &[&str]) -> Output {
        let mut args = vec!["preprocess", s(&self.input), "-o", s(&self.output), "-p", s(&self.proof)];
        args.extend_from_slice(extra);
        maxcert(&args)
    }

    fn check(&self) -> Output {
        maxcert(&["check", s(&self.input), s(&self.proof), s(&self.output)])
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn preprocess_then_check_verifies() {
    let f = Files::new(EXAMPLE);
    let pre = f.preprocess(&["--techniques", "up,bve,sle"]);
    assert_eq!(pre.status.code(), Some(0));
    assert!(stdout(&pre).contains("c input: 5 clauses, 5 variables"));
    let chk = f.check();
    assert_eq!(chk.status.code(), Some(0));
    assert_eq!(stdout(&chk).lines().last(), Some("s VERIFIED OUTPUT EQUIOPTIMAL"));
    assert!(stdout(&chk).ends_with('\n'));
}

#[test]
fn opt_on_input_and_output() {
    let f = Files::new(EXAMPLE);
    f.preprocess(&[]);
    assert_eq!(stdout(&maxcert(&["opt", s(&f.input)])), "o 1\n");
    assert_eq!(stdout(&maxcert(&["opt", s(&f.output)])), "o 1\n");
    let g = Files::new("h 1 0\nh -1 0\n");
    assert_eq!(stdout(&maxcert(&["opt", s(&g.input)])), "s INFEASIBLE\n");
    assert_eq!(maxcert(&["opt", "--bound", "3", s(&f.input)]).status.code(), Some(3));
}

#[test]
fn missing_file_and_bad_arity_exit_two() {
    let f = Files::new(EXAMPLE);
    let missing = f.input.with_file_name("missing.wcnf");
    let o = maxcert(&["preprocess", s(&missing), "-o", s(&f.output), "-p", s(&f.proof)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(maxcert(&["check", s(&f.input), s(&f.proof)]).status.code(), Some(2));
    assert_eq!(
        maxcert(&["preprocess", s(&f.input), "--techniques", "nonsense", "-o", "x", "-p", "y"]).status.code(),
        Some(2)
    );
    let g = Files::new("h 1 x 0\n");
    assert_eq!(g.preprocess(&[]).status.code(), Some(2));
}

#[test]
fn no_techniques_only_renames() {
    let f = Files::new("h 1 2 0\nh -1 2 3 0\n4 -2 0\n2 1 3 0\n");
    assert_eq!(f.preprocess(&["--techniques="]).status.code(), Some(0));
    let out = fs::read_to_string(&f.output).unwrap();
    let body: Vec<&str> = out.lines().filter(|l| !l.starts_with('c')).collect();
    assert_eq!(body, ["h 1 2 0", "h -1 2 3 0", "h 1 3 4 0", "4 -2 0", "2 -4 0"]);
    assert_eq!(f.check().status.code(), Some(0));
}

/// The line number reported in `s REJECTED <line>: <reason>`.
fn rejected_line(o: &Output) -> usize {
    let out = stdout(o);
    let rest = out.strip_prefix("s REJECTED ").unwrap_or_else(|| panic!("{out}"));
    rest.split(':').next().unwrap().parse().unwrap()
}

fn mutate_first(f: &Files, prefix: &str, from: &str, to: &str) -> usize {
    let proof = fs::read_to_string(&f.proof).unwrap();
    let (n, line) = proof.lines().enumerate().find(|(_, l)| l.starts_with(prefix)).unwrap();
    fs::write(&f.proof, proof.replacen(line, &line.replacen(from, to, 1), 1)).unwrap();
    n + 1
}

#[test]
fn flipped_coefficient_is_rejected_with_a_line_number() {
    let f = Files::new(EXAMPLE);
    f.preprocess(&["--techniques", "up,bve,sle"]);
    let n = mutate_first(&f, "obju diff -3 ", "-3", "-4");
    let o = f.check();
    assert_eq!(o.status.code(), Some(1));
    // Still a valid update while ¬b2 is in the core; the damage shows later.
    assert!(rejected_line(&o) > n);
}

#[test]
fn raised_degree_is_rejected_at_its_line() {
    let f = Files::new(EXAMPLE);
    f.preprocess(&["--techniques", "up,bve,sle"]);
    let n = mutate_first(&f, "rup ", ">= 1", ">= 2");
    let o = f.check();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(rejected_line(&o), n);
}

#[test]
fn swapped_files_are_rejected() {
    let f = Files::new(EXAMPLE);
    f.preprocess(&[]);
    let o = maxcert(&["check", s(&f.output), s(&f.proof), s(&f.input)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn same_arguments_same_bytes() {
    let f = Files::new(EXAMPLE);
    let g = Files::new(EXAMPLE);
    f.preprocess(&["--seed", "7"]);
    g.preprocess(&["--seed", "7"]);
    assert_eq!(fs::read(&f.output).unwrap(), fs::read(&g.output).unwrap());
    assert_eq!(fs::read(&f.proof).unwrap(), fs::read(&g.proof).unwrap());
}

#[test]
fn step_limit_warns_and_still_verifies() {
    let f = Files::new(EXAMPLE);
    let o = f.preprocess(&["--step-limit", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(f.check().status.code(), Some(0));
}

#[test]
fn exhausted_time_limit_still_verifies() {
    let f = Files::new(EXAMPLE);
    let o = f.preprocess(&["--time-limit", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("time limit"));
    assert_eq!(f.check().status.code(), Some(0));
    assert_eq!(f.preprocess(&["--time-limit", "-1"]).status.code(), Some(2));
}
