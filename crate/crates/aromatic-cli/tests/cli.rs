//! End-to-end tests of the `aromatic` binary: flag handling, output shapes,
//! exit codes, stdin plumbing, and the JSON format.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn aromatic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aromatic")).args(args).output().expect("binary should run")
}

fn aromatic_with_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_aromatic"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary should spawn");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().expect("binary should finish")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

#[test]
fn apply_prints_the_horizontal_differential() {
    let out = aromatic(&["apply", "--op", "dh", "--expr", "*"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "<*>\n");
}

#[test]
fn apply_accepts_the_expression_on_stdin() {
    let out = aromatic_with_stdin(&["apply", "--op", "dh", "--expr", "-"], "* *[*]\n");
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "-1/2 *[*,*] - 1/2 <*> *[*] + 1/2 <*,*> * + 1/2 <*[*]> *\n");
}

#[test]
fn apply_normalizes_a_zero_expression_to_zero() {
    let out = aromatic(&["apply", "--op", "wedge", "--expr", "<o1,o2>"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn enumerate_counts_the_rootless_order_three_slice() {
    let out = aromatic(&["enumerate", "--roots", "0", "--covertices", "0", "--order", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 7);
}

#[test]
fn enumerate_wedge_basis_drops_collapsing_forests() {
    let out = aromatic(&[
        "enumerate",
        "--roots",
        "2",
        "--covertices",
        "0",
        "--order",
        "3",
        "--wedge-basis",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "* *[*]\n");
}

#[test]
fn solve_reports_a_witness_or_exits_one() {
    let out = aromatic(&["solve-dh", "--target", "<*[*]> + <*,*>"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "*[*]\n");

    let out = aromatic(&["solve-dh", "--target", "<*[*]>"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not in image"));
}

#[test]
fn solenoidal_basis_at_order_three_is_one_line() {
    let out = aromatic(&["solenoidal", "--order", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    for piece in ["*[*,*]", "<*> *[*]", "<*,*> *", "<*[*]> *"] {
        assert!(text.contains(piece), "missing {piece} in {text}");
    }
}

#[test]
fn exactness_window_is_clean() {
    let out =
        aromatic(&["exactness", "--max-order", "3", "--max-roots", "2", "--max-covertices", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).trim_end().ends_with("slots exact"));
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    let out = aromatic(&["classify", "--tau", "*[*]", "--gamma", "<*>"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("divergence-symmetry"));
    assert!(stdout(&out).contains("eta: *[*]"));

    let out = aromatic(&["classify", "--tau", "*[*]", "--gamma", "<*[*]>"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("neither"));
}

#[test]
fn exp_lie_rejects_a_field_with_divergence() {
    let out = aromatic(&["exp-lie", "--tau", "*[*]", "--gamma", "exact-flow", "--order", "3"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not solenoidal"));
}

#[test]
fn elemdiff_asserts_zero_on_loop_aromas() {
    let dir = std::env::temp_dir().join(format!("aromatic-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("divfree.vf");
    std::fs::write(&path, "d=2; f1 = x2; f2 = -x1;\n").unwrap();
    let path = path.to_str().unwrap();

    let out = aromatic(&["elemdiff", "--expr", "<*>", "--field", path, "--assert-zero"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "0\n");

    let out = aromatic(&["elemdiff", "--expr", "<*,*>", "--field", path, "--assert-zero"]);
    assert_eq!(code(&out), 1, "the two-cycle survives a divergence-free field");

    let out = aromatic(&["elemdiff", "--expr", "*[*]", "--field", path]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "component 1: -x1\ncomponent 2: -x2\n");

    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn json_format_is_machine_readable() {
    let out = aromatic(&["apply", "--op", "dh", "--expr", "*", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["command"], "apply");
    assert_eq!(value["text"], "<*>");
    assert_eq!(value["components"][0]["order"], 1);

    let out = aromatic(&["solve-dh", "--target", "<*[*]>", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["solvable"], false);

    let out = aromatic(&["solenoidal", "--order", "3", "--format", "json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["dimension"], 1);
}

#[test]
fn bad_input_exits_two() {
    // unparseable expression
    let out = aromatic(&["apply", "--op", "dh", "--expr", "*["]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    // capacity bound
    let out = aromatic(&["enumerate", "--roots", "0", "--covertices", "0", "--order", "99"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("AROMATIC_MAX_ORDER"));

    // malformed grade pair
    let out = aromatic(&["kernel", "--grade", "banana", "--order", "3", "--op", "dh"]);
    assert_eq!(code(&out), 2);

    // unknown flag (clap's own usage error)
    let out = aromatic(&["enumerate", "--bogus"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn capacity_bound_is_configurable() {
    let out = Command::new(env!("CARGO_BIN_EXE_aromatic"))
        .args(["enumerate", "--roots", "0", "--covertices", "0", "--order", "8"])
        .env("AROMATIC_MAX_ORDER", "8")
        .output()
        .expect("binary should run");
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).lines().count() > 100);
}

#[test]
fn exact_flow_prints_the_series_by_order() {
    let out = aromatic(&["exact-flow", "--order", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "order 1: *\norder 2: 1/2 *[*]\norder 3: 1/6 *[*,*] + 1/6 *[*[*]]\n");
}
