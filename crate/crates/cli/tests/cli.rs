use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sparseprep::qasm::parse_qasm;
use sparseprep::simulator::{run, CompareMode};
use sparseprep::StateVector;
use sparseprep_cli::parse_state_file;

const WORKED: &str = "\
# six terms on four qubits, polar form
0000 polar 0.3 0.0
0001 polar 0.5 1.0
0110 polar 0.2 -2.0
1011 polar 0.6 0.5
1110 polar 0.4 3.0
1111 polar 0.3 -0.7
";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparseprep"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn worked_state_with_verify() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("state.txt");
    let qasm = dir.path().join("out.qasm");
    let rep = dir.path().join("report.txt");
    let json = dir.path().join("report.json");
    fs::write(&input, WORKED).unwrap();
    let out = bin(&[
        "--input", path(&input), "--qasm", path(&qasm), "--report", path(&rep),
        "--report-json", path(&json), "--verify",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let r = report(&fs::read_to_string(&rep).unwrap());
    assert_eq!(r["s"], "6");
    assert_eq!(r["n"], "4");
    assert_eq!(r["m"], "6");
    assert_eq!(r["ancillas"], "2");
    assert_eq!(r["verified"], "true");
    let rank: usize = r["rank"].parse().unwrap();
    assert_eq!(r["ccx_count"].parse::<usize>().unwrap(), 6 - rank);

    // the emitted QASM prepares the state and its metrics match the report
    let parsed = parse_qasm(&fs::read_to_string(&qasm).unwrap()).unwrap();
    let c = parsed.circuit;
    let res = c.resource_report();
    assert_eq!(r["size"], res.size.to_string());
    assert_eq!(r["depth"], res.depth.to_string());
    assert_eq!(r["non_clifford"], res.non_clifford.to_string());
    assert_eq!(r["non_clifford_t"], res.non_clifford_t.to_string());
    assert_eq!(r["t_count_estimate"], res.t_count_estimate.to_string());
    let st = parse_state_file(WORKED).unwrap();
    let got = run(&c, &StateVector::zero(6).unwrap()).unwrap();
    let want = st.to_statevector(2).unwrap();
    assert!(sparseprep::simulator::compare_states(&got, &want, CompareMode::Exact, 1e-9).unwrap().pass);

    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(j["ancillas"], 2);
    assert_eq!(j["rank"].as_u64().unwrap() as usize, rank);
}

#[test]
fn uniform_power_of_two_is_clifford_t() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.txt");
    let text: String = (0..8).map(|i| format!("{i:03b} 1\n")).collect();
    fs::write(&input, text).unwrap();
    let out = bin(&["--input", path(&input), "--tree", "complete", "--verify"]);
    assert!(out.status.success());
    let r = report(&String::from_utf8(out.stderr).unwrap());
    assert_eq!(r["non_clifford_t"], "0");
    assert_eq!(r["verified"], "true");
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("OPENQASM 2.0;"));
}

#[test]
fn missing_input_fails() {
    let out = bin(&["--input", "/nonexistent/state.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/state.txt"));
    assert_eq!(bin(&[]).status.code(), Some(1));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("dup.txt");
    fs::write(&input, "01 1\n# comment\n01 0.5\n").unwrap();
    let out = bin(&["--input", path(&input)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("line 1"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("state.txt");
    fs::write(&input, WORKED).unwrap();
    for tree in ["complete", "sorted", "greedy", "exhaustive"] {
        let a = bin(&["--input", path(&input), "--tree", tree, "--verify", "--with-measurements"]);
        let b = bin(&["--input", path(&input), "--tree", tree, "--verify", "--with-measurements"]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{tree}");
        assert_eq!(a.stderr, b.stderr, "{tree}");
        let q = String::from_utf8(a.stdout).unwrap();
        assert_eq!(parse_qasm(&q).unwrap().measurements.len(), 2);
    }
}

#[test]
fn qelib_only_has_no_cry() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("state.txt");
    fs::write(&input, WORKED).unwrap();
    let out = bin(&["--input", path(&input), "--qelib-only"]);
    let q = String::from_utf8(out.stdout).unwrap();
    assert!(!q.contains("cry"));
    assert!(q.contains("ry("));
}

#[test]
fn bad_tree_is_rejected() {
    let out = bin(&["--seed", "1", "--tree", "bushy"]);
    assert!(!out.status.success());
}

#[test]
fn seeded_self_test() {
    let a = bin(&["--seed", "42", "--self-test-count", "10", "--tree", "greedy"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let text = String::from_utf8(a.stdout.clone()).unwrap();
    assert!(text.ends_with("self-test seed=42 trials=10 failed=0\n"), "{text}");
    assert_eq!(bin(&["--seed", "42", "--self-test-count", "10", "--tree", "greedy"]).stdout, a.stdout);
}
