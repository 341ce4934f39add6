//! End-to-end tests for the `rotapx` binary: output formats, exit codes,
//! and file round-trips.

use std::path::Path;
use std::process::{Command, Output};

fn rotapx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotapx"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn census_cell_prints_verified_summary() {
    let out = rotapx(&[
        "census", "--p", "3", "--r", "4", "--s", "1", "--verify-graphs", "--brute",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("4 maps, all verified"), "got: {text}");
    assert!(text.contains("{L(+,+), L(-,-)}"));
    assert!(text.contains("C*(3,12,0,1)"));
    assert!(text.contains("C(3,4,1)"));
}

#[test]
fn census_writes_parseable_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cell.json");
    let out = rotapx(&[
        "census", "--p", "3", "--r", "4", "--s", "1", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["schema"], 1);
    assert_eq!(value["p"], 3);
    assert_eq!(value["r"], 4);
    assert_eq!(value["s"], 1);
    assert_eq!(value["entries"].as_array().unwrap().len(), 4);
    assert_eq!(value["entries"][0]["group_order"], 72);
}

#[test]
fn augmented_census_via_s_zero() {
    let out = rotapx(&["census", "--p", "3", "--r", "5", "--s", "0"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("C*(3,5,0,1)"), "got: {text}");
    assert!(text.contains("C*(3,5,0,-1)"), "got: {text}");
    assert!(text.contains("2 maps"), "got: {text}");
}

#[test]
fn domain_errors_exit_with_code_two() {
    for args in [
        &["factor", "--p", "2", "--r", "5"][..],
        &["factor", "--p", "3", "--r", "3"][..],
        &["census", "--p", "3", "--r", "2", "--s", "1"][..],
        &["exists", "--p", "3", "--r", "4", "--s", "1"][..],
        &["construct", "--p", "2", "--r", "5", "--classes", "L(+,+)"][..],
    ] {
        let out = rotapx(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error: "), "args {args:?}");
    }
}

#[test]
fn unknown_signature_is_a_parse_error() {
    let out = rotapx(&["construct", "--p", "3", "--r", "4", "--classes", "L(5)"]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("unknown class signature"), "got: {err}");
    assert!(err.contains("L(+,+)"), "got: {err}");
}

#[test]
fn budget_errors_exit_with_code_three() {
    let out = rotapx(&[
        "census", "--p", "3", "--r", "4", "--s", "1", "--brute",
        "--max-group-order", "10",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
}

#[test]
fn exists_reports_verdict_and_zeta() {
    let yes = rotapx(&["exists", "--p", "13", "--r", "7", "--s", "3"]);
    assert!(yes.status.success());
    assert_eq!(stdout(&yes).trim(), "yes (zeta=2)");

    let no = rotapx(&["exists", "--p", "3", "--r", "5", "--s", "2"]);
    assert!(no.status.success());
    assert_eq!(stdout(&no).trim(), "no (zeta=4)");
}

#[test]
fn factor_lists_cosets_and_reciprocity() {
    let out = rotapx(&["factor", "--p", "3", "--r", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("x^4 - 1 over F_3: 3 irreducible factors"));
    assert!(text.contains("x^2 + 1"));
    assert!(text.contains("{1,3}"));
    assert!(text.contains("self-reciprocal"));
}

#[test]
fn irreps_orbit_listing_pairs_the_mixed_linears() {
    let out = rotapx(&["irreps", "--p", "3", "--r", "4", "--orbits"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("{L(+,-), L(-,+)}"), "got: {text}");
    assert!(text.contains("R{1,3}     degree  2"));
}

#[test]
fn construct_exports_map_and_graph() {
    let dir = tempfile::tempdir().unwrap();
    let map_path = dir.path().join("map.json");
    let edges_path = dir.path().join("graph.edges");
    let out = rotapx(&[
        "construct", "--p", "11", "--r", "5", "--classes", "P{1}",
        "--out", map_path.to_str().unwrap(),
        "--emit-graph", edges_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("graph C(11,5,1)"), "got: {}", stdout(&out));

    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&map_path).unwrap()).unwrap();
    assert_eq!(map["group"]["p"], 11);
    assert_eq!(map["group"]["r"], 5);

    let edges = std::fs::read_to_string(&edges_path).unwrap();
    let header: Vec<&str> = edges.lines().next().unwrap().split_whitespace().collect();
    assert_eq!(header, ["11", "5", "1", "0", "55"]);
    let mut weighted_degree = vec![0u64; 55];
    for line in edges.lines().skip(1) {
        let cols: Vec<u64> = line.split_whitespace().map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 3);
        let (u, v, m) = (cols[0], cols[1], cols[2]);
        assert!(u < 55 && v < 55 && m >= 1);
        weighted_degree[u as usize] += m;
        weighted_degree[v as usize] += m;
    }
    // C(11,5,1) is 2p-regular.
    assert!(weighted_degree.iter().all(|&d| d == 22));
}

#[test]
fn iso_compares_exported_maps() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    export(&a, "3", "4", "L(+,+),R{1,3}");
    export(&b, "3", "4", "L(+,+),R{1,3}");
    export(&c, "3", "4", "L(-,-),R{1,3}");

    let same = rotapx(&["iso", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(same.status.success());
    assert_eq!(stdout(&same).trim(), "isomorphic");

    let diff = rotapx(&["iso", a.to_str().unwrap(), c.to_str().unwrap()]);
    assert!(diff.status.success());
    assert_eq!(stdout(&diff).trim(), "not isomorphic");
}

fn export(path: &Path, p: &str, r: &str, classes: &str) {
    let out = rotapx(&[
        "construct", "--p", p, "--r", r, "--classes", classes,
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
}
