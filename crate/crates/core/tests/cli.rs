use std::process::{Command, Output};

use dnftaut::{build_instance, EncodeOptions, GroupSpec, OracleResult};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dnftaut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bound_prints_csv() {
    let o = run(&["bound", "--n", "3", "--u", "3"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "k_max_bound,1\nk,feasible\n0,true\n1,true\n2,false\n3,false\n"
    );
}

#[test]
fn search_and_store_reuse() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("r.jsonl");
    let store = store.to_str().unwrap();
    let first = stdout(&run(&["search", "--n", "5", "--u", "3", "--store", store]));
    assert!(first
        .starts_with("n=5 u=3 group=none k=2 bound=3 matched_bound=false proven_optimal=true\n"));
    assert!(!first.contains("(stored)"));
    let second = stdout(&run(&["search", "--n", "5", "--u", "3", "--store", store]));
    assert!(second.contains("(stored)"));
    let forced = stdout(&run(&[
        "search", "--n", "5", "--u", "3", "--store", store, "--force",
    ]));
    assert!(!forced.contains("(stored)"));
    assert_eq!(std::fs::read_to_string(store).unwrap().lines().count(), 2);
}

#[test]
fn search_csv_and_json() {
    let csv = stdout(&run(&[
        "search",
        "--n",
        "4",
        "--u",
        "4",
        "--group",
        "symmetric",
        "--csv",
    ]));
    assert_eq!(
        csv.lines().next(),
        Some("n,u,group,k,status,seconds,vars,clauses,conflicts")
    );
    assert!(csv.contains("\n4,4,symmetric,2,SAT,"));
    let json = stdout(&run(&["search", "--n", "4", "--u", "4", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["k_found"], 2);
    assert_eq!(v["proven_optimal"], true);
}

#[test]
fn exact_reports_status() {
    assert!(
        stdout(&run(&["exact", "--n", "3", "--k", "1"])).starts_with("n=3 k=1 group=none UNSAT")
    );
    assert!(stdout(&run(&["exact", "--n", "4", "--k", "2"])).starts_with("n=4 k=2 group=none SAT"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.dnf");
    std::fs::write(&good, "p dnf 2 3\n1\n2\n-1 -2\n").unwrap();
    let o = run(&[
        "verify",
        "--dnf",
        good.to_str().unwrap(),
        "--k",
        "1",
        "--u",
        "2",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("PASS\n"));

    let o = run(&[
        "verify",
        "--dnf",
        good.to_str().unwrap(),
        "--k",
        "2",
        "--u",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let bad = dir.path().join("bad.dnf");
    std::fs::write(&bad, "p dnf 2 2\n1\n2\n").unwrap();
    let o = run(&[
        "verify",
        "--dnf",
        bad.to_str().unwrap(),
        "--k",
        "1",
        "--u",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"is_tautology\": false"));

    let o = run(&[
        "verify",
        "--dnf",
        "/nonexistent.dnf",
        "--k",
        "1",
        "--u",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn encode_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.cnf");
    let o = run(&[
        "encode",
        "--n",
        "4",
        "--u",
        "3",
        "--k",
        "2",
        "--group",
        "cyclic",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let g = GroupSpec::new(dnftaut::GroupKind::Cyclic, 4).unwrap();
    let lib = build_instance(4, 3, 2, &g, EncodeOptions::default().for_group(&g)).unwrap();
    assert_eq!(std::fs::read_to_string(out).unwrap(), lib.to_dimacs());
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("x.cnf");
    std::fs::write(&cnf, "p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
    let o = run(&["solve", cnf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stdout(&o).contains("s SATISFIABLE\nv -1 2 0\n"));
    std::fs::write(&cnf, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    assert_eq!(
        run(&["solve", cnf.to_str().unwrap()]).status.code(),
        Some(20)
    );
}

#[test]
fn oracle_json() {
    let o = run(&[
        "oracle", "--n", "3", "--u", "3", "--k", "1", "--group", "cyclic",
    ]);
    let r: OracleResult = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.exists);
    let o = run(&["oracle", "--n", "5", "--u", "3", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_plain_small() {
    let out = stdout(&run(&[
        "table",
        "--which",
        "plain",
        "--n-max",
        "5",
        "--workers",
        "2",
    ]));
    assert!(out.contains("plain (none)"));
    assert!(out.contains("[2]"), "{out}");
    assert!(out.contains("agree 10 disagree 0 timeout 0"), "{out}");
}

#[test]
fn unknown_group_is_an_error() {
    let o = run(&["search", "--n", "3", "--u", "3", "--group", "klein"]);
    assert!(!o.status.success());
}
