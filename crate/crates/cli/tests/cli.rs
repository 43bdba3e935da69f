//! End-to-end runs of the `cosetcr` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn run(args: &[&str], workers: usize) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosetcr"))
        .args(args)
        .env("COSETCR_WORKERS", workers.to_string())
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or(Value::Null)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cosetcr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = std::fs::remove_file(&p);
    p
}

const DFS: &[&str] = &["search", "--q", "3", "--n", "12", "--k", "3", "--weights", "6,9", "--split-depth", "3"];
const EXT: &[&str] = &["search", "--strategy", "extension", "--q", "3", "--n", "28", "--k", "6", "--weights", "12,18,21"];

#[test]
fn reports_do_not_depend_on_worker_count() {
    for args in [DFS, EXT, &["search", "--strategy", "extension", "--q", "2", "--n", "15", "--k", "4", "--weights", "8"]] {
        let one = run(args, 1);
        let four = run(args, 4);
        assert!(one.status.success(), "{}", String::from_utf8_lossy(&one.stderr));
        assert_eq!(one.stdout, four.stdout, "{args:?}");
    }
}

/// Chops a run into pieces of `step` units each and checks that the last
/// piece reports what a single run does.
fn resumed(args: &[&str], step: &str, file: &str, counters: [&str; 2]) {
    let whole = json(&run(args, 2))["result"].clone();
    let ck = scratch(file);
    let mut full: Vec<&str> = args.to_vec();
    let ck_s = ck.display().to_string();
    full.extend(["--checkpoint", &ck_s, "--max-subtrees", step]);
    let mut pieces = 0;
    let last = loop {
        let out = run(&full, 2);
        pieces += 1;
        match out.status.code() {
            Some(4) => assert_eq!(json(&out)["result"]["status"], "interrupted"),
            Some(0) => break json(&out)["result"].clone(),
            other => panic!("exit {other:?}: {}", String::from_utf8_lossy(&out.stderr)),
        }
        assert!(pieces < 500);
    };
    assert!(pieces > 2, "{pieces} pieces");
    let strip = |mut v: Value| {
        for c in counters {
            v.as_object_mut().unwrap().remove(c);
        }
        v
    };
    assert_eq!(strip(whole), strip(last));
}

#[test]
fn dfs_resumes_from_checkpoint() {
    resumed(DFS, "20", "dfs.json", ["completed_subtrees", "resumed_subtrees"]);
}

#[test]
fn extension_resumes_from_checkpoint() {
    resumed(EXT, "9", "ext.json", ["completed_classes", "resumed_classes"]);
}

#[test]
fn checkpoint_for_another_problem_is_refused() {
    let ck = scratch("other.json");
    let ck_s = ck.display().to_string();
    let first = run(&["search", "--strategy", "extension", "--q", "2", "--n", "7", "--k", "3", "--weights", "4", "--checkpoint", &ck_s], 1);
    assert!(first.status.success());
    let again = run(&["search", "--strategy", "extension", "--q", "2", "--n", "7", "--k", "3", "--weights", "4,6", "--checkpoint", &ck_s], 1);
    assert_eq!(again.status.code(), Some(2));
    let dfs = run(&["search", "--q", "2", "--n", "7", "--k", "3", "--weights", "4", "--checkpoint", &ck_s], 1);
    assert_eq!(dfs.status.code(), Some(2));
}

#[test]
fn strategies_agree_on_certificates() {
    let base = ["search", "--q", "2", "--n", "15", "--k", "4", "--weights", "8"];
    let dfs = json(&run(&base, 2));
    let mut ext_args = base.to_vec();
    ext_args.extend(["--strategy", "extension"]);
    let ext = json(&run(&ext_args, 2));
    assert_eq!(dfs["result"]["status"], "found");
    assert_eq!(ext["result"]["status"], "found");
    // the simplex code is unique, so one class; dfs lists every normalized copy
    assert_eq!(ext["result"]["certificates"].as_array().unwrap().len(), 1);
    let block = ext["result"]["certificates"][0].as_str().unwrap();
    let path = scratch("simplex.txt");
    std::fs::write(&path, block).unwrap();
    let wd = json(&run(&["wd", &path.display().to_string()], 1));
    assert_eq!(wd["result"]["wd"]["compact"], "{0^1,8^15}");
}

#[test]
fn exit_codes() {
    // input errors
    let bad = scratch("bad.txt");
    std::fs::write(&bad, "2 3\n1 0 1\n").unwrap();
    assert_eq!(run(&["wd", &bad.display().to_string()], 1).status.code(), Some(2));
    let d2 = data("codes/even_weight_4.txt").display().to_string();
    assert_eq!(run(&["coset-graph", &d2], 1).status.code(), Some(2));
    assert_eq!(run(&["search", "--q", "4", "--n", "5", "--k", "2", "--weights", "4"], 1).status.code(), Some(2));
    let mixed = ["search", "--strategy", "extension", "--no-normalize", "--q", "2", "--n", "7", "--k", "3", "--weights", "4"];
    assert_eq!(run(&mixed, 1).status.code(), Some(2));
    // resource guard
    let huge = run(&["search", "--q", "3", "--n", "40", "--k", "14", "--weights", "27"], 1);
    assert_eq!(huge.status.code(), Some(3), "{}", String::from_utf8_lossy(&huge.stderr));
    // a verdict, even a rejection, is a clean run
    assert_eq!(run(&["screen", "{25,24,3;1,3,20}"], 1).status.code(), Some(0));
}

#[test]
fn problem_file_selects_strategy() {
    let p = scratch("problem.json");
    std::fs::write(&p, r#"{"q":7,"n":7,"k":3,"weights":[4,6,7],"strategy":"extension"}"#).unwrap();
    let r = json(&run(&["search", &p.display().to_string()], 1));
    assert_eq!(r["result"]["strategy"], "extension");
    assert_eq!(r["result"]["status"], "none");
    std::fs::write(&p, r#"{"q":7,"n":7,"k":3,"weights":[4,6,7],"strategy":"bfs"}"#).unwrap();
    assert_eq!(run(&["search", &p.display().to_string()], 1).status.code(), Some(2));
}

#[test]
fn verify_partition_and_export() {
    let ham = data("codes/hamming_7_4.txt").display().to_string();
    let adj = scratch("k8.adj");
    let adj_s = adj.display().to_string();
    let out = run(&["coset-graph", &ham, "--check-dr", "--export", &adj_s], 1);
    assert!(out.status.success());
    assert_eq!(json(&out)["result"]["array"]["text"], "{7;1}");
    let part = scratch("k8.part");
    std::fs::write(&part, "0\n1\n1\n1\n1\n1\n1\n1\n").unwrap();
    let r = json(&run(&["verify-partition", &adj_s, &part.display().to_string()], 1));
    assert_eq!(r["result"]["equitable"], true);
    assert_eq!(r["result"]["quotient"], serde_json::json!([[0, 7], [1, 6]]));
    // in K8 every partition is equitable; a path on three vertices is not
    std::fs::write(&adj, "0: 1\n1: 0 2\n2: 1\n").unwrap();
    std::fs::write(&part, "0\n1\n1\n").unwrap();
    let r = json(&run(&["verify-partition", &adj_s, &part.display().to_string()], 1));
    assert_eq!(r["result"]["equitable"], false, "{}", r["result"]);
}
