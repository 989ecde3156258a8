// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use pdbench_core::toy::TOY_FUEL;

/// Runs the binary with the interpreter budget sized for toy tasks.
fn pdbench(dir: &Path, args: &[&str]) -> Output {
    let backend = format!("toy:{TOY_FUEL}");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdbench"));
    if !args.contains(&"--backend") {
        cmd.args(["--backend", &backend]);
    }
    cmd.current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = pdbench(dir, args);
    assert!(out.status.success(), "pdbench {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn forge_evaluate_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["toy-tasks", "--limit", "3", "--out", "tasks.jsonl"]);
    assert_eq!(lines(&d.join("tasks.jsonl")), 3);

    ok(d, &["--seed", "7", "inject", "--tasks", "tasks.jsonl", "--out", "pool.jsonl"]);
    ok(d, &["--seed", "7", "compose", "--tasks", "tasks.jsonl", "--pool", "pool.jsonl", "--out", "composed.jsonl"]);
    ok(d, &["--seed", "7", "subsample", "--variants", "pool.jsonl", "composed.jsonl", "--out", "data.jsonl"]);
    let n = lines(&d.join("data.jsonl"));
    assert!(n > 0 && n <= 3 * 4 * 5, "{n} variants");

    let table = ok(
        d,
        &[
            "evaluate",
            "--tasks",
            "tasks.jsonl",
            "--variants",
            "data.jsonl",
            "--system",
            "mock:oracle",
            "--out",
            "oracle.jsonl",
        ],
    );
    assert!(table.lines().any(|l| l.starts_with("overall") && l.contains("1.0000")), "{table}");
    assert_eq!(lines(&d.join("oracle.jsonl")), n);

    ok(
        d,
        &[
            "evaluate",
            "--tasks",
            "tasks.jsonl",
            "--variants",
            "data.jsonl",
            "--system",
            "mock:noop",
            "--out",
            "noop.jsonl",
        ],
    );
    ok(d, &["report", "--records", "oracle.jsonl", "noop.jsonl", "--json", "summary.json"]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["count"], 2 * n);
    assert_eq!(summary["overall"]["precision"], 0.5);

    // Offline re-scoring reproduces the stored scores.
    ok(
        d,
        &[
            "score",
            "--tasks",
            "tasks.jsonl",
            "--variants",
            "data.jsonl",
            "--records",
            "oracle.jsonl",
            "--out",
            "rescored.jsonl",
        ],
    );
    let a: Vec<serde_json::Value> = std::fs::read_to_string(d.join("oracle.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let b: Vec<serde_json::Value> = std::fs::read_to_string(d.join("rescored.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(a.iter().map(|r| &r["score"]).collect::<Vec<_>>(), b.iter().map(|r| &r["score"]).collect::<Vec<_>>());

    // With a threshold of one system, every variant the oracle solves is easy.
    ok(
        d,
        &[
            "filter-easy",
            "--variants",
            "data.jsonl",
            "--records",
            "oracle.jsonl",
            "--threshold",
            "1",
            "--out",
            "hard.jsonl",
        ],
    );
    assert_eq!(lines(&d.join("hard.jsonl")), 0);

    ok(d, &["probe-independence", "--tasks", "tasks.jsonl", "--variants", "composed.jsonl", "--out", "probed.jsonl"]);
    let probed = std::fs::read_to_string(d.join("probed.jsonl")).unwrap();
    assert!(probed.lines().all(|l| l.contains("\"independence\"")));
}

#[test]
fn evaluation_resumes_from_its_record_file() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["toy-tasks", "--limit", "2", "--out", "tasks.jsonl"]);
    ok(d, &["inject", "--tasks", "tasks.jsonl", "--out", "pool.jsonl"]);
    let args = [
        "evaluate",
        "--tasks",
        "tasks.jsonl",
        "--variants",
        "pool.jsonl",
        "--system",
        "mock:partial_fixer(1)",
        "--out",
        "r.jsonl",
    ];
    let first = ok(d, &args);
    let n = lines(&d.join("r.jsonl"));
    // A second run finds every record present and appends nothing.
    let second = ok(d, &args);
    assert_eq!(lines(&d.join("r.jsonl")), n);
    assert_eq!(first, second);
}

#[test]
fn same_seed_same_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["toy-tasks", "--limit", "2", "--out", "tasks.jsonl"]);
    for out in ["a.jsonl", "b.jsonl"] {
        ok(d, &["--seed", "3", "inject-multi", "--tasks", "tasks.jsonl", "--out", out]);
    }
    assert_eq!(std::fs::read(d.join("a.jsonl")).unwrap(), std::fs::read(d.join("b.jsonl")).unwrap());
}

#[test]
fn bad_inputs_are_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["toy-tasks", "--limit", "1", "--out", "tasks.jsonl"]);
    let cases: [&[&str]; 5] = [
        &["--backend", "docker", "toy-tasks", "--out", "x.jsonl"],
        &["--backend", "toy:lots", "toy-tasks", "--out", "x.jsonl"],
        &[
            "evaluate",
            "--tasks",
            "tasks.jsonl",
            "--variants",
            "tasks.jsonl",
            "--system",
            "mock:genius",
            "--out",
            "r.jsonl",
        ],
        &["inject", "--tasks", "missing.jsonl", "--out", "p.jsonl"],
        &["report", "--records", "tasks.jsonl"],
    ];
    for args in cases {
        let out = pdbench(d, args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}
