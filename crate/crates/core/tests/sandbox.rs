// SPDX-License-Identifier: Apache-2.0

use std::os::unix::fs::PermissionsExt;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use pdbench_core::exec::{
    ExecBackend, ExecLimits, IoCase, ProcessBackend, Sandbox, SandboxError, Status, ToyBackend, UnitSuite, Verdict,
    VerdictLine,
};
use pdbench_core::program::SourceProgram;

const MAX_PROGRAM: &str = "def largest(xs):\n    best = xs[0]\n    for i in range(1, len(xs)):\n        if xs[i] > best:\n            best = xs[i]\n    return best\n";
const MAX_TESTS: &str = "assert largest([1, 5, 3]) == 5\nassert largest([7]) == 7\nassert largest([2, 9]) == 9\n";

fn toy() -> Sandbox {
    Sandbox::with_workers(ToyBackend::default(), 4)
}

#[test]
fn correct_program_passes() {
    let v = toy().run_tests(&SourceProgram::from_text(MAX_PROGRAM), &UnitSuite::test_harness(MAX_TESTS), None).unwrap();
    assert_eq!(v.status, Status::Pass);
    assert!(v.feedback.is_empty());
}

#[test]
fn off_by_one_fails_with_assertion_feedback() {
    let buggy = MAX_PROGRAM.replace("range(1, len(xs))", "range(1, len(xs) - 1)");
    let v = toy().run_tests(&SourceProgram::from_text(&buggy), &UnitSuite::test_harness(MAX_TESTS), None).unwrap();
    assert_eq!(v.status, Status::Fail);
    assert!(
        v.feedback.contains("largest([1, 5, 3]) == 5") || v.feedback.contains("largest([2, 9]) == 9"),
        "{}",
        v.feedback
    );
}

#[test]
fn infinite_loop_times_out_within_grace() {
    let spin = SourceProgram::from_text("def largest(xs):\n    while True:\n        pass\n");
    let suite = UnitSuite::test_harness(MAX_TESTS).with_time_limit(0.5);
    let sandbox = Sandbox::with_workers(ToyBackend { fuel: u64::MAX }, 1);
    let v = sandbox.run_tests(&spin, &suite, None).unwrap();
    assert_eq!(v.status, Status::Timeout);
    assert!(v.wall_time <= 0.5 + 1.0, "{}", v.wall_time);
}

#[test]
fn stdin_stdout_suites() {
    let program = SourceProgram::from_text("n = int(input())\nprint(n * 2)\n");
    let good = UnitSuite::stdin_stdout(vec![
        IoCase { stdin: "2\n".into(), expected_stdout: "4".into() },
        IoCase { stdin: "5\n".into(), expected_stdout: "10\n\n".into() },
    ]);
    assert!(toy().passes(&program, &good).unwrap());
    let bad = UnitSuite::stdin_stdout(vec![IoCase { stdin: "3\n".into(), expected_stdout: "7".into() }]);
    let v = toy().run_tests(&program, &bad, None).unwrap();
    assert_eq!(v.status, Status::Fail);
    assert!(v.feedback.contains("case 1"));
}

#[test]
fn cache_hit_skips_execution() {
    let sandbox = toy();
    let p = SourceProgram::from_text(MAX_PROGRAM);
    let suite = UnitSuite::test_harness(MAX_TESTS);
    let a = sandbox.run_tests_cached(&p, &suite).unwrap();
    let b = sandbox.run_tests_cached(&p, &suite).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(sandbox.executions(), 1);
}

#[test]
fn whitespace_variants_are_distinct_entries() {
    let sandbox = toy();
    let suite = UnitSuite::test_harness(MAX_TESTS);
    sandbox.run_tests_cached(&SourceProgram::from_text(MAX_PROGRAM), &suite).unwrap();
    sandbox
        .run_tests_cached(&SourceProgram::from_text(&MAX_PROGRAM.replace("return best", "return best  ")), &suite)
        .unwrap();
    assert_eq!(sandbox.executions(), 2);
}

#[test]
fn executions_count_distinct_contents() {
    let sandbox = toy();
    let suite = UnitSuite::test_harness(MAX_TESTS);
    let variants = [MAX_PROGRAM.to_string(), MAX_PROGRAM.replace('>', "<"), MAX_PROGRAM.replace("[0]", "[-1]")];
    for i in 0..10 {
        sandbox.run_tests_cached(&SourceProgram::from_text(&variants[i % 3]), &suite).unwrap();
    }
    assert_eq!(sandbox.executions(), 3);
}

#[test]
fn cached_and_uncached_agree() {
    let sandbox = toy();
    let suite = UnitSuite::test_harness(MAX_TESTS);
    for src in [MAX_PROGRAM.to_string(), MAX_PROGRAM.replace('>', "<")] {
        let p = SourceProgram::from_text(&src);
        let fresh = sandbox.run_tests(&p, &suite, None).unwrap();
        let cached = sandbox.run_tests_cached(&p, &suite).unwrap();
        assert_eq!(fresh.status, cached.status);
    }
}

#[test]
fn subject_cannot_write_outside_scratch() {
    let target = std::env::temp_dir().join(format!("pdbench-probe-{}", std::process::id()));
    let probe = format!(
        "def largest(xs):\n    open({:?}, 'w').write('owned')\n    return max(xs)\n",
        target.display().to_string()
    );
    let v = toy().run_tests(&SourceProgram::from_text(&probe), &UnitSuite::test_harness(MAX_TESTS), None).unwrap();
    assert_eq!(v.status, Status::Error);
    assert!(!target.exists());
}

#[test]
fn long_feedback_is_truncated() {
    let noisy = "def largest(xs):\n    assert False, 'x' * 10000\n";
    let tests = "largest([1])\n";
    let v = toy().run_tests(&SourceProgram::from_text(noisy), &UnitSuite::test_harness(tests), None).unwrap();
    assert_ne!(v.status, Status::Pass);
    assert!(v.feedback.len() <= 4096);
}

/// Fails on its first call and passes afterwards.
struct Flaky(AtomicBool);

impl ExecBackend for Flaky {
    fn execute(&self, _: &SourceProgram, _: &UnitSuite, _: &ExecLimits) -> Result<Verdict, SandboxError> {
        let passed_before = self.0.swap(true, Ordering::SeqCst);
        Ok(if passed_before { Verdict::new(Status::Pass, "", 0.0) } else { Verdict::new(Status::Fail, "boom", 0.0) })
    }
}

#[test]
fn fail_then_pass_is_reported_as_fail() {
    let sandbox = Sandbox::with_workers(Flaky(AtomicBool::new(false)), 1);
    let p = SourceProgram::from_text("x = 1\n");
    let suite = UnitSuite::test_harness("assert x == 1\n");
    assert_eq!(sandbox.run_tests(&p, &suite, None).unwrap().status, Status::Fail);
    let second = sandbox.run_tests(&p, &suite, None).unwrap();
    assert_eq!(second.status, Status::Fail);
    assert!(second.feedback.contains("flaky"));
}

fn script(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&path, std::fs::Permissions::from_mode(0o755)).unwrap();
    path
}

fn process(path: PathBuf) -> Sandbox {
    Sandbox::with_workers(ProcessBackend::new(vec![path.display().to_string()]), 2)
}

#[test]
fn runner_verdict_line_is_parsed() {
    let dir = tempfile::tempdir().unwrap();
    let runner = script(
        &dir,
        "runner",
        r#"echo "subject output that must be ignored"
test -f program.py || exit 3
grep -q '"suite_kind": "test_harness"' "$1" || exit 4
grep -q 'assert largest' tests.py || exit 5
echo '{"status":"fail","feedback":"AssertionError: nope","wall_time":0.25}'"#,
    );
    let v = process(runner)
        .run_tests(&SourceProgram::from_text(MAX_PROGRAM), &UnitSuite::test_harness(MAX_TESTS), None)
        .unwrap();
    assert_eq!(v.status, Status::Fail);
    assert_eq!(v.feedback, "AssertionError: nope");
    assert_eq!(v.wall_time, 0.25);
}

#[test]
fn stdin_stdout_descriptor_carries_cases() {
    let dir = tempfile::tempdir().unwrap();
    let runner = script(
        &dir,
        "runner",
        r#"grep -q '"expected_stdout": "42"' "$1" && echo '{"status":"pass","feedback":"","wall_time":0.0}' || echo '{"status":"error","feedback":"no cases","wall_time":0.0}'"#,
    );
    let suite = UnitSuite::stdin_stdout(vec![IoCase { stdin: "".into(), expected_stdout: "42".into() }]);
    assert!(process(runner).passes(&SourceProgram::from_text("print(42)\n"), &suite).unwrap());
}

#[test]
fn runner_env_and_cwd_are_scratch() {
    let dir = tempfile::tempdir().unwrap();
    let runner = script(
        &dir,
        "runner",
        r#"[ "$HOME" = "$(pwd)" ] && [ -z "$PDBENCH_SECRET" ] && echo '{"status":"pass","feedback":"","wall_time":0.0}' || echo '{"status":"fail","feedback":"env leaked","wall_time":0.0}'"#,
    );
    std::env::set_var("PDBENCH_SECRET", "1");
    let v = process(runner)
        .run_tests(&SourceProgram::from_text("x = 1\n"), &UnitSuite::test_harness("pass\n"), None)
        .unwrap();
    assert_eq!(v.status, Status::Pass, "{}", v.feedback);
}

#[test]
fn malformed_verdicts_are_runner_faults() {
    let dir = tempfile::tempdir().unwrap();
    let extra = script(&dir, "extra", r#"echo '{"status":"pass","feedback":"","wall_time":0.0,"junk":1}'"#);
    let missing = script(&dir, "missing", r#"echo '{"status":"pass","feedback":""}'"#);
    let crash = script(&dir, "crash", "echo 'descriptor unreadable' >&2; exit 2");
    let p = SourceProgram::from_text("x = 1\n");
    let suite = UnitSuite::test_harness("pass\n");
    for runner in [extra, missing, crash] {
        let r = process(runner).run_tests(&p, &suite, None);
        assert!(matches!(r, Err(SandboxError::RunnerFault(_))), "{r:?}");
    }
}

#[test]
fn missing_runner_is_unavailable() {
    let r = process(PathBuf::from("/nonexistent/pdbench-runner")).run_tests(
        &SourceProgram::from_text("x = 1\n"),
        &UnitSuite::test_harness("pass\n"),
        None,
    );
    assert!(matches!(r, Err(SandboxError::Unavailable(_))));
}

#[test]
fn hung_runner_is_killed() {
    let dir = tempfile::tempdir().unwrap();
    let runner = script(&dir, "runner", "sleep 30");
    let sandbox = process(runner).with_grace(Duration::from_millis(300));
    let suite = UnitSuite::test_harness("pass\n").with_time_limit(0.5);
    let v = sandbox.run_tests(&SourceProgram::from_text("x = 1\n"), &suite, None).unwrap();
    assert_eq!(v.status, Status::Timeout);
    assert!(v.wall_time < 0.5 + 0.3 + 0.5, "{}", v.wall_time);
}

#[test]
fn verdict_line_requires_exact_keys() {
    assert!(VerdictLine::from_stdout("noise\n{\"status\":\"timeout\",\"feedback\":\"\",\"wall_time\":5.0}\n").is_ok());
    assert!(VerdictLine::from_stdout("").is_err());
    assert!(VerdictLine::from_stdout("{\"status\":\"weird\",\"feedback\":\"\",\"wall_time\":0}").is_err());
}
