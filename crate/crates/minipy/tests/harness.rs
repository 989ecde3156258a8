// SPDX-License-Identifier: Apache-2.0

use std::time::Duration;

use pdbench_minipy::{run_stdio, run_test_harness, Limits, Outcome};

const PROGRAM: &str = "def add(a, b):\n    return a + b\n";

#[test]
fn passing_suite() {
    let r = run_test_harness(PROGRAM, "assert add(1, 2) == 3\nassert add('a', 'b') == 'ab'\n", &Limits::default());
    assert_eq!(r.outcome, Outcome::Pass);
}

#[test]
fn failing_assert_names_the_test() {
    let r = run_test_harness(PROGRAM, "assert add(1, 2) == 3\nassert add(2, 2) == 5\n", &Limits::default());
    match r.outcome {
        Outcome::Fail(msg) => assert!(msg.contains("add(2, 2) == 5"), "{msg}"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn program_exception_is_error() {
    let r = run_test_harness("def f():\n    return 1 // 0\n", "assert f() == 0\n", &Limits::default());
    assert!(matches!(r.outcome, Outcome::Error(ref m) if m.contains("ZeroDivisionError")));
}

#[test]
fn syntax_error_is_error() {
    let r = run_test_harness("def f(:\n    pass\n", "assert True\n", &Limits::default());
    assert!(matches!(r.outcome, Outcome::Error(_)));
}

#[test]
fn infinite_loop_times_out() {
    let limits = Limits { fuel: u64::MAX, wall: Some(Duration::from_millis(200)), ..Limits::default() };
    let r = run_test_harness("def spin():\n    while True:\n        pass\n", "spin()\n", &limits);
    assert!(matches!(r.outcome, Outcome::Timeout(_)));
}

#[test]
fn deep_recursion_is_contained() {
    let r = run_test_harness("def f(n):\n    return f(n + 1)\n", "f(0)\n", &Limits::default());
    assert!(matches!(r.outcome, Outcome::Error(ref m) if m.contains("RecursionError")));
}

#[test]
fn stdio_round_trip() {
    let src = "n = int(input())\ntotal = 0\nfor _ in range(n):\n    total += int(input())\nprint(total)\n";
    let r = run_stdio(src, "3\n1\n2\n3\n", &Limits::default());
    assert_eq!(r.outcome, Outcome::Pass);
    assert_eq!(r.stdout, "6\n");
}
