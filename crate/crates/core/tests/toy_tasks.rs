// SPDX-License-Identifier: Apache-2.0

use pdbench_core::exec::Sandbox;
use pdbench_core::toy::toy_tasks;

#[test]
fn every_toy_ground_truth_passes_its_suite() {
    let sandbox = Sandbox::toy();
    let tasks = toy_tasks();
    assert!(tasks.len() >= 10);
    for t in &tasks {
        let v = sandbox.run_tests(&t.gt_program, &t.suite, None).unwrap();
        assert!(v.passed(), "{}: {:?}", t.task_id, v);
        assert!((20..=40).contains(&t.gt_program.len()), "{} has {} lines", t.task_id, t.gt_program.len());
    }
}

#[test]
fn toy_suites_reject_an_empty_program() {
    let sandbox = Sandbox::toy();
    for t in toy_tasks() {
        let empty = pdbench_core::program::SourceProgram::from_text("x = 0\n");
        assert!(!sandbox.passes(&empty, &t.suite).unwrap(), "{}", t.task_id);
    }
}
