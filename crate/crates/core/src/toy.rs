// SPDX-License-Identifier: Apache-2.0

//! A bundled family of small tasks runnable on the in-process interpreter.

use crate::dataset::Task;
use crate::exec::{Sandbox, ToyBackend, UnitSuite};
use crate::program::SourceProgram;

struct ToySource {
    name: &'static str,
    description: &'static str,
    program: &'static str,
    tests: &'static str,
}

macro_rules! toy {
    ($name:literal) => {
        ToySource {
            name: $name,
            description: include_str!(concat!("../assets/toy/", $name, "/description.txt")),
            program: include_str!(concat!("../assets/toy/", $name, "/program.py")),
            tests: include_str!(concat!("../assets/toy/", $name, "/tests.py")),
        }
    };
}

static SOURCES: &[ToySource] = &[
    toy!("binary_search"),
    toy!("brackets"),
    toy!("caesar"),
    toy!("fizzbuzz"),
    toy!("intervals"),
    toy!("inventory"),
    toy!("matrix"),
    toy!("number_theory"),
    toy!("primes"),
    toy!("roman"),
    toy!("run_length"),
    toy!("running_stats"),
    toy!("two_sum"),
    toy!("word_freq"),
];

/// Time limit for toy suites; they finish in milliseconds when correct.
pub const TOY_TIME_LIMIT: f64 = 5.0;

/// Interpreter steps per toy run; the slowest ground-truth suite needs under 4k.
pub const TOY_FUEL: u64 = 100_000;

/// A sandbox sized for the toy family, so non-terminating mutants fail fast.
pub fn toy_sandbox() -> Sandbox {
    Sandbox::new(ToyBackend { fuel: TOY_FUEL })
}

pub fn toy_tasks() -> Vec<Task> {
    SOURCES
        .iter()
        .map(|s| Task {
            task_id: format!("toy/{}", s.name),
            source: "toy".into(),
            description: s.description.trim().to_string(),
            gt_program: SourceProgram::from_text(s.program),
            suite: UnitSuite::test_harness(s.tests).with_time_limit(TOY_TIME_LIMIT),
            suite_visible: true,
        })
        .collect()
}
