// SPDX-License-Identifier: Apache-2.0

//! A small, hermetic interpreter for a Python subset.
//!
//! It exists so benchmark pipelines can execute subject programs and their
//! unit tests without spawning an external runtime. The supported language
//! covers functions (no closures), `if`/`while`/`for`, lists, tuples, dicts,
//! strings, ints and floats, list comprehensions, and the common builtins.
//! Anything outside that subset raises an exception inside the program, which
//! a test harness reports as an error verdict.
//!
//! Execution is bounded by a step budget and an optional wall-clock deadline;
//! exhausting either produces [`Outcome::Timeout`].

mod ast;
mod error;
mod interp;
mod lexer;
mod parser;
mod value;

use std::time::{Duration, Instant};

pub use error::Exception;

use interp::{Interp, TIMEOUT_KIND};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum interpreter steps (statements, loop iterations, calls).
    pub fuel: u64,
    pub wall: Option<Duration>,
    /// Largest list/string/dict the program may build.
    pub max_collection: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { fuel: 5_000_000, wall: Some(Duration::from_secs(30)), max_collection: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// An assertion failed; carries the failure description.
    Fail(String),
    /// The program raised something other than an assertion failure.
    Error(String),
    Timeout(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub outcome: Outcome,
    pub stdout: String,
}

/// Checks that `source` parses, without running it.
pub fn check_syntax(source: &str) -> Result<(), Exception> {
    parser::parse_program(source).map(|_| ())
}

/// Loads `program`, then executes `tests` in the same global namespace.
/// Every `assert` in `tests` is a test; the first failure ends the run.
pub fn run_test_harness(program: &str, tests: &str, limits: &Limits) -> RunReport {
    let program = program.to_string();
    let tests = tests.to_string();
    let limits = *limits;
    on_big_stack(move || {
        let started = Instant::now();
        let mut interp = Interp::new(limits.fuel, limits.wall.map(|w| started + w), limits.max_collection, "");
        let loaded = parser::parse_program(&program).and_then(|stmts| interp.exec_module(&stmts));
        if let Err(e) = loaded {
            return RunReport { outcome: classify(e, None, false), stdout: interp.stdout };
        }
        let test_stmts = match parser::parse_program(&tests) {
            Ok(s) => s,
            Err(e) => {
                return RunReport {
                    outcome: Outcome::Error(format!("test suite does not parse: {e}")),
                    stdout: interp.stdout,
                }
            }
        };
        let test_lines: Vec<&str> = tests.split('\n').collect();
        let outcome = match interp.exec_module(&test_stmts) {
            Ok(()) => Outcome::Pass,
            Err(e) => classify(e, Some(&test_lines), true),
        };
        RunReport { outcome, stdout: interp.stdout }
    })
}

/// Runs `program` with `stdin` as standard input and captures what it prints.
pub fn run_stdio(program: &str, stdin: &str, limits: &Limits) -> RunReport {
    let program = program.to_string();
    let stdin = stdin.to_string();
    let limits = *limits;
    on_big_stack(move || {
        let started = Instant::now();
        let mut interp = Interp::new(limits.fuel, limits.wall.map(|w| started + w), limits.max_collection, &stdin);
        let result = parser::parse_program(&program).and_then(|stmts| interp.exec_module(&stmts));
        let outcome = match result {
            Ok(()) => Outcome::Pass,
            Err(e) => classify(e, None, false),
        };
        RunReport { outcome, stdout: interp.stdout }
    })
}

fn classify(e: Exception, test_lines: Option<&[&str]>, in_tests: bool) -> Outcome {
    if e.kind == TIMEOUT_KIND {
        return Outcome::Timeout(e.message);
    }
    if e.kind == "AssertionError" && in_tests {
        let source = e.line.and_then(|l| test_lines.and_then(|lines| lines.get(l - 1))).map(|s| s.trim().to_string());
        let mut text = String::from("AssertionError");
        if !e.message.is_empty() {
            text.push_str(": ");
            text.push_str(&e.message);
        }
        if let Some(src) = source {
            text.push_str(&format!(" in test `{src}`"));
        }
        return Outcome::Fail(text);
    }
    Outcome::Error(e.to_string())
}

fn on_big_stack<F>(f: F) -> RunReport
where
    F: FnOnce() -> RunReport + Send + 'static,
{
    let handle = std::thread::Builder::new().stack_size(256 << 20).spawn(f);
    match handle.map(|h| h.join()) {
        Ok(Ok(report)) => report,
        Ok(Err(_)) => RunReport { outcome: Outcome::Error("interpreter panicked".into()), stdout: String::new() },
        Err(e) => {
            RunReport { outcome: Outcome::Error(format!("could not start interpreter: {e}")), stdout: String::new() }
        }
    }
}
