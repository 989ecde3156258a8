// SPDX-License-Identifier: Apache-2.0

//! Test execution: suites, verdicts, backends, and the caching sandbox.

mod process;
mod toy;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::{short_hash, SourceProgram};

pub use process::{JobDescriptor, ProcessBackend, VerdictLine};
pub use toy::ToyBackend;

pub const DEFAULT_TIME_LIMIT: f64 = 30.0;
pub const DEFAULT_MEMORY_LIMIT: u64 = 1 << 30;
pub const FEEDBACK_LIMIT: usize = 4096;

#[derive(Debug, Error)]
pub enum SandboxError {
    #[error("sandbox unavailable: {0}")]
    Unavailable(String),
    #[error("test runner fault: {0}")]
    RunnerFault(String),
    #[error("invalid suite: {0}")]
    InvalidSuite(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IoCase {
    pub stdin: String,
    pub expected_stdout: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SuiteBody {
    /// Test source run in the same namespace as the program; every assert is a test.
    TestHarness {
        tests: String,
    },
    StdinStdout {
        cases: Vec<IoCase>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSuite {
    #[serde(flatten)]
    pub body: SuiteBody,
    /// Seconds.
    #[serde(default = "default_time_limit")]
    pub time_limit: f64,
    /// Bytes.
    #[serde(default = "default_memory_limit")]
    pub memory_limit: u64,
}

fn default_time_limit() -> f64 {
    DEFAULT_TIME_LIMIT
}

fn default_memory_limit() -> u64 {
    DEFAULT_MEMORY_LIMIT
}

impl UnitSuite {
    pub fn test_harness(tests: impl Into<String>) -> Self {
        UnitSuite {
            body: SuiteBody::TestHarness { tests: tests.into() },
            time_limit: DEFAULT_TIME_LIMIT,
            memory_limit: DEFAULT_MEMORY_LIMIT,
        }
    }

    pub fn stdin_stdout(cases: Vec<IoCase>) -> Self {
        UnitSuite {
            body: SuiteBody::StdinStdout { cases },
            time_limit: DEFAULT_TIME_LIMIT,
            memory_limit: DEFAULT_MEMORY_LIMIT,
        }
    }

    pub fn with_time_limit(mut self, seconds: f64) -> Self {
        self.time_limit = seconds;
        self
    }

    pub fn validate(&self) -> Result<(), SandboxError> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(SandboxError::InvalidSuite(format!("time_limit must be positive, got {}", self.time_limit)));
        }
        if let SuiteBody::StdinStdout { cases } = &self.body {
            if cases.is_empty() {
                return Err(SandboxError::InvalidSuite("stdin_stdout suite has no cases".into()));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            SuiteBody::TestHarness { .. } => "test_harness",
            SuiteBody::StdinStdout { .. } => "stdin_stdout",
        }
    }

    /// Suite text shown to debuggers in prompts that include the tests.
    pub fn display_text(&self) -> String {
        match &self.body {
            SuiteBody::TestHarness { tests } => tests.clone(),
            SuiteBody::StdinStdout { cases } => cases
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    format!("# case {}\n# input:\n{}\n# expected output:\n{}\n", i + 1, c.stdin, c.expected_stdout)
                })
                .collect(),
        }
    }

    pub fn content_hash(&self) -> String {
        short_hash(serde_json::to_string(self).expect("suite serializes").as_bytes())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub feedback: String,
    /// Seconds.
    pub wall_time: f64,
}

impl Verdict {
    pub fn new(status: Status, feedback: impl Into<String>, wall_time: f64) -> Self {
        let feedback =
            if status == Status::Pass { String::new() } else { truncate_utf8(feedback.into(), FEEDBACK_LIMIT) };
        Verdict { status, feedback, wall_time }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Cuts `s` to at most `limit` bytes on a char boundary.
pub fn truncate_utf8(mut s: String, limit: usize) -> String {
    if s.len() > limit {
        let mut cut = limit;
        while !s.is_char_boundary(cut) {
            cut -= 1;
        }
        s.truncate(cut);
    }
    s
}

/// Effective limits for one execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecLimits {
    pub time_limit: Duration,
    pub memory_limit: u64,
    /// Extra time allowed past `time_limit` before the run is forcibly stopped.
    pub grace: Duration,
}

/// Optional per-call overrides of the suite's limits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LimitOverrides {
    pub time_limit: Option<f64>,
    pub memory_limit: Option<u64>,
}

/// Something that can run a program against a suite.
pub trait ExecBackend: Send + Sync {
    fn execute(&self, program: &SourceProgram, suite: &UnitSuite, limits: &ExecLimits)
        -> Result<Verdict, SandboxError>;
}

struct Pool {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Pool {
    fn acquire(&self) -> PoolGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        PoolGuard(self)
    }
}

struct PoolGuard<'a>(&'a Pool);

impl Drop for PoolGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

/// Runs programs through a backend with a bounded worker pool and a verdict
/// cache keyed by (program hash, suite hash).
pub struct Sandbox {
    backend: Box<dyn ExecBackend>,
    cache: DashMap<(String, String), Verdict>,
    executions: AtomicU64,
    pool: Pool,
    grace: Duration,
}

impl Sandbox {
    pub fn new(backend: impl ExecBackend + 'static) -> Self {
        let workers = std::env::var("SANDBOX_WORKERS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4));
        Self::with_workers(backend, workers)
    }

    pub fn with_workers(backend: impl ExecBackend + 'static, workers: usize) -> Self {
        Sandbox {
            backend: Box::new(backend),
            cache: DashMap::new(),
            executions: AtomicU64::new(0),
            pool: Pool { free: Mutex::new(workers.max(1)), cv: Condvar::new() },
            grace: Duration::from_secs(1),
        }
    }

    /// In-process interpreter backend; what every offline pipeline uses.
    pub fn toy() -> Self {
        Self::new(ToyBackend::default())
    }

    pub fn with_grace(mut self, grace: Duration) -> Self {
        self.grace = grace;
        self
    }

    /// Number of executions performed (cache hits excluded).
    pub fn executions(&self) -> u64 {
        self.executions.load(Ordering::Relaxed)
    }

    /// Executes without consulting the cache for the answer. If a stored
    /// verdict for the same content is a non-pass and this run passes, the run
    /// is flaky and is reported as a failure.
    pub fn run_tests(
        &self,
        program: &SourceProgram,
        suite: &UnitSuite,
        overrides: Option<&LimitOverrides>,
    ) -> Result<Verdict, SandboxError> {
        suite.validate()?;
        let limits = self.limits(suite, overrides);
        let verdict = {
            let _slot = self.pool.acquire();
            self.executions.fetch_add(1, Ordering::Relaxed);
            self.backend.execute(program, suite, &limits)?
        };
        let key = (program.content_hash().to_string(), suite.content_hash());
        if let Some(previous) = self.cache.get(&key) {
            if !previous.passed() && verdict.passed() {
                log::warn!("flaky result for program {}: earlier {:?}, now pass", key.0, previous.status);
                return Ok(Verdict::new(
                    Status::Fail,
                    format!("flaky: an earlier run on identical content ended with {:?}", previous.status),
                    verdict.wall_time,
                ));
            }
        }
        self.cache.insert(key, verdict.clone());
        Ok(verdict)
    }

    /// Like [`run_tests`](Self::run_tests) but returns a stored verdict without executing.
    pub fn run_tests_cached(&self, program: &SourceProgram, suite: &UnitSuite) -> Result<Verdict, SandboxError> {
        let key = (program.content_hash().to_string(), suite.content_hash());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        self.run_tests(program, suite, None)
    }

    /// Whether `program` passes every test.
    pub fn passes(&self, program: &SourceProgram, suite: &UnitSuite) -> Result<bool, SandboxError> {
        Ok(self.run_tests_cached(program, suite)?.passed())
    }

    fn limits(&self, suite: &UnitSuite, overrides: Option<&LimitOverrides>) -> ExecLimits {
        let time = overrides.and_then(|o| o.time_limit).unwrap_or(suite.time_limit);
        let memory = overrides.and_then(|o| o.memory_limit).unwrap_or(suite.memory_limit);
        ExecLimits { time_limit: Duration::from_secs_f64(time), memory_limit: memory, grace: self.grace }
    }
}

/// Stdout comparison used for stdin/stdout suites: trailing whitespace on
/// each line and trailing blank lines are ignored.
pub fn stdout_matches(actual: &str, expected: &str) -> bool {
    fn canon(s: &str) -> Vec<&str> {
        let mut lines: Vec<&str> = s.lines().map(str::trim_end).collect();
        while lines.last() == Some(&"") {
            lines.pop();
        }
        lines
    }
    canon(actual) == canon(expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_respects_char_boundaries() {
        let s = "é".repeat(3000);
        let t = truncate_utf8(s, FEEDBACK_LIMIT);
        assert!(t.len() <= FEEDBACK_LIMIT);
        assert!(t.chars().all(|c| c == 'é'));
    }

    #[test]
    fn stdout_normalization() {
        assert!(stdout_matches("5\n", "5"));
        assert!(stdout_matches("1  \n2\n\n\n", "1\n2"));
        assert!(!stdout_matches(" 5", "5"));
    }

    #[test]
    fn suite_json_shape() {
        let suite = UnitSuite::test_harness("assert True");
        let json = serde_json::to_value(&suite).unwrap();
        assert_eq!(json["kind"], "test_harness");
        assert_eq!(json["tests"], "assert True");
        let back: UnitSuite = serde_json::from_value(json).unwrap();
        assert_eq!(back, suite);
        let minimal: UnitSuite =
            serde_json::from_str(r#"{"kind":"stdin_stdout","cases":[{"stdin":"1","expected_stdout":"1"}]}"#).unwrap();
        assert_eq!(minimal.time_limit, DEFAULT_TIME_LIMIT);
    }

    #[test]
    fn suite_validation() {
        assert!(UnitSuite::stdin_stdout(vec![]).validate().is_err());
        assert!(UnitSuite::test_harness("").with_time_limit(0.0).validate().is_err());
    }

    #[test]
    fn pass_verdicts_drop_feedback() {
        assert!(Verdict::new(Status::Pass, "noise", 0.1).feedback.is_empty());
    }
}
