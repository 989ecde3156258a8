// SPDX-License-Identifier: Apache-2.0

use std::time::Instant;

use pdbench_minipy::{run_stdio, run_test_harness, Limits, Outcome};

use super::{stdout_matches, ExecBackend, ExecLimits, SandboxError, Status, SuiteBody, UnitSuite, Verdict};
use crate::program::SourceProgram;

/// Runs programs in the bundled Python-subset interpreter, in process.
///
/// Memory is bounded by capping collection sizes (one element per 64 bytes of
/// the memory limit) rather than by the OS.
#[derive(Debug, Clone, Copy)]
pub struct ToyBackend {
    /// Interpreter step budget per run; exhausting it counts as a timeout.
    pub fuel: u64,
}

impl Default for ToyBackend {
    fn default() -> Self {
        ToyBackend { fuel: 20_000_000 }
    }
}

impl ExecBackend for ToyBackend {
    fn execute(
        &self,
        program: &SourceProgram,
        suite: &UnitSuite,
        limits: &ExecLimits,
    ) -> Result<Verdict, SandboxError> {
        let started = Instant::now();
        let interp_limits = Limits {
            fuel: self.fuel,
            wall: Some(limits.time_limit),
            max_collection: (limits.memory_limit / 64).max(1024) as usize,
        };
        let source = program.to_text();
        let (status, feedback) = match &suite.body {
            SuiteBody::TestHarness { tests } => convert(run_test_harness(&source, tests, &interp_limits).outcome),
            SuiteBody::StdinStdout { cases } => {
                let mut result = (Status::Pass, String::new());
                for (i, case) in cases.iter().enumerate() {
                    let remaining = limits.time_limit.saturating_sub(started.elapsed());
                    let case_limits = Limits { wall: Some(remaining), ..interp_limits };
                    let report = run_stdio(&source, &case.stdin, &case_limits);
                    let (status, feedback) = convert(report.outcome);
                    if status != Status::Pass {
                        result = (status, format!("case {}: {feedback}", i + 1));
                        break;
                    }
                    if !stdout_matches(&report.stdout, &case.expected_stdout) {
                        result = (
                            Status::Fail,
                            format!(
                                "case {}: expected output {:?}, got {:?}",
                                i + 1,
                                case.expected_stdout.trim_end(),
                                report.stdout.trim_end()
                            ),
                        );
                        break;
                    }
                }
                result
            }
        };
        Ok(Verdict::new(status, feedback, started.elapsed().as_secs_f64()))
    }
}

fn convert(outcome: Outcome) -> (Status, String) {
    match outcome {
        Outcome::Pass => (Status::Pass, String::new()),
        Outcome::Fail(m) => (Status::Fail, m),
        Outcome::Error(m) => (Status::Error, m),
        Outcome::Timeout(m) => (Status::Timeout, m),
    }
}
