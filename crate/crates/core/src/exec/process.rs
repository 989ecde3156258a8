// SPDX-License-Identifier: Apache-2.0

//! Out-of-process backend speaking the runner protocol.
//!
//! For each job the backend creates a scratch directory holding the program,
//! the suite, and a JSON job descriptor, then invokes `runner <descriptor>`
//! with the scratch directory as working directory. The runner prints exactly
//! one JSON verdict line `{"status", "feedback", "wall_time"}` as the last
//! line of stdout and exits 0 whatever the subject program did; a non-zero
//! exit means the runner itself broke.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{ExecBackend, ExecLimits, IoCase, SandboxError, Status, SuiteBody, UnitSuite, Verdict};
use crate::program::SourceProgram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobDescriptor {
    pub program_path: PathBuf,
    pub suite_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<Vec<IoCase>>,
    /// Seconds.
    pub time_limit: f64,
}

/// The runner's single output line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerdictLine {
    pub status: Status,
    pub feedback: String,
    pub wall_time: f64,
}

impl VerdictLine {
    /// Parses the last non-empty line of the runner's stdout.
    pub fn from_stdout(stdout: &str) -> Result<Self, SandboxError> {
        let line = stdout
            .lines()
            .rev()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| SandboxError::RunnerFault("runner printed no verdict line".into()))?;
        serde_json::from_str(line).map_err(|e| SandboxError::RunnerFault(format!("bad verdict line {line:?}: {e}")))
    }
}

#[derive(Debug, Clone)]
pub struct ProcessBackend {
    command: Vec<String>,
    poll: Duration,
}

impl ProcessBackend {
    /// `command` is the runner program and any leading arguments; the
    /// descriptor path is appended.
    pub fn new(command: Vec<String>) -> Self {
        assert!(!command.is_empty(), "runner command must not be empty");
        ProcessBackend { command, poll: Duration::from_millis(5) }
    }

    /// Splits a command line on whitespace.
    pub fn from_command_line(cmd: &str) -> Self {
        Self::new(cmd.split_whitespace().map(String::from).collect())
    }

    fn write_job(&self, dir: &Path, program: &SourceProgram, suite: &UnitSuite) -> std::io::Result<PathBuf> {
        let program_path = dir.join("program.py");
        std::fs::write(&program_path, program.to_text())?;
        let (suite_path, cases) = match &suite.body {
            SuiteBody::TestHarness { tests } => {
                let p = dir.join("tests.py");
                std::fs::write(&p, tests)?;
                (Some(p), None)
            }
            SuiteBody::StdinStdout { cases } => (None, Some(cases.clone())),
        };
        let descriptor = JobDescriptor {
            program_path,
            suite_kind: suite.kind().to_string(),
            suite_path,
            cases,
            time_limit: suite.time_limit,
        };
        let path = dir.join("job.json");
        std::fs::write(&path, serde_json::to_vec_pretty(&descriptor).expect("descriptor serializes"))?;
        Ok(path)
    }
}

impl ExecBackend for ProcessBackend {
    fn execute(
        &self,
        program: &SourceProgram,
        suite: &UnitSuite,
        limits: &ExecLimits,
    ) -> Result<Verdict, SandboxError> {
        let scratch = tempfile::Builder::new()
            .prefix("pdbench-job-")
            .tempdir()
            .map_err(|e| SandboxError::Unavailable(format!("cannot create scratch directory: {e}")))?;
        let mut suite = suite.clone();
        suite.time_limit = limits.time_limit.as_secs_f64();
        let descriptor = self
            .write_job(scratch.path(), program, &suite)
            .map_err(|e| SandboxError::Unavailable(format!("cannot write job files: {e}")))?;

        let mut cmd = Command::new(&self.command[0]);
        cmd.args(&self.command[1..])
            .arg(&descriptor)
            .current_dir(scratch.path())
            .env_clear()
            .env("PATH", std::env::var_os("PATH").unwrap_or_default())
            .env("HOME", scratch.path())
            .env("TMPDIR", scratch.path())
            .stdin(Stdio::null())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        limit_memory(&mut cmd, limits.memory_limit);

        let started = Instant::now();
        let mut child = cmd
            .spawn()
            .map_err(|e| SandboxError::Unavailable(format!("cannot start runner {:?}: {e}", self.command[0])))?;
        let stdout = drain(child.stdout.take());
        let stderr = drain(child.stderr.take());

        let deadline = limits.time_limit + limits.grace;
        let status = loop {
            match child.try_wait() {
                Ok(Some(status)) => break Some(status),
                Ok(None) if started.elapsed() >= deadline => {
                    kill_tree(&mut child);
                    let _ = child.wait();
                    break None;
                }
                Ok(None) => std::thread::sleep(self.poll),
                Err(e) => return Err(SandboxError::RunnerFault(format!("lost track of runner: {e}"))),
            }
        };
        let wall = started.elapsed().as_secs_f64();
        let Some(status) = status else {
            return Ok(Verdict::new(Status::Timeout, format!("killed after {wall:.2}s"), wall));
        };
        let out = stdout.join().unwrap_or_default();
        let err = stderr.join().unwrap_or_default();
        if !status.success() {
            let tail: String =
                err.lines().rev().take(5).collect::<Vec<_>>().into_iter().rev().collect::<Vec<_>>().join("\n");
            return Err(SandboxError::RunnerFault(format!("runner exited with {status}: {tail}")));
        }
        let line = VerdictLine::from_stdout(&out)?;
        Ok(Verdict::new(line.status, line.feedback, line.wall_time))
    }
}

fn drain<R: Read + Send + 'static>(pipe: Option<R>) -> std::thread::JoinHandle<String> {
    std::thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut p) = pipe {
            let _ = p.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

/// Kills the runner and anything it spawned (it leads its own process group).
#[cfg(unix)]
fn kill_tree(child: &mut std::process::Child) {
    // SAFETY: plain syscall on a pid we own.
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
    }
    let _ = child.kill();
}

#[cfg(not(unix))]
fn kill_tree(child: &mut std::process::Child) {
    let _ = child.kill();
}

#[cfg(unix)]
fn limit_memory(cmd: &mut Command, bytes: u64) {
    use std::os::unix::process::CommandExt;
    cmd.process_group(0);
    // SAFETY: setrlimit is async-signal-safe and touches no parent state.
    unsafe {
        cmd.pre_exec(move || {
            let lim = libc::rlimit { rlim_cur: bytes as libc::rlim_t, rlim_max: bytes as libc::rlim_t };
            if libc::setrlimit(libc::RLIMIT_AS, &lim) != 0 {
                return Err(std::io::Error::last_os_error());
            }
            Ok(())
        });
    }
}

#[cfg(not(unix))]
fn limit_memory(_cmd: &mut Command, _bytes: u64) {}
