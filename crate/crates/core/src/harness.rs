// SPDX-License-Identifier: Apache-2.0

//! Dataset ingestion, debugging protocols, mock debuggers, and benchmark runs.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{read_jsonl_lenient, task_index, BuggyVariant, DatasetError, Task};
use crate::edit::{apply_edits, merge_blocks, EditError};
use crate::exec::{IoCase, Sandbox, SandboxError, UnitSuite, Verdict};
use crate::gateway::{
    debug_template, extract_program, render_prompt, CompletionProvider, CompletionRequest, PromptStyle, ProviderError,
    RetryingClient,
};
use crate::matching::{MatchKind, MatchSet};
use crate::metrics::{aggregate, score_example, BlockLabel, ExampleScore, LabeledScore, Report, ScoreError};
use crate::program::{short_hash, SourceProgram};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error("task {0} does not expose its suite")]
    SuiteUnavailable(String),
    #[error("variant {bug_id} refers to unknown task {task_id}")]
    UnknownTask { bug_id: String, task_id: String },
    #[error("unknown source format `{0}`")]
    UnknownFormat(String),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("checkpoint I/O: {0}")]
    Checkpoint(#[from] std::io::Error),
    #[error("dataset is empty")]
    EmptyDataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    /// Rows already shaped like [`Task`].
    Native,
    /// `task_id`, `instruct_prompt`, `code_prompt`, `canonical_solution`, `test`.
    BigCodeBench,
    /// `question_id`, `question_content`, `solution`, `public_test_cases` (stdin/stdout).
    LiveCodeBench,
}

impl FromStr for SourceFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "native" => Ok(SourceFormat::Native),
            "bigcodebench" => Ok(SourceFormat::BigCodeBench),
            "livecodebench" => Ok(SourceFormat::LiveCodeBench),
            _ => Err(HarnessError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Deserialize)]
struct BigCodeBenchRow {
    task_id: String,
    instruct_prompt: String,
    #[serde(default)]
    code_prompt: String,
    canonical_solution: String,
    test: String,
}

#[derive(Debug, Deserialize)]
struct LiveCodeBenchRow {
    question_id: String,
    question_content: String,
    solution: String,
    public_test_cases: serde_json::Value,
}

#[derive(Debug, Deserialize)]
struct LiveCodeBenchCase {
    input: String,
    output: String,
}

fn from_bigcodebench(row: BigCodeBenchRow) -> Task {
    let mut code = row.code_prompt;
    if !code.is_empty() && !code.ends_with('\n') {
        code.push('\n');
    }
    code.push_str(&row.canonical_solution);
    Task {
        task_id: row.task_id,
        source: "bigcodebench".into(),
        description: row.instruct_prompt,
        gt_program: SourceProgram::from_text(&code),
        suite: UnitSuite::test_harness(row.test),
        suite_visible: true,
    }
}

fn from_livecodebench(row: LiveCodeBenchRow) -> Result<Task, String> {
    // Published dumps store the case list either inline or as a JSON string.
    let cases_value = match row.public_test_cases {
        serde_json::Value::String(s) => serde_json::from_str(&s).map_err(|e| format!("public_test_cases: {e}"))?,
        v => v,
    };
    let cases: Vec<LiveCodeBenchCase> =
        serde_json::from_value(cases_value).map_err(|e| format!("public_test_cases: {e}"))?;
    let suite = UnitSuite::stdin_stdout(
        cases.into_iter().map(|c| IoCase { stdin: c.input, expected_stdout: c.output }).collect(),
    );
    suite.validate().map_err(|e| e.to_string())?;
    Ok(Task {
        task_id: row.question_id,
        source: "livecodebench".into(),
        description: row.question_content,
        gt_program: SourceProgram::from_text(&row.solution),
        suite,
        suite_visible: true,
    })
}

#[derive(Debug, Default)]
pub struct IngestReport {
    pub tasks: Vec<Task>,
    /// (row number or task id, reason) for every row left out.
    pub rejected: Vec<(String, String)>,
}

/// Reads a source file, normalizes rows into tasks, and keeps only tasks
/// whose ground truth passes its own suite.
pub fn ingest(path: &Path, format: SourceFormat, sandbox: &Sandbox) -> Result<IngestReport, HarnessError> {
    let mut report = IngestReport::default();
    let rows: Vec<Result<Task, (String, String)>> = match format {
        SourceFormat::Native => read_jsonl_lenient::<Task>(path)?
            .into_iter()
            .map(|r| r.map_err(|e| (format!("line {}", e.line), e.message)))
            .collect(),
        SourceFormat::BigCodeBench => read_jsonl_lenient::<BigCodeBenchRow>(path)?
            .into_iter()
            .map(|r| r.map(from_bigcodebench).map_err(|e| (format!("line {}", e.line), e.message)))
            .collect(),
        SourceFormat::LiveCodeBench => read_jsonl_lenient::<LiveCodeBenchRow>(path)?
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.map_err(|e| (format!("line {}", e.line), e.message))
                    .and_then(|row| from_livecodebench(row).map_err(|m| (format!("line {}", i + 1), m)))
            })
            .collect(),
    };
    let mut seen = HashSet::new();
    for row in rows {
        let task = match row {
            Ok(t) => t,
            Err(rejection) => {
                log::warn!("ingest {}: {}", rejection.0, rejection.1);
                report.rejected.push(rejection);
                continue;
            }
        };
        let reason = if !seen.insert(task.task_id.clone()) {
            Some("duplicate task id".to_string())
        } else {
            match sandbox.run_tests_cached(&task.gt_program, &task.suite) {
                Ok(v) if v.passed() => None,
                Ok(v) => Some(format!("ground truth fails its suite ({:?}): {}", v.status, v.feedback)),
                Err(SandboxError::InvalidSuite(m)) => Some(format!("invalid suite: {m}")),
                Err(e) => return Err(e.into()),
            }
        };
        match reason {
            None => report.tasks.push(task),
            Some(reason) => {
                log::warn!("ingest {}: {reason}", task.task_id);
                report.rejected.push((task.task_id, reason));
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DebugMode {
    Single,
    Iterative,
    Agentic,
}

impl FromStr for DebugMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(DebugMode::Single),
            "iterative" => Ok(DebugMode::Iterative),
            "agentic" => Ok(DebugMode::Agentic),
            _ => Err(format!("unknown mode `{s}` (single, iterative, agentic)")),
        }
    }
}

impl fmt::Display for DebugMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DebugMode::Single => "single",
            DebugMode::Iterative => "iterative",
            DebugMode::Agentic => "agentic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebugAttempt {
    /// 1-based.
    pub attempt_index: usize,
    pub prompt_hash: String,
    pub response: String,
    /// `None` when no program could be extracted.
    pub program: Option<SourceProgram>,
    pub verdict: Option<Verdict>,
    /// Feedback that went into this attempt's prompt, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub kind: MatchKind,
    pub pred_start: usize,
    pub pred_end: usize,
    pub pred_edits: usize,
    pub gt_indices: Vec<usize>,
    pub success: bool,
    pub essential_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tester_hash: Option<String>,
}

pub fn summarize_matches(matchset: &MatchSet) -> Vec<MatchSummary> {
    matchset
        .records
        .iter()
        .map(|r| MatchSummary {
            kind: r.kind,
            pred_start: r.pred_block.start,
            pred_end: r.pred_block.end,
            pred_edits: r.pred_block.edits.len(),
            gt_indices: r.gt_indices.clone(),
            success: r.success == Some(true),
            essential_size: r.essential_size,
            tester_hash: r.tester.as_ref().map(|t| t.content_hash().to_string()),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub bug_id: String,
    pub task_id: String,
    pub system: String,
    pub mode: DebugMode,
    pub prompt: PromptStyle,
    pub attempts: Vec<DebugAttempt>,
    pub score: ExampleScore,
    pub matches: Vec<MatchSummary>,
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
    #[serde(default)]
    pub blocks: Vec<BlockLabel>,
}

impl EvalRecord {
    pub fn labeled(&self) -> LabeledScore {
        LabeledScore { score: self.score.clone(), tags: self.tags.clone(), blocks: self.blocks.clone() }
    }

    pub fn final_program(&self) -> Option<&SourceProgram> {
        self.attempts.last().and_then(|a| a.program.as_ref())
    }
}

/// What a debugger sees for one attempt.
pub struct DebugRequest<'a> {
    pub task: &'a Task,
    pub variant: &'a BuggyVariant,
    pub attempt_index: usize,
    pub prompt: &'a str,
    pub history: &'a [DebugAttempt],
}

pub trait Debugger: Send + Sync {
    fn id(&self) -> String;
    fn respond(&self, request: &DebugRequest<'_>) -> Result<String, ProviderError>;
}

pub fn fenced(program: &SourceProgram) -> String {
    format!("```python\n{}\n```\n", program.lines().join("\n"))
}

/// Emits the ground truth.
pub struct Oracle;

/// Echoes the buggy program.
pub struct Noop;

/// Emits the ground truth with every line it shares with the buggy program
/// carrying an inert trailing comment.
pub struct Regenerator;

/// Applies the exact fixes of the first `j` bug blocks.
pub struct PartialFixer(pub usize);

fn err(e: EditError) -> ProviderError {
    ProviderError::ProviderRefusal(format!("mock could not build its answer: {e}"))
}

impl Debugger for Oracle {
    fn id(&self) -> String {
        "mock:oracle".into()
    }

    fn respond(&self, request: &DebugRequest<'_>) -> Result<String, ProviderError> {
        Ok(fenced(&request.variant.fixed_program().map_err(err)?))
    }
}

impl Debugger for Noop {
    fn id(&self) -> String {
        "mock:noop".into()
    }

    fn respond(&self, request: &DebugRequest<'_>) -> Result<String, ProviderError> {
        Ok(fenced(&request.variant.buggy_program))
    }
}

pub const REGENERATOR_MARK: &str = "# revised";

/// Ground truth with an inert comment on every line, so the rewrite shares
/// no line with the buggy program except backslash continuations.
pub fn regenerate(variant: &BuggyVariant) -> Result<SourceProgram, EditError> {
    let gt = variant.fixed_program()?;
    Ok(SourceProgram::from_lines(gt.lines().iter().map(|line| {
        if line.trim_end().ends_with('\\') {
            line.clone()
        } else if line.trim().is_empty() {
            REGENERATOR_MARK.to_string()
        } else {
            format!("{line}  {REGENERATOR_MARK}")
        }
    })))
}

impl Debugger for Regenerator {
    fn id(&self) -> String {
        "mock:regenerator".into()
    }

    fn respond(&self, request: &DebugRequest<'_>) -> Result<String, ProviderError> {
        Ok(fenced(&regenerate(request.variant).map_err(err)?))
    }
}

pub fn partial_fix(variant: &BuggyVariant, j: usize) -> Result<SourceProgram, EditError> {
    let blocks = variant.fix_blocks()?;
    let script = merge_blocks(variant.buggy_program.content_hash(), &blocks[..j.min(blocks.len())])?;
    apply_edits(&variant.buggy_program, &script)
}

impl Debugger for PartialFixer {
    fn id(&self) -> String {
        format!("mock:partial_fixer({})", self.0)
    }

    fn respond(&self, request: &DebugRequest<'_>) -> Result<String, ProviderError> {
        Ok(fenced(&partial_fix(request.variant, self.0).map_err(err)?))
    }
}

/// Parses `oracle`, `noop`, `regenerator`, or `partial_fixer(j)`.
pub fn mock_debugger(name: &str) -> Option<Box<dyn Debugger>> {
    match name {
        "oracle" => Some(Box::new(Oracle)),
        "noop" => Some(Box::new(Noop)),
        "regenerator" => Some(Box::new(Regenerator)),
        _ => {
            let j = name.strip_prefix("partial_fixer(")?.strip_suffix(')')?.parse().ok()?;
            Some(Box::new(PartialFixer(j)))
        }
    }
}

/// A debugger that asks a completion provider.
pub struct ModelDebugger<P> {
    pub client: RetryingClient<P>,
    pub model: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl<P: CompletionProvider> ModelDebugger<P> {
    pub fn new(client: RetryingClient<P>, model: impl Into<String>) -> Self {
        ModelDebugger { client, model: model.into(), temperature: 1.0, max_output_tokens: 8_000 }
    }
}

impl<P: CompletionProvider> Debugger for ModelDebugger<P> {
    fn id(&self) -> String {
        format!("provider:{}", self.model)
    }

    fn respond(&self, request: &DebugRequest<'_>) -> Result<String, ProviderError> {
        let mut req = CompletionRequest::new(&self.model, request.prompt);
        req.temperature = self.temperature;
        req.max_output_tokens = self.max_output_tokens;
        Ok(self.client.complete(&req)?.text)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalConfig {
    pub mode: DebugMode,
    pub prompt: PromptStyle,
    pub max_attempts: usize,
    pub epsilon: usize,
    pub stride: usize,
}

impl EvalConfig {
    pub fn new(mode: DebugMode, prompt: PromptStyle, epsilon: usize, stride: usize) -> Self {
        EvalConfig { mode, prompt, max_attempts: 3, epsilon, stride }
    }

    fn attempts(&self) -> usize {
        match self.mode {
            DebugMode::Single => 1,
            _ => self.max_attempts.max(1),
        }
    }
}

fn retry_feedback(mode: DebugMode, previous: &DebugAttempt) -> String {
    let mut out = match &previous.program {
        Some(p) => format!("```python\n{}\n```\n", p.lines().join("\n")),
        None => "(no program could be read from that reply)\n".to_string(),
    };
    if mode == DebugMode::Agentic {
        if let Some(v) = &previous.verdict {
            out.push_str(&format!("\nTest run result: {:?}\n{}\n", v.status, v.feedback));
        }
    }
    out
}

fn build_prompt(task: &Task, variant: &BuggyVariant, cfg: &EvalConfig, feedback: Option<&str>) -> String {
    let tests = cfg.mode == DebugMode::Agentic;
    let mut bindings = BTreeMap::from([
        ("description", task.description.clone()),
        ("buggy_code", variant.buggy_program.lines().join("\n")),
    ]);
    if tests {
        bindings.insert("unit_tests", task.suite.display_text().trim_end().to_string());
    }
    if let Some(f) = feedback {
        bindings.insert("feedback", f.trim_end().to_string());
    }
    render_prompt(debug_template(cfg.prompt, tests, feedback.is_some()), &bindings)
        .expect("debug templates bind exactly these fields")
}

fn labels(task: &Task, variant: &BuggyVariant) -> (BTreeMap<String, String>, Vec<BlockLabel>) {
    let mut tags = BTreeMap::from([("source".to_string(), task.source.clone())]);
    if let Some(p) = variant.independence {
        tags.insert("independence".into(), format!("{p:?}").to_lowercase());
    }
    let blocks = variant
        .blocks
        .iter()
        .map(|b| BlockLabel { category: b.category.name().to_string(), generator: b.generator.clone() })
        .collect();
    (tags, blocks)
}

/// Scores the last attempt; an attempt without a program scores as no edit.
fn final_score(
    task: &Task,
    variant: &BuggyVariant,
    attempts: &[DebugAttempt],
    epsilon: usize,
    stride: usize,
    sandbox: &Sandbox,
) -> Result<(ExampleScore, Vec<MatchSummary>), HarnessError> {
    let gt = variant.fix_script()?;
    match attempts.last().and_then(|a| a.program.as_ref()) {
        Some(program) => {
            let (score, matchset) =
                score_example(&variant.buggy_program, &gt, program, &task.suite, epsilon, stride, sandbox)?;
            Ok((score, summarize_matches(&matchset)))
        }
        None => Ok((ExampleScore::no_edit(variant.fix_blocks()?.len(), epsilon), Vec::new())),
    }
}

/// Runs one example under the configured protocol.
pub fn debug_example(
    debugger: &dyn Debugger,
    task: &Task,
    variant: &BuggyVariant,
    cfg: &EvalConfig,
    sandbox: &Sandbox,
) -> Result<EvalRecord, HarnessError> {
    if cfg.mode == DebugMode::Agentic && !task.suite_visible {
        return Err(HarnessError::SuiteUnavailable(task.task_id.clone()));
    }
    let mut attempts: Vec<DebugAttempt> = Vec::new();
    for attempt_index in 1..=cfg.attempts() {
        let feedback = attempts.last().map(|prev| retry_feedback(cfg.mode, prev));
        let prompt = build_prompt(task, variant, cfg, feedback.as_deref());
        let request = DebugRequest { task, variant, attempt_index, prompt: &prompt, history: &attempts };
        let response = match debugger.respond(&request) {
            Ok(r) => r,
            Err(ProviderError::ProviderRefusal(m)) => {
                log::warn!("{}: attempt {attempt_index} refused: {m}", variant.bug_id);
                String::new()
            }
            Err(e) => return Err(e.into()),
        };
        let program = extract_program(&response).ok();
        let verdict = match &program {
            Some(p) => Some(sandbox.run_tests_cached(p, &task.suite)?),
            None => None,
        };
        let passed = verdict.as_ref().is_some_and(Verdict::passed);
        attempts.push(DebugAttempt {
            attempt_index,
            prompt_hash: short_hash(prompt.as_bytes()),
            response,
            program,
            verdict,
            feedback,
        });
        if passed {
            break;
        }
    }
    let (score, matches) = final_score(task, variant, &attempts, cfg.epsilon, cfg.stride, sandbox)?;
    let (tags, blocks) = labels(task, variant);
    Ok(EvalRecord {
        bug_id: variant.bug_id.clone(),
        task_id: task.task_id.clone(),
        system: debugger.id(),
        mode: cfg.mode,
        prompt: cfg.prompt,
        attempts,
        score,
        matches,
        tags,
        blocks,
    })
}

#[derive(Debug)]
pub struct BenchmarkOutcome {
    /// In dataset order.
    pub records: Vec<EvalRecord>,
    /// Bug ids skipped because their task hides its suite.
    pub skipped: Vec<String>,
    pub report: Option<Report>,
}

fn load_checkpoint(path: &Path, system: &str, cfg: &EvalConfig) -> Result<HashMap<String, EvalRecord>, HarnessError> {
    if !path.exists() {
        return Ok(HashMap::new());
    }
    let mut done = HashMap::new();
    for row in read_jsonl_lenient::<EvalRecord>(path)? {
        match row {
            Ok(r)
                if r.system == system
                    && r.mode == cfg.mode
                    && r.prompt == cfg.prompt
                    && r.score.epsilon == cfg.epsilon =>
            {
                done.insert(r.bug_id.clone(), r);
            }
            Ok(r) => log::warn!("checkpoint record {} is from a different run; ignoring", r.bug_id),
            // A run killed mid-write leaves a torn last line.
            Err(e) => log::warn!("checkpoint line {}: {}", e.line, e.message),
        }
    }
    Ok(done)
}

/// Evaluates every variant, appending each finished record to `checkpoint`
/// (if given) and skipping variants already recorded there.
pub fn run_benchmark(
    variants: &[BuggyVariant],
    tasks: &[Task],
    debugger: &dyn Debugger,
    cfg: &EvalConfig,
    sandbox: &Sandbox,
    checkpoint: Option<&Path>,
    workers: usize,
) -> Result<BenchmarkOutcome, HarnessError> {
    if variants.is_empty() {
        return Err(HarnessError::EmptyDataset);
    }
    let index = task_index(tasks);
    let system = debugger.id();
    let mut done = match checkpoint {
        Some(p) => load_checkpoint(p, &system, cfg)?,
        None => HashMap::new(),
    };
    let writer = match checkpoint {
        Some(p) => Some(Mutex::new(OpenOptions::new().create(true).append(true).open(p)?)),
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;

    let todo: Vec<&BuggyVariant> = variants.iter().filter(|v| !done.contains_key(&v.bug_id)).collect();
    let results: Vec<Result<Option<EvalRecord>, HarnessError>> = pool.install(|| {
        todo.par_iter()
            .map(|v| {
                let task = index.get(v.task_id.as_str()).ok_or_else(|| HarnessError::UnknownTask {
                    bug_id: v.bug_id.clone(),
                    task_id: v.task_id.clone(),
                })?;
                let record = match debug_example(debugger, task, v, cfg, sandbox) {
                    Ok(r) => r,
                    Err(HarnessError::SuiteUnavailable(_)) => return Ok(None),
                    Err(e) => return Err(e),
                };
                if let Some(w) = &writer {
                    let line = serde_json::to_string(&record).expect("records serialize");
                    let mut file = w.lock().unwrap_or_else(|e| e.into_inner());
                    writeln!(file, "{line}")?;
                    file.flush()?;
                }
                Ok(Some(record))
            })
            .collect()
    });

    let mut skipped = Vec::new();
    for (v, result) in todo.iter().zip(results) {
        match result? {
            Some(r) => {
                done.insert(v.bug_id.clone(), r);
            }
            None => skipped.push(v.bug_id.clone()),
        }
    }
    if !skipped.is_empty() {
        log::info!("skipped {} examples whose suites are hidden", skipped.len());
    }
    let records: Vec<EvalRecord> = variants.iter().filter_map(|v| done.remove(&v.bug_id)).collect();
    let labeled: Vec<LabeledScore> = records.iter().map(EvalRecord::labeled).collect();
    let report = aggregate(&labeled).ok();
    Ok(BenchmarkOutcome { records, skipped, report })
}

/// Recomputes scores from stored responses, e.g. under a different ε.
pub fn rescore(
    records: &[EvalRecord],
    variants: &[BuggyVariant],
    tasks: &[Task],
    epsilon: usize,
    stride: usize,
    sandbox: &Sandbox,
) -> Result<Vec<EvalRecord>, HarnessError> {
    let index = task_index(tasks);
    let by_id: HashMap<&str, &BuggyVariant> = variants.iter().map(|v| (v.bug_id.as_str(), v)).collect();
    records
        .iter()
        .map(|r| {
            let missing = || HarnessError::UnknownTask { bug_id: r.bug_id.clone(), task_id: r.task_id.clone() };
            let variant = by_id.get(r.bug_id.as_str()).ok_or_else(missing)?;
            let task = index.get(variant.task_id.as_str()).ok_or_else(missing)?;
            let (score, matches) = final_score(task, variant, &r.attempts, epsilon, stride, sandbox)?;
            Ok(EvalRecord { score, matches, ..r.clone() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mock_names_parse() {
        for name in ["oracle", "noop", "regenerator", "partial_fixer(2)"] {
            assert_eq!(mock_debugger(name).unwrap().id(), format!("mock:{name}"));
        }
        assert!(mock_debugger("partial_fixer(x)").is_none());
        assert!(mock_debugger("genius").is_none());
    }

    #[test]
    fn fenced_round_trips_through_extraction() {
        for text in ["x = 1\n", "def f():\n    return 2\n\n", "a\n\n\nb\n"] {
            let p = SourceProgram::from_text(text);
            assert_eq!(extract_program(&fenced(&p)).unwrap(), p);
        }
    }

    #[test]
    fn source_format_names() {
        assert_eq!("BigCodeBench".parse::<SourceFormat>().unwrap(), SourceFormat::BigCodeBench);
        assert!("csv".parse::<SourceFormat>().is_err());
    }
}
