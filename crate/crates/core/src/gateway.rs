// SPDX-License-Identifier: Apache-2.0

//! Prompt templates, completion providers, and code extraction from replies.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Condvar, Mutex, OnceLock};
use std::time::Duration;

use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Task;
use crate::edit::compute_diff;
use crate::exec::{Sandbox, SandboxError};
use crate::program::{short_hash, SourceProgram};
use crate::synthesis::{BugGenerator, BugSpec, SynthError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("placeholder {{{0}}} has no binding")]
    UnboundPlaceholder(String),
    #[error("binding `{0}` matches no placeholder")]
    UnusedBinding(String),
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("cannot read template {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TemplateName {
    BugInject,
    MinimalDebug,
    MinimalDebugTests,
    MinimalDebugFeedback,
    MinimalDebugTestsFeedback,
    FreeDebug,
    FreeDebugTests,
    FreeDebugFeedback,
    FreeDebugTestsFeedback,
    RewriteSolution,
    ExternalApiMinimal,
    ExternalApiFree,
}

macro_rules! templates {
    ($($variant:ident => $file:literal),* $(,)?) => {
        impl TemplateName {
            pub const ALL: &'static [TemplateName] = &[$(TemplateName::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(TemplateName::$variant => $file,)*
                }
            }

            fn builtin_body(self) -> &'static str {
                match self {
                    $(TemplateName::$variant => include_str!(concat!("../templates/", $file, ".txt")),)*
                }
            }
        }
    };
}

templates! {
    BugInject => "bug_inject",
    MinimalDebug => "minimal_debug",
    MinimalDebugTests => "minimal_debug+tests",
    MinimalDebugFeedback => "minimal_debug+feedback",
    MinimalDebugTestsFeedback => "minimal_debug+tests+feedback",
    FreeDebug => "free_debug",
    FreeDebugTests => "free_debug+tests",
    FreeDebugFeedback => "free_debug+feedback",
    FreeDebugTestsFeedback => "free_debug+tests+feedback",
    RewriteSolution => "rewrite_solution",
    ExternalApiMinimal => "external_api_minimal",
    ExternalApiFree => "external_api_free",
}

impl fmt::Display for TemplateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateName {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateName::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| TemplateError::UnknownTemplate(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromptStyle {
    Minimal,
    Freeform,
}

/// The debugging template for a style and the extras it shows.
pub fn debug_template(style: PromptStyle, tests: bool, feedback: bool) -> TemplateName {
    use TemplateName::*;
    match (style, tests, feedback) {
        (PromptStyle::Minimal, false, false) => MinimalDebug,
        (PromptStyle::Minimal, true, false) => MinimalDebugTests,
        (PromptStyle::Minimal, false, true) => MinimalDebugFeedback,
        (PromptStyle::Minimal, true, true) => MinimalDebugTestsFeedback,
        (PromptStyle::Freeform, false, false) => FreeDebug,
        (PromptStyle::Freeform, true, false) => FreeDebugTests,
        (PromptStyle::Freeform, false, true) => FreeDebugFeedback,
        (PromptStyle::Freeform, true, true) => FreeDebugTestsFeedback,
    }
}

fn placeholder_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\{([a-z_]+)\}").expect("static pattern"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub name: String,
    pub body: String,
}

impl PromptTemplate {
    pub fn builtin(name: TemplateName) -> Self {
        PromptTemplate { name: name.as_str().to_string(), body: name.builtin_body().to_string() }
    }

    /// Loads `<dir>/<name>.txt`, for overriding the bundled wording.
    pub fn load(dir: &Path, name: TemplateName) -> Result<Self, TemplateError> {
        let path = dir.join(format!("{}.txt", name.as_str()));
        let body = std::fs::read_to_string(&path)
            .map_err(|e| TemplateError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Ok(PromptTemplate { name: name.as_str().to_string(), body })
    }

    pub fn placeholders(&self) -> BTreeSet<&str> {
        placeholder_re().captures_iter(&self.body).map(|c| c.get(1).unwrap().as_str()).collect()
    }

    /// Substitutes every `{name}` in one pass; bound values are not rescanned.
    pub fn render(&self, bindings: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
        let wanted = self.placeholders();
        if let Some(missing) = wanted.iter().find(|p| !bindings.contains_key(*p)) {
            return Err(TemplateError::UnboundPlaceholder(missing.to_string()));
        }
        if let Some(extra) = bindings.keys().find(|k| !wanted.contains(*k)) {
            return Err(TemplateError::UnusedBinding(extra.to_string()));
        }
        Ok(placeholder_re().replace_all(&self.body, |c: &regex::Captures| bindings[&c[1]].clone()).into_owned())
    }
}

pub fn render_prompt(name: TemplateName, bindings: &BTreeMap<&str, String>) -> Result<String, TemplateError> {
    PromptTemplate::builtin(name).render(bindings)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub system: Option<String>,
    pub user: String,
    pub max_output_tokens: u32,
    pub temperature: f64,
    pub timeout: Duration,
}

pub const DEFAULT_MAX_TOKENS: u32 = 8_000;
pub const THINKING_MAX_TOKENS: u32 = 32_000;

impl CompletionRequest {
    pub fn new(model: impl Into<String>, user: impl Into<String>) -> Self {
        CompletionRequest {
            model: model.into(),
            system: None,
            user: user.into(),
            max_output_tokens: DEFAULT_MAX_TOKENS,
            temperature: 1.0,
            timeout: Duration::from_secs(600),
        }
    }

    /// Raises the output budget for models that emit reasoning tokens.
    pub fn thinking(mut self) -> Self {
        self.max_output_tokens = THINKING_MAX_TOKENS;
        self
    }

    fn audit_hash(&self) -> String {
        short_hash(serde_json::to_string(self).expect("request serializes").as_bytes())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ProviderError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("rate limited: {0}")]
    RateLimited(String),
    #[error("provider refused: {0}")]
    ProviderRefusal(String),
}

impl ProviderError {
    pub fn is_transient(&self) -> bool {
        !matches!(self, ProviderError::ProviderRefusal(_))
    }
}

pub trait CompletionProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError>;
}

impl<P: CompletionProvider + ?Sized> CompletionProvider for Box<P> {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        (**self).complete(request)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub retry_count: u32,
}

struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

impl Slots {
    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        SlotGuard(self)
    }
}

struct SlotGuard<'a>(&'a Slots);

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

/// Bounded-concurrency client that retries transient failures with
/// exponential backoff and logs request/response hashes.
pub struct RetryingClient<P> {
    provider: P,
    pub max_retries: u32,
    pub base_delay: Duration,
    slots: Slots,
}

impl<P: CompletionProvider> RetryingClient<P> {
    pub fn new(provider: P) -> Self {
        RetryingClient {
            provider,
            max_retries: 3,
            base_delay: Duration::from_secs(1),
            slots: Slots { free: Mutex::new(8), cv: Condvar::new() },
        }
    }

    pub fn with_retries(mut self, max_retries: u32, base_delay: Duration) -> Self {
        self.max_retries = max_retries;
        self.base_delay = base_delay;
        self
    }

    pub fn with_concurrency(mut self, in_flight: usize) -> Self {
        self.slots = Slots { free: Mutex::new(in_flight.max(1)), cv: Condvar::new() };
        self
    }

    pub fn provider(&self) -> &P {
        &self.provider
    }

    pub fn complete(&self, request: &CompletionRequest) -> Result<Completion, ProviderError> {
        let _slot = self.slots.acquire();
        let req_hash = request.audit_hash();
        let mut retry_count = 0;
        loop {
            match self.provider.complete(request) {
                Ok(text) => {
                    log::info!(
                        "completion model={} request={req_hash} response={} retries={retry_count}",
                        request.model,
                        short_hash(text.as_bytes())
                    );
                    return Ok(Completion { text, retry_count });
                }
                Err(e) if e.is_transient() && retry_count < self.max_retries => {
                    let delay = self.base_delay.saturating_mul(1 << retry_count.min(16));
                    log::warn!("completion request={req_hash} attempt {} failed: {e}; retrying", retry_count + 1);
                    std::thread::sleep(delay);
                    retry_count += 1;
                }
                Err(e) => {
                    log::error!("completion request={req_hash} failed after {retry_count} retries: {e}");
                    return Err(e);
                }
            }
        }
    }
}

/// An OpenAI-compatible chat-completions endpoint.
pub struct HttpProvider {
    pub url: String,
    key: Option<String>,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(url: impl Into<String>, key: Option<String>) -> Self {
        HttpProvider { url: url.into(), key, agent: ureq::AgentBuilder::new().build() }
    }

    /// Reads `PDB_PROVIDER_URL` and optional `PDB_PROVIDER_KEY`.
    pub fn from_env() -> Result<Self, ProviderError> {
        let url = std::env::var("PDB_PROVIDER_URL")
            .map_err(|_| ProviderError::Transport("PDB_PROVIDER_URL is not set".into()))?;
        Ok(Self::new(url, std::env::var("PDB_PROVIDER_KEY").ok()))
    }
}

/// Model id from `PDB_PROVIDER_MODEL`, if set.
pub fn env_model() -> Option<String> {
    std::env::var("PDB_PROVIDER_MODEL").ok().filter(|m| !m.is_empty())
}

impl CompletionProvider for HttpProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let mut messages = Vec::new();
        if let Some(system) = &request.system {
            messages.push(serde_json::json!({"role": "system", "content": system}));
        }
        messages.push(serde_json::json!({"role": "user", "content": request.user}));
        let body = serde_json::json!({
            "model": request.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        });
        let mut call = self.agent.post(&self.url).timeout(request.timeout);
        if let Some(key) = &self.key {
            call = call.set("Authorization", &format!("Bearer {key}"));
        }
        let response = match call.send_json(body) {
            Ok(r) => r,
            Err(ureq::Error::Status(429, r)) => {
                return Err(ProviderError::RateLimited(r.into_string().unwrap_or_default()))
            }
            Err(ureq::Error::Status(code, r)) if (400..500).contains(&code) => {
                return Err(ProviderError::ProviderRefusal(format!(
                    "HTTP {code}: {}",
                    r.into_string().unwrap_or_default()
                )))
            }
            Err(e) => return Err(ProviderError::Transport(e.to_string())),
        };
        let value: serde_json::Value = response.into_json().map_err(|e| ProviderError::Transport(e.to_string()))?;
        let choice = &value["choices"][0];
        if choice["finish_reason"] == "content_filter" {
            return Err(ProviderError::ProviderRefusal("content filter".into()));
        }
        choice["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ProviderError::Transport(format!("malformed response: {value}")))
    }
}

/// Replays canned outcomes in order and records every request it receives.
#[derive(Default)]
pub struct ScriptedProvider {
    script: Mutex<VecDeque<Result<String, ProviderError>>>,
    seen: Mutex<Vec<CompletionRequest>>,
}

impl ScriptedProvider {
    pub fn new(script: impl IntoIterator<Item = Result<String, ProviderError>>) -> Self {
        ScriptedProvider { script: Mutex::new(script.into_iter().collect()), seen: Mutex::default() }
    }

    pub fn requests(&self) -> Vec<CompletionRequest> {
        self.seen.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

impl CompletionProvider for ScriptedProvider {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        self.seen.lock().unwrap_or_else(|e| e.into_inner()).push(request.clone());
        self.script
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .pop_front()
            .unwrap_or_else(|| Err(ProviderError::Transport("script exhausted".into())))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("no program found in response")]
pub struct ExtractionFailure;

fn is_fence(line: &str) -> bool {
    line.trim_start().starts_with("```")
}

const CODE_STARTS: &[&str] = &[
    "def ",
    "class ",
    "return",
    "if ",
    "elif ",
    "else:",
    "for ",
    "while ",
    "import ",
    "from ",
    "try:",
    "except",
    "finally:",
    "with ",
    "raise",
    "pass",
    "break",
    "continue",
    "assert ",
    "yield",
    "async ",
    "await ",
    "global ",
    "nonlocal ",
    "del ",
    "print(",
    "@",
    "#",
];

fn is_code_like(line: &str) -> bool {
    static ASSIGN: OnceLock<Regex> = OnceLock::new();
    static CALL: OnceLock<Regex> = OnceLock::new();
    let t = line.trim_end();
    if t.starts_with(' ') || t.starts_with('\t') {
        return true;
    }
    if CODE_STARTS.iter().any(|p| t.starts_with(p)) {
        return true;
    }
    let assign = ASSIGN.get_or_init(|| {
        Regex::new(r"^[A-Za-z_][\w.]*(\[[^\]]*\])?(\s*,\s*[A-Za-z_]\w*)*\s*([-+*/%]|//)?=[^=]").expect("static")
    });
    let call = CALL.get_or_init(|| Regex::new(r"^[A-Za-z_][\w.]*\(.*\)$").expect("static"));
    assign.is_match(t) || call.is_match(t)
}

/// Cheap well-formedness probe: brackets balance outside string literals.
fn brackets_balance(lines: &[&str]) -> bool {
    let mut stack = Vec::new();
    for line in lines {
        let mut quote: Option<char> = None;
        for c in line.chars() {
            match (quote, c) {
                (Some(q), c) if c == q => quote = None,
                (Some(_), _) => {}
                (None, '#') => break,
                (None, '\'' | '"') => quote = Some(c),
                (None, '(' | '[' | '{') => stack.push(c),
                (None, ')' | ']' | '}') => {
                    let open = match c {
                        ')' => '(',
                        ']' => '[',
                        _ => '{',
                    };
                    if stack.pop() != Some(open) {
                        return false;
                    }
                }
                _ => {}
            }
        }
    }
    stack.is_empty()
}

/// The last fenced code block; without fences, the longest run of code-like lines.
pub fn extract_program(response: &str) -> Result<SourceProgram, ExtractionFailure> {
    let lines: Vec<&str> = response.lines().collect();
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<usize> = None;
    for (i, line) in lines.iter().enumerate() {
        if is_fence(line) {
            match open.take() {
                Some(start) => blocks.push((start, i)),
                None => open = Some(i + 1),
            }
        }
    }
    if let Some(start) = open {
        blocks.push((start, lines.len()));
    }
    if let Some(&(s, e)) = blocks.iter().rev().find(|(s, e)| lines[*s..*e].iter().any(|l| !l.trim().is_empty())) {
        return Ok(SourceProgram::from_lines(lines[s..e].iter().copied()));
    }
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < lines.len() {
        if !is_code_like(lines[i]) {
            i += 1;
            continue;
        }
        let start = i;
        let mut end = i + 1;
        let mut j = i + 1;
        while j < lines.len() && (lines[j].trim().is_empty() || is_code_like(lines[j])) {
            if !lines[j].trim().is_empty() {
                end = j + 1;
            }
            j += 1;
        }
        if brackets_balance(&lines[start..end]) && best.is_none_or(|(s, e)| end - start >= e - s) {
            best = Some((start, end));
        }
        i = j.max(end);
    }
    best.map(|(s, e)| SourceProgram::from_lines(lines[s..e].iter().copied())).ok_or(ExtractionFailure)
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("no acceptable rewrite after {0} attempts")]
    Exhausted(usize),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
}

/// Asks a model to restate the ground truth; keeps the first candidate that
/// passes the suite and differs textually from the original.
pub fn rewrite_ground_truth<P: CompletionProvider>(
    task: &Task,
    client: &RetryingClient<P>,
    model: &str,
    sandbox: &Sandbox,
    max_tries: usize,
) -> Result<Task, RewriteError> {
    let prompt = render_prompt(
        TemplateName::RewriteSolution,
        &BTreeMap::from([("description", task.description.clone()), ("code", task.gt_program.to_text())]),
    )
    .expect("bundled template binds description and code");
    for attempt in 1..=max_tries {
        let reply = client.complete(&CompletionRequest::new(model, prompt.clone()))?;
        let candidate = match extract_program(&reply.text) {
            Ok(p) => p,
            Err(_) => {
                log::info!("{}: rewrite attempt {attempt} had no program", task.task_id);
                continue;
            }
        };
        if compute_diff(&task.gt_program, &candidate).is_empty() {
            log::info!("{}: rewrite attempt {attempt} is identical", task.task_id);
            continue;
        }
        if !sandbox.passes(&candidate, &task.suite)? {
            log::info!("{}: rewrite attempt {attempt} fails the suite", task.task_id);
            continue;
        }
        return Ok(Task { gt_program: candidate, ..task.clone() });
    }
    Err(RewriteError::Exhausted(max_tries))
}

/// Bug generator backed by a completion provider.
pub struct ModelBugGenerator<P> {
    pub client: RetryingClient<P>,
    pub model: String,
    name: String,
}

impl<P: CompletionProvider> ModelBugGenerator<P> {
    pub fn new(client: RetryingClient<P>, model: impl Into<String>) -> Self {
        let model = model.into();
        ModelBugGenerator { client, name: format!("model:{model}"), model }
    }

    pub fn prompt(task: &Task, spec: &BugSpec) -> String {
        let listed: Vec<String> = spec
            .candidate_lines
            .iter()
            .map(|&l| format!("line {l}: `{}`", task.gt_program.line(l).unwrap_or("").trim()))
            .collect();
        let lines = if spec.block_size > 1 {
            let aux: Vec<&str> = spec.auxiliary.iter().map(|c| c.name()).collect();
            format!(
                "rewrite these {} consecutive lines together so that every one of them changes ({}); secondary categories to draw on: {}",
                spec.block_size,
                listed.join("; "),
                aux.join(", ")
            )
        } else {
            format!("apply a {} to exactly one of: {}", spec.operation, listed.join("; "))
        };
        let description = crate::taxonomy::find(spec.category, &spec.subcategory).map_or("", |s| s.description);
        render_prompt(
            TemplateName::BugInject,
            &BTreeMap::from([
                ("description", task.description.clone()),
                ("code", task.gt_program.to_text()),
                ("category", spec.category.name().to_string()),
                ("subcategory", format!("{} ({description})", spec.subcategory)),
                ("lines", lines),
            ]),
        )
        .expect("bundled template binds all fields")
    }
}

impl<P: CompletionProvider> BugGenerator for ModelBugGenerator<P> {
    fn name(&self) -> &str {
        &self.name
    }

    fn deterministic(&self) -> bool {
        false
    }

    fn generate(&self, task: &Task, spec: &BugSpec, _rng: &mut ChaCha8Rng) -> Result<SourceProgram, SynthError> {
        let reply = self
            .client
            .complete(&CompletionRequest::new(&self.model, Self::prompt(task, spec)))
            .map_err(|e| SynthError::GeneratorFault(e.to_string()))?;
        extract_program(&reply.text).map_err(|e| SynthError::GeneratorFault(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(pairs: &[(&'static str, &str)]) -> BTreeMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn every_template_parses_and_names_round_trip() {
        for &t in TemplateName::ALL {
            assert_eq!(t.as_str().parse::<TemplateName>().unwrap(), t);
            assert!(!PromptTemplate::builtin(t).placeholders().is_empty(), "{t}");
        }
        let p = PromptTemplate::builtin(TemplateName::MinimalDebugTestsFeedback);
        assert_eq!(p.placeholders(), BTreeSet::from(["buggy_code", "description", "feedback", "unit_tests"]));
    }

    #[test]
    fn render_binds_exactly() {
        let text = render_prompt(TemplateName::MinimalDebug, &b(&[("description", "Add."), ("buggy_code", "d = {x}")]))
            .unwrap();
        assert!(text.contains("Add.") && text.contains("d = {x}") && !text.contains("{buggy_code}"));
        assert_eq!(
            render_prompt(TemplateName::MinimalDebug, &b(&[("description", "Add.")])),
            Err(TemplateError::UnboundPlaceholder("buggy_code".into()))
        );
        assert_eq!(
            render_prompt(
                TemplateName::MinimalDebug,
                &b(&[("description", "d"), ("buggy_code", "c"), ("unit_tests", "t")])
            ),
            Err(TemplateError::UnusedBinding("unit_tests".into()))
        );
    }

    #[test]
    fn extraction_rules() {
        assert_eq!(extract_program("```python\nx = 1\n```").unwrap().lines(), ["x = 1"]);
        let two = "First:\n```\na = 1\n```\nThen the final version:\n```python\na = 2\nprint(a)\n```\nDone.";
        assert_eq!(extract_program(two).unwrap().lines(), ["a = 2", "print(a)"]);
        assert_eq!(extract_program("I could not find any bug here. Sorry!"), Err(ExtractionFailure));
        let bare = "Here is the fix.\n\ndef f(x):\n    return x + 1\n\nprint(f(2))\nHope it helps.";
        assert_eq!(extract_program(bare).unwrap().lines(), ["def f(x):", "    return x + 1", "", "print(f(2))"]);
        assert_eq!(extract_program("text\n```python\ny = 3\n").unwrap().lines(), ["y = 3"]);
    }

    #[test]
    fn retries_then_succeeds() {
        let provider = ScriptedProvider::new([
            Err(ProviderError::Transport("reset".into())),
            Err(ProviderError::RateLimited("slow down".into())),
            Ok("done".into()),
        ]);
        let client = RetryingClient::new(provider).with_retries(3, Duration::ZERO);
        let out = client.complete(&CompletionRequest::new("m", "hi")).unwrap();
        assert_eq!(out, Completion { text: "done".into(), retry_count: 2 });
    }

    #[test]
    fn persistent_failure_and_refusal() {
        let failing = ScriptedProvider::new((0..5).map(|_| Err(ProviderError::Transport("down".into()))));
        let client = RetryingClient::new(failing).with_retries(3, Duration::ZERO);
        assert!(matches!(client.complete(&CompletionRequest::new("m", "hi")), Err(ProviderError::Transport(_))));
        assert_eq!(client.provider().requests().len(), 4);

        let refusing = ScriptedProvider::new([Err(ProviderError::ProviderRefusal("no".into())), Ok("late".into())]);
        let client = RetryingClient::new(refusing).with_retries(3, Duration::ZERO);
        assert!(matches!(client.complete(&CompletionRequest::new("m", "hi")), Err(ProviderError::ProviderRefusal(_))));
        assert_eq!(client.provider().requests().len(), 1);
    }

    #[test]
    fn request_defaults() {
        let r = CompletionRequest::new("m", "u");
        assert_eq!((r.temperature, r.max_output_tokens), (1.0, 8_000));
        assert_eq!(r.thinking().max_output_tokens, 32_000);
    }
}
