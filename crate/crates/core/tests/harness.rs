// SPDX-License-Identifier: Apache-2.0

use std::io::Write as _;
use std::sync::OnceLock;

use pdbench_core::composer::{compose_task, subsample};
use pdbench_core::config::Config;
use pdbench_core::dataset::{BuggyVariant, Task};
use pdbench_core::exec::Sandbox;
use pdbench_core::gateway::{PromptStyle, ProviderError};
use pdbench_core::harness::{
    debug_example, fenced, ingest, rescore, run_benchmark, DebugMode, DebugRequest, Debugger, EvalConfig, HarnessError,
    Noop, Oracle, PartialFixer, Regenerator, SourceFormat,
};
use pdbench_core::synthesis::{generate_bugs, GenerationMode, LanguageRules, MutationGenerator};
use pdbench_core::toy::{toy_sandbox, toy_tasks};

struct Fixture {
    tasks: Vec<Task>,
    variants: Vec<BuggyVariant>,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let sandbox = toy_sandbox();
        let cfg = Config::default();
        let gen = MutationGenerator::default();
        let rules = LanguageRules::python();
        let tasks: Vec<Task> = toy_tasks().into_iter().take(4).collect();
        let mut variants = Vec::new();
        for t in &tasks {
            let pool = generate_bugs(t, GenerationMode::SingleLine(&cfg.single), &gen, &rules, &sandbox, cfg.seed)
                .unwrap()
                .variants;
            let composed = compose_task(t, &pool, &cfg.single.compose, &sandbox, cfg.seed).unwrap().variants;
            variants.extend(pool.into_iter().take(2));
            variants.extend(subsample(&composed, 2, cfg.seed));
        }
        Fixture { tasks, variants }
    })
}

fn cfg(mode: DebugMode) -> EvalConfig {
    EvalConfig::new(mode, PromptStyle::Minimal, 2, 3)
}

fn task_of<'a>(f: &'a Fixture, v: &BuggyVariant) -> &'a Task {
    f.tasks.iter().find(|t| t.task_id == v.task_id).unwrap()
}

#[test]
fn mocks_hit_their_identities() {
    let f = fixture();
    let sandbox = toy_sandbox();
    assert!(f.variants.iter().any(|v| v.k > 1));
    let c = cfg(DebugMode::Single);
    let oracle = run_benchmark(&f.variants, &f.tasks, &Oracle, &c, &sandbox, None, 4).unwrap();
    let noop = run_benchmark(&f.variants, &f.tasks, &Noop, &c, &sandbox, None, 4).unwrap();
    let regen = run_benchmark(&f.variants, &f.tasks, &Regenerator, &c, &sandbox, None, 4).unwrap();
    for r in &oracle.records {
        assert!(r.score.is_perfect(), "{}: {:?}", r.bug_id, r.score);
    }
    for r in &noop.records {
        assert_eq!((r.score.precision, r.score.recall, r.score.unit), (0.0, 0.0, 0));
    }
    for r in &regen.records {
        assert_eq!((r.score.recall, r.score.unit), (1.0, 1), "{}: {:?} {:?}", r.bug_id, r.score, r.matches);
        assert!(r.score.precision < 1.0, "{}: {:?} {:?}", r.bug_id, r.score, r.matches);
    }
    for r in run_benchmark(&f.variants, &f.tasks, &PartialFixer(1), &c, &sandbox, None, 4).unwrap().records {
        assert_eq!(r.score.recall, 1.0 / r.score.k as f64);
        assert_eq!(r.score.precision, 1.0);
        assert_eq!(r.score.unit == 1, r.score.k == 1);
    }
    assert_eq!(oracle.records.len(), f.variants.len());
    assert_eq!(oracle.report.unwrap().overall.unit, 1.0);
}

/// Fails a fixed number of times (no code, then the buggy program), then answers with the fix.
struct LateFixer(usize);

impl Debugger for LateFixer {
    fn id(&self) -> String {
        "test:late".into()
    }

    fn respond(&self, r: &DebugRequest<'_>) -> Result<String, ProviderError> {
        Ok(match r.attempt_index {
            i if i > self.0 => fenced(&r.variant.fixed_program().unwrap()),
            1 => "I am not sure what is wrong.".into(),
            _ => fenced(&r.variant.buggy_program),
        })
    }
}

#[test]
fn iterative_retries_until_pass() {
    let f = fixture();
    let sandbox = toy_sandbox();
    let v = &f.variants[0];
    let t = task_of(f, v);

    let single = debug_example(&LateFixer(2), t, v, &cfg(DebugMode::Single), &sandbox).unwrap();
    assert_eq!(single.attempts.len(), 1);
    assert!(single.attempts[0].program.is_none());
    assert_eq!((single.score.precision, single.score.recall, single.score.unit), (0.0, 0.0, 0));

    let it = debug_example(&LateFixer(2), t, v, &cfg(DebugMode::Iterative), &sandbox).unwrap();
    assert_eq!(it.attempts.len(), 3);
    assert!(it.score.is_perfect());
    let second = it.attempts[1].feedback.as_deref().unwrap();
    assert!(second.contains("no program could be read"));
    let third = it.attempts[2].feedback.as_deref().unwrap();
    assert!(third.contains(&v.buggy_program.lines()[0]));
    assert!(it.attempts.iter().map(|a| &a.prompt_hash).collect::<std::collections::HashSet<_>>().len() > 1);

    let quick = debug_example(&Oracle, t, v, &cfg(DebugMode::Iterative), &sandbox).unwrap();
    assert_eq!(quick.attempts.len(), 1);

    let never = debug_example(&Noop, t, v, &cfg(DebugMode::Iterative), &sandbox).unwrap();
    assert_eq!(never.attempts.len(), 3);
    assert_eq!(never.score.unit, 0);
}

/// Produces the fix only once the prompt carries a test-run result.
struct FeedbackReader;

impl Debugger for FeedbackReader {
    fn id(&self) -> String {
        "test:feedback".into()
    }

    fn respond(&self, r: &DebugRequest<'_>) -> Result<String, ProviderError> {
        Ok(if r.prompt.contains("Test run result: Fail") {
            fenced(&r.variant.fixed_program().unwrap())
        } else {
            fenced(&r.variant.buggy_program)
        })
    }
}

#[test]
fn agentic_uses_suite_and_feedback() {
    let f = fixture();
    let sandbox = toy_sandbox();
    let v = &f.variants[0];
    let t = task_of(f, v);
    let rec = debug_example(&FeedbackReader, t, v, &cfg(DebugMode::Agentic), &sandbox).unwrap();
    assert_eq!(rec.attempts.len(), 2);
    assert_eq!(rec.score.unit, 1);
    let fb = rec.attempts[1].feedback.as_deref().unwrap();
    assert!(fb.len() <= 4096 + 4096);
    assert!(rec.attempts[0].verdict.as_ref().unwrap().feedback.len() <= 4096);

    let it = debug_example(&FeedbackReader, t, v, &cfg(DebugMode::Iterative), &sandbox).unwrap();
    assert_eq!(it.score.unit, 0);

    let hidden = Task { suite_visible: false, ..t.clone() };
    assert!(matches!(
        debug_example(&Oracle, &hidden, v, &cfg(DebugMode::Agentic), &sandbox),
        Err(HarnessError::SuiteUnavailable(_))
    ));
    let tasks: Vec<Task> =
        f.tasks.iter().map(|x| if x.task_id == t.task_id { hidden.clone() } else { x.clone() }).collect();
    let out = run_benchmark(&f.variants, &tasks, &Oracle, &cfg(DebugMode::Agentic), &sandbox, None, 2).unwrap();
    let expected = f.variants.iter().filter(|x| x.task_id == t.task_id).count();
    assert_eq!(out.skipped.len(), expected);
    assert_eq!(out.records.len() + expected, f.variants.len());
}

#[test]
fn resumed_run_matches_fresh_run() {
    let f = fixture();
    let sandbox = toy_sandbox();
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(DebugMode::Single);
    let fresh = run_benchmark(&f.variants, &f.tasks, &PartialFixer(1), &c, &sandbox, None, 3).unwrap();

    let ckpt = dir.path().join("run.jsonl");
    let half = f.variants.len() / 2;
    run_benchmark(&f.variants[..half], &f.tasks, &PartialFixer(1), &c, &Sandbox::toy(), Some(&ckpt), 3).unwrap();
    // Simulate a crash mid-write.
    std::fs::OpenOptions::new().append(true).open(&ckpt).unwrap().write_all(b"{\"bug_id\": \"tor").unwrap();
    let resumed = run_benchmark(&f.variants, &f.tasks, &PartialFixer(1), &c, &toy_sandbox(), Some(&ckpt), 3).unwrap();

    let a = serde_json::to_string(&fresh.report.unwrap()).unwrap();
    let b = serde_json::to_string(&resumed.report.unwrap()).unwrap();
    assert_eq!(a, b);
    let ids = |rs: &[pdbench_core::harness::EvalRecord]| rs.iter().map(|r| r.bug_id.clone()).collect::<Vec<_>>();
    assert_eq!(ids(&fresh.records), ids(&resumed.records));
}

#[test]
fn rescoring_with_larger_epsilon_never_lowers_precision() {
    let f = fixture();
    let sandbox = toy_sandbox();
    let variants = &f.variants[..12];
    let base = run_benchmark(variants, &f.tasks, &Regenerator, &cfg(DebugMode::Single), &sandbox, None, 4).unwrap();
    let at = |eps| rescore(&base.records, variants, &f.tasks, eps, 3, &sandbox).unwrap();
    let (e0, e1, e2) = (at(0), at(1), at(2));
    for ((a, b), c) in e0.iter().zip(&e1).zip(&e2) {
        assert!(a.score.precision <= b.score.precision && b.score.precision <= c.score.precision);
    }
    assert_eq!(e2, base.records);
}

#[test]
fn ingest_normalizes_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let sandbox = Sandbox::toy();
    let t = &toy_tasks()[0];

    let native = dir.path().join("native.jsonl");
    let broken = Task { task_id: "broken".into(), gt_program: "x = 0\n".to_string().into(), ..t.clone() };
    let body = format!(
        "{}\nnot json\n{}\n{}\n",
        serde_json::to_string(t).unwrap(),
        serde_json::to_string(&broken).unwrap(),
        serde_json::to_string(t).unwrap()
    );
    std::fs::write(&native, body).unwrap();
    let r = ingest(&native, SourceFormat::Native, &sandbox).unwrap();
    assert_eq!(r.tasks.len(), 1);
    assert_eq!(r.rejected.len(), 3);
    assert!(r.rejected.iter().any(|(id, why)| id == "broken" && why.contains("fails")));

    let bcb = dir.path().join("bcb.jsonl");
    let row = serde_json::json!({
        "task_id": "bcb/1",
        "instruct_prompt": "Return the square of n.",
        "code_prompt": "def task_func(n):",
        "canonical_solution": "    return n * n\n",
        "test": "assert task_func(3) == 9\nassert task_func(-2) == 4\n",
    });
    std::fs::write(&bcb, format!("{row}\n")).unwrap();
    let r = ingest(&bcb, SourceFormat::BigCodeBench, &sandbox).unwrap();
    assert_eq!(r.tasks.len(), 1, "{:?}", r.rejected);
    assert_eq!(r.tasks[0].gt_program.lines(), ["def task_func(n):", "    return n * n"]);

    let lcb = dir.path().join("lcb.jsonl");
    let cases = serde_json::json!([{"input": "3\n", "output": "6\n", "testtype": "stdin"}]).to_string();
    let good = serde_json::json!({
        "question_id": "lcb/1",
        "question_content": "Read n and print 2n.",
        "solution": "n = int(input())\nprint(2 * n)\n",
        "public_test_cases": cases,
    });
    let wrong = serde_json::json!({
        "question_id": "lcb/2",
        "question_content": "Read n and print 2n.",
        "solution": "n = int(input())\nprint(n)\n",
        "public_test_cases": [{"input": "3\n", "output": "6\n"}],
    });
    std::fs::write(&lcb, format!("{good}\n{wrong}\n")).unwrap();
    let r = ingest(&lcb, SourceFormat::LiveCodeBench, &sandbox).unwrap();
    assert_eq!(r.tasks.iter().map(|t| t.task_id.as_str()).collect::<Vec<_>>(), ["lcb/1"]);
    assert_eq!(r.tasks[0].suite.kind(), "stdin_stdout");
    assert_eq!(r.rejected.len(), 1);
}
