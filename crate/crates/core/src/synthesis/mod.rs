// SPDX-License-Identifier: Apache-2.0

//! Atomic bug injection: spec sampling, generation, verification, and the
//! multi-line atomicity filter.

pub mod mutation;
pub mod rules;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{derive_rng, MultiLineConfig, SingleLineConfig};
use crate::dataset::{BlockTag, BuggyVariant, Task};
use crate::edit::{apply_edits, compute_diff, parse_to_blocks, EditError, EditOp, EditScript};
use crate::exec::{Sandbox, SandboxError, UnitSuite};
use crate::program::SourceProgram;
use crate::taxonomy::Category;

pub use mutation::{mutate, NoMutableSite, Rule};
pub use rules::{eligible_lines, LanguageRules};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("no line is eligible for any operation")]
    NoEligibleLines,
    #[error(transparent)]
    NoMutableSite(#[from] NoMutableSite),
    #[error("generator fault: {0}")]
    GeneratorFault(String),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error(transparent)]
    Edit(#[from] EditError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Insertion,
    Deletion,
    Substitution,
}

impl Operation {
    pub const ALL: [Operation; 3] = [Operation::Insertion, Operation::Deletion, Operation::Substitution];
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operation::Insertion => "insertion",
            Operation::Deletion => "deletion",
            Operation::Substitution => "substitution",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugSpec {
    pub operation: Operation,
    pub category: Category,
    pub subcategory: String,
    /// Secondary categories; only multi-line specs carry them.
    pub auxiliary: Vec<Category>,
    /// 1-based lines of the ground-truth program the bug may touch.
    pub candidate_lines: BTreeSet<usize>,
    pub block_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecMode {
    /// Offer up to `candidate_lines` eligible lines; the bug edits one of them.
    SingleLine { candidate_lines: usize },
    /// A contiguous block of `2..=b_max` substitutable lines.
    MultiLine { b_max: usize },
}

fn pick_subcategory(rng: &mut impl Rng, category: Category) -> String {
    let subs: Vec<_> = category.subcategories().collect();
    subs.choose(rng).expect("every category has subcategories").name.to_string()
}

pub fn sample_spec(
    rng: &mut impl Rng,
    program: &SourceProgram,
    mode: SpecMode,
    rules: &LanguageRules,
) -> Result<BugSpec, SynthError> {
    match mode {
        SpecMode::SingleLine { candidate_lines } => {
            let category = *Category::ALL.choose(rng).expect("non-empty");
            let subcategory = pick_subcategory(rng, category);
            let mut ops = Operation::ALL;
            ops.shuffle(rng);
            let allow_imports = category == Category::BuildPackageMerge;
            let (operation, eligible) = ops
                .into_iter()
                .map(|op| (op, eligible_lines(program, op, rules, allow_imports)))
                .find(|(_, e)| !e.is_empty())
                .ok_or(SynthError::NoEligibleLines)?;
            let eligible: Vec<usize> = eligible.into_iter().collect();
            let n = candidate_lines.clamp(1, eligible.len());
            let candidate_lines = index::sample(rng, eligible.len(), n).into_iter().map(|i| eligible[i]).collect();
            Ok(BugSpec { operation, category, subcategory, auxiliary: vec![], candidate_lines, block_size: 1 })
        }
        SpecMode::MultiLine { b_max } => {
            let mut cats = Category::ALL;
            cats.shuffle(rng);
            let (category, auxiliary) = (cats[0], cats[1..3].to_vec());
            let subcategory = pick_subcategory(rng, category);
            let eligible = eligible_lines(program, Operation::Substitution, rules, false);
            let wanted = rng.gen_range(2..=b_max.max(2));
            for size in (2..=wanted).rev() {
                let starts: Vec<usize> =
                    eligible.iter().copied().filter(|&s| (s..s + size).all(|l| eligible.contains(&l))).collect();
                if let Some(&start) = starts.choose(rng) {
                    return Ok(BugSpec {
                        operation: Operation::Substitution,
                        category,
                        subcategory,
                        auxiliary,
                        candidate_lines: (start..start + size).collect(),
                        block_size: size,
                    });
                }
            }
            Err(SynthError::NoEligibleLines)
        }
    }
}

/// Produces a candidate buggy program for a spec.
pub trait BugGenerator: Send + Sync {
    fn name(&self) -> &str;
    /// False for generators whose output is not a function of the RNG stream.
    fn deterministic(&self) -> bool {
        true
    }
    fn generate(&self, task: &Task, spec: &BugSpec, rng: &mut ChaCha8Rng) -> Result<SourceProgram, SynthError>;
}

pub struct MutationGenerator {
    pub rules: LanguageRules,
}

impl Default for MutationGenerator {
    fn default() -> Self {
        MutationGenerator { rules: LanguageRules::python() }
    }
}

impl BugGenerator for MutationGenerator {
    fn name(&self) -> &str {
        "mutation"
    }

    fn generate(&self, task: &Task, spec: &BugSpec, rng: &mut ChaCha8Rng) -> Result<SourceProgram, SynthError> {
        Ok(mutate(&task.gt_program, spec, &self.rules, rng)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    EmptyDiff,
    OutsideSpec,
    /// A single-line spec produced more than one edit.
    NotSingleLine,
    NotSingleBlock,
    /// The candidate still passes its suite.
    Unkilled,
    NonAtomic,
    Duplicate,
    NoMutableSite,
    GeneratorFault,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string tag"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Injection {
    Retained(BuggyVariant),
    Rejected(Rejection),
}

/// Whether every edit of the injected bug (in ground-truth coordinates)
/// stays on the candidate lines of `spec`. An insertion sits between two lines and
/// counts as touching either neighbour.
fn contained(bug: &EditScript, spec: &BugSpec) -> bool {
    bug.edits().iter().all(|e| match e.op {
        EditOp::InsertAfter => spec.candidate_lines.contains(&e.line) || spec.candidate_lines.contains(&(e.line + 1)),
        _ => spec.candidate_lines.contains(&e.line),
    })
}

/// Verifies a generated candidate and packages it as a one-bug variant.
pub fn inject_bug(
    task: &Task,
    spec: &BugSpec,
    candidate: &SourceProgram,
    generator: &str,
    sandbox: &Sandbox,
) -> Result<Injection, SynthError> {
    let bug = compute_diff(&task.gt_program, candidate);
    if bug.is_empty() {
        return Ok(Injection::Rejected(Rejection::EmptyDiff));
    }
    if !contained(&bug, spec) {
        return Ok(Injection::Rejected(Rejection::OutsideSpec));
    }
    let fix = compute_diff(candidate, &task.gt_program);
    if spec.block_size == 1 && fix.len() != 1 {
        return Ok(Injection::Rejected(Rejection::NotSingleLine));
    }
    let blocks = parse_to_blocks(&fix);
    if blocks.len() != 1 {
        return Ok(Injection::Rejected(Rejection::NotSingleBlock));
    }
    let verdict = sandbox.run_tests_cached(candidate, &task.suite)?;
    if verdict.passed() {
        return Ok(Injection::Rejected(Rejection::Unkilled));
    }
    let block = &blocks[0];
    Ok(Injection::Retained(BuggyVariant {
        bug_id: BuggyVariant::make_id(&task.task_id, candidate),
        task_id: task.task_id.clone(),
        k: 1,
        blocks: vec![BlockTag {
            start: block.start,
            end: block.end,
            category: spec.category,
            subcategory: spec.subcategory.clone(),
            auxiliary: spec.auxiliary.clone(),
            generator: generator.to_string(),
            verdict_kind: verdict.status,
        }],
        fix_edits: fix.into_edits(),
        buggy_program: candidate.clone(),
        independence: None,
    }))
}

/// Largest fix the atomicity filter enumerates exhaustively.
pub const ATOMICITY_MAX_EDITS: usize = 12;

/// True iff every partial fix (non-empty strict subset of the fix edits)
/// still fails the suite. Fixes of fewer than two edits pass vacuously;
/// fixes above [`ATOMICITY_MAX_EDITS`] are rejected rather than sampled.
pub fn atomicity_filter(variant: &BuggyVariant, suite: &UnitSuite, sandbox: &Sandbox) -> Result<bool, SynthError> {
    let edits = &variant.fix_edits;
    let n = edits.len();
    if n < 2 {
        return Ok(true);
    }
    if n > ATOMICITY_MAX_EDITS {
        return Ok(false);
    }
    let base = variant.buggy_program.content_hash();
    for mask in 1..(1u32 << n) - 1 {
        let subset = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| edits[i].clone()).collect();
        let partial = apply_edits(&variant.buggy_program, &EditScript::new(base, subset)?)?;
        if sandbox.passes(&partial, suite)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy)]
pub enum GenerationMode<'a> {
    SingleLine(&'a SingleLineConfig),
    MultiLine(&'a MultiLineConfig),
}

impl GenerationMode<'_> {
    fn label(&self) -> &'static str {
        match self {
            GenerationMode::SingleLine(_) => "single",
            GenerationMode::MultiLine(_) => "multi",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenerationReport {
    pub variants: Vec<BuggyVariant>,
    pub attempts: usize,
    pub rejected: BTreeMap<Rejection, usize>,
}

/// Runs the attempt budget for one task. Only sandbox faults abort.
pub fn generate_bugs(
    task: &Task,
    mode: GenerationMode<'_>,
    generator: &dyn BugGenerator,
    rules: &LanguageRules,
    sandbox: &Sandbox,
    seed: u64,
) -> Result<GenerationReport, SandboxError> {
    let mut rng = derive_rng(seed, &["inject", mode.label(), &task.task_id]);
    let (budget, spec_mode) = match mode {
        GenerationMode::SingleLine(c) => (c.m1, SpecMode::SingleLine { candidate_lines: c.candidate_lines }),
        GenerationMode::MultiLine(c) => (c.m1, SpecMode::MultiLine { b_max: c.b_max }),
    };
    let mut report = GenerationReport::default();
    let mut seen = HashSet::new();
    let sandbox_only = |e: SynthError| -> Result<Rejection, SandboxError> {
        match e {
            SynthError::Sandbox(e) => Err(e),
            SynthError::NoMutableSite(_) => Ok(Rejection::NoMutableSite),
            _ => Ok(Rejection::GeneratorFault),
        }
    };
    for _ in 0..budget {
        let spec = match sample_spec(&mut rng, &task.gt_program, spec_mode, rules) {
            Ok(s) => s,
            Err(_) => break,
        };
        report.attempts += 1;
        let outcome = generator
            .generate(task, &spec, &mut rng)
            .and_then(|candidate| inject_bug(task, &spec, &candidate, generator.name(), sandbox));
        let variant = match outcome {
            Ok(Injection::Retained(v)) => v,
            Ok(Injection::Rejected(r)) => {
                *report.rejected.entry(r).or_default() += 1;
                continue;
            }
            Err(e) => {
                *report.rejected.entry(sandbox_only(e)?).or_default() += 1;
                continue;
            }
        };
        let rejection = if seen.contains(&variant.bug_id) {
            Some(Rejection::Duplicate)
        } else if matches!(mode, GenerationMode::MultiLine(_))
            && !atomicity_filter(&variant, &task.suite, sandbox).or_else(|e| sandbox_only(e).map(|_| false))?
        {
            Some(Rejection::NonAtomic)
        } else {
            None
        };
        match rejection {
            Some(r) => *report.rejected.entry(r).or_default() += 1,
            None => {
                seen.insert(variant.bug_id.clone());
                report.variants.push(variant);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::derive_rng;

    const PROG: &str = "\
def clamp_sum(xs, lo, hi):
    total = 0
    for x in xs:
        if x < lo:
            x = lo
        total += x
    if total > hi:
        total = hi
    return total
";

    #[test]
    fn specs_are_deterministic() {
        let p = SourceProgram::from_text(PROG);
        let r = LanguageRules::python();
        let mode = SpecMode::SingleLine { candidate_lines: 3 };
        let a = sample_spec(&mut derive_rng(7, &[]), &p, mode, &r).unwrap();
        let b = sample_spec(&mut derive_rng(7, &[]), &p, mode, &r).unwrap();
        assert_eq!(a, b);
        assert!(a.candidate_lines.len() <= 3 && !a.candidate_lines.contains(&1));
    }

    #[test]
    fn headers_only_has_no_eligible_lines() {
        let p = SourceProgram::from_text("def f():\n# nothing\n");
        let err = sample_spec(
            &mut derive_rng(1, &[]),
            &p,
            SpecMode::SingleLine { candidate_lines: 3 },
            &LanguageRules::python(),
        );
        assert!(matches!(err, Err(SynthError::NoEligibleLines)));
    }

    #[test]
    fn multi_line_specs_are_contiguous_and_substitutable() {
        let p = SourceProgram::from_text(PROG);
        let r = LanguageRules::python();
        let mut rng = derive_rng(3, &[]);
        for _ in 0..50 {
            let s = sample_spec(&mut rng, &p, SpecMode::MultiLine { b_max: 4 }, &r).unwrap();
            let lines: Vec<usize> = s.candidate_lines.iter().copied().collect();
            assert_eq!(lines.len(), s.block_size);
            assert!(lines.windows(2).all(|w| w[1] == w[0] + 1));
            assert_eq!(s.auxiliary.len(), 2);
            assert!(!s.auxiliary.contains(&s.category));
        }
    }

    #[test]
    fn rejection_names() {
        assert_eq!(Rejection::NonAtomic.to_string(), "non_atomic");
    }
}
