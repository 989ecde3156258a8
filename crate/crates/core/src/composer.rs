// SPDX-License-Identifier: Apache-2.0

//! Multi-bug composition, independence probing, subsampling, and the easy filter.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{derive_rng, CompositionConfig};
use crate::dataset::{BlockTag, BuggyVariant, Task};
use crate::edit::{apply_edits, compute_diff, parse_to_blocks, reverse_edits, EditBlock, EditError, EditScript};
use crate::exec::{Sandbox, SandboxError, UnitSuite};
use crate::metrics::ExampleScore;

#[derive(Debug, Error)]
pub enum ComposeError {
    #[error("pool has {have} single-bug variants, need {need}")]
    InsufficientPool { have: usize, need: usize },
    #[error("pool member {0} is not a single-block variant of this task")]
    InvalidMember(String),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error(transparent)]
    Edit(#[from] EditError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComposeRejection {
    /// Two member bugs edit the same lines.
    Conflict,
    /// The union does not diff back into exactly the member blocks.
    Ambiguous,
    StrideViolation,
    /// The composed program passes (the bugs cancel out).
    Passes,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Composition {
    Accepted(BuggyVariant),
    Rejected(ComposeRejection),
}

/// True iff consecutive blocks leave at least `s` untouched lines between them.
pub fn stride_ok(blocks: &[EditBlock], s: usize) -> bool {
    blocks.windows(2).all(|w| w[1].start > w[0].end && w[1].start - w[0].end > s)
}

/// Composes the given members (indices into `pool`) into one variant.
pub fn compose_members(
    task: &Task,
    members: &[&BuggyVariant],
    stride: usize,
    sandbox: &Sandbox,
) -> Result<Composition, ComposeError> {
    let gt = &task.gt_program;
    // Each member's bug expressed as a script on the ground truth.
    let mut bugs = Vec::with_capacity(members.len());
    for m in members {
        if m.task_id != task.task_id || m.k != 1 || m.blocks.len() != 1 {
            return Err(ComposeError::InvalidMember(m.bug_id.clone()));
        }
        let bug = reverse_edits(&m.fix_script()?, &m.buggy_program)?;
        if bug.base_hash() != gt.content_hash() {
            return Err(ComposeError::InvalidMember(m.bug_id.clone()));
        }
        let first = bug.edits().first().map_or(0, |e| e.line);
        bugs.push((first, bug, *m));
    }
    bugs.sort_by_key(|(first, _, _)| *first);
    let union: Vec<_> = bugs.iter().flat_map(|(_, b, _)| b.edits().iter().cloned()).collect();
    let union = match EditScript::new(gt.content_hash(), union) {
        Ok(s) => s,
        Err(_) => return Ok(Composition::Rejected(ComposeRejection::Conflict)),
    };
    let composed = match apply_edits(gt, &union) {
        Ok(p) => p,
        Err(_) => return Ok(Composition::Rejected(ComposeRejection::Conflict)),
    };
    let fix = compute_diff(&composed, gt);
    if fix != reverse_edits(&union, gt)? {
        return Ok(Composition::Rejected(ComposeRejection::Ambiguous));
    }
    let blocks = parse_to_blocks(&fix);
    if blocks.len() != members.len() {
        return Ok(Composition::Rejected(ComposeRejection::Ambiguous));
    }
    if !stride_ok(&blocks, stride) {
        return Ok(Composition::Rejected(ComposeRejection::StrideViolation));
    }
    let verdict = sandbox.run_tests_cached(&composed, &task.suite)?;
    if verdict.passed() {
        return Ok(Composition::Rejected(ComposeRejection::Passes));
    }
    let tags = blocks
        .iter()
        .zip(&bugs)
        .map(|(b, (_, _, m))| BlockTag { start: b.start, end: b.end, ..m.blocks[0].clone() })
        .collect();
    Ok(Composition::Accepted(BuggyVariant {
        bug_id: BuggyVariant::make_id(&task.task_id, &composed),
        task_id: task.task_id.clone(),
        k: members.len(),
        blocks: tags,
        fix_edits: fix.into_edits(),
        buggy_program: composed,
        independence: None,
    }))
}

/// Samples `k` distinct pool members and composes them.
pub fn compose(
    task: &Task,
    pool: &[BuggyVariant],
    k: usize,
    stride: usize,
    rng: &mut impl Rng,
    sandbox: &Sandbox,
) -> Result<Composition, ComposeError> {
    if pool.len() < k {
        return Err(ComposeError::InsufficientPool { have: pool.len(), need: k });
    }
    let mut picks = index::sample(rng, pool.len(), k).into_vec();
    picks.sort_unstable();
    let members: Vec<&BuggyVariant> = picks.iter().map(|&i| &pool[i]).collect();
    compose_members(task, &members, stride, sandbox)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CompositionReport {
    pub variants: Vec<BuggyVariant>,
    pub attempts: BTreeMap<usize, usize>,
    pub rejected: BTreeMap<ComposeRejection, usize>,
}

/// Runs `m2` composition attempts for every `k` in `2..=k_max` on one task.
/// `pool` holds that task's retained single-bug variants.
pub fn compose_task(
    task: &Task,
    pool: &[BuggyVariant],
    cfg: &CompositionConfig,
    sandbox: &Sandbox,
    seed: u64,
) -> Result<CompositionReport, ComposeError> {
    let mut report = CompositionReport::default();
    let mut seen: HashSet<String> = pool.iter().map(|v| v.bug_id.clone()).collect();
    for k in 2..=cfg.k_max {
        if pool.len() < k {
            break;
        }
        let mut rng = derive_rng(seed, &["compose", &task.task_id, &k.to_string()]);
        for _ in 0..cfg.m2 {
            *report.attempts.entry(k).or_default() += 1;
            match compose(task, pool, k, cfg.stride, &mut rng, sandbox)? {
                Composition::Accepted(v) if seen.insert(v.bug_id.clone()) => report.variants.push(v),
                Composition::Accepted(_) => *report.rejected.entry(ComposeRejection::Duplicate).or_default() += 1,
                Composition::Rejected(r) => *report.rejected.entry(r).or_default() += 1,
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    /// The full fix passes and every strict subset of block fixes fails.
    Consistent,
    /// Some strict subset already passes, or the full fix does not.
    Violated,
    /// The execution budget ran out before all subsets were checked.
    Inconclusive,
}

/// Checks the necessary condition for independence: fixing only some of
/// the bugs never makes the program pass. Spends at most `budget` executions.
pub fn independence_probe(
    variant: &BuggyVariant,
    suite: &UnitSuite,
    budget: usize,
    sandbox: &Sandbox,
) -> Result<ProbeVerdict, ComposeError> {
    let blocks = variant.fix_blocks()?;
    let k = blocks.len();
    let base = variant.buggy_program.content_hash();
    let run = |chosen: &[&EditBlock]| -> Result<bool, ComposeError> {
        let edits = chosen.iter().flat_map(|b| b.edits.iter().cloned()).collect();
        let program = apply_edits(&variant.buggy_program, &EditScript::new(base, edits)?)?;
        Ok(sandbox.passes(&program, suite)?)
    };
    if budget == 0 {
        return Ok(ProbeVerdict::Inconclusive);
    }
    if !run(&blocks.iter().collect::<Vec<_>>())? {
        return Ok(ProbeVerdict::Violated);
    }
    let mut spent = 1;
    for mask in 1..(1u64 << k) - 1 {
        if spent >= budget {
            return Ok(ProbeVerdict::Inconclusive);
        }
        spent += 1;
        let chosen: Vec<&EditBlock> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| &blocks[i]).collect();
        if run(&chosen)? {
            return Ok(ProbeVerdict::Violated);
        }
    }
    Ok(ProbeVerdict::Consistent)
}

/// Keeps at most `m3` variants per (task, k), chosen uniformly without
/// replacement; survivors keep their input order.
pub fn subsample(variants: &[BuggyVariant], m3: usize, seed: u64) -> Vec<BuggyVariant> {
    let mut groups: BTreeMap<(&str, usize), Vec<usize>> = BTreeMap::new();
    for (i, v) in variants.iter().enumerate() {
        groups.entry((v.task_id.as_str(), v.k)).or_default().push(i);
    }
    let mut keep = BTreeSet::new();
    for ((task, k), idx) in groups {
        if idx.len() <= m3 {
            keep.extend(idx);
        } else {
            let mut rng = derive_rng(seed, &["subsample", task, &k.to_string()]);
            keep.extend(index::sample(&mut rng, idx.len(), m3).into_iter().map(|j| idx[j]));
        }
    }
    keep.into_iter().map(|i| variants[i].clone()).collect()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error("example {bug_id} has {have} system scores, need at least {need}")]
    InsufficientSystems { bug_id: String, have: usize, need: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterOutcome {
    /// Retained ids in first-seen order.
    pub retained: Vec<String>,
    pub removed: usize,
}

/// Drops examples that at least `threshold` systems solve perfectly.
/// Rows are `(bug_id, system, score)`; a repeated (bug_id, system) keeps the last row.
pub fn easy_filter(rows: &[(String, String, ExampleScore)], threshold: usize) -> Result<FilterOutcome, FilterError> {
    let mut order = Vec::new();
    let mut by_example: BTreeMap<&str, BTreeMap<&str, bool>> = BTreeMap::new();
    for (bug_id, system, score) in rows {
        let entry = by_example.entry(bug_id).or_insert_with(|| {
            order.push(bug_id.clone());
            BTreeMap::new()
        });
        entry.insert(system, score.is_perfect());
    }
    let mut retained = Vec::new();
    for id in order {
        let systems = &by_example[id.as_str()];
        if systems.len() < threshold {
            return Err(FilterError::InsufficientSystems { bug_id: id, have: systems.len(), need: threshold });
        }
        if systems.values().filter(|p| **p).count() < threshold {
            retained.push(id);
        }
    }
    let removed = by_example.len() - retained.len();
    Ok(FilterOutcome { retained, removed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::LineEdit;

    fn block(start: usize, end: usize) -> EditBlock {
        let edits = (start..=end).map(|l| LineEdit::substitute(l, "a", "b")).collect();
        EditBlock { start, end, edits }
    }

    #[test]
    fn stride_arithmetic() {
        assert!(stride_ok(&[block(3, 4), block(8, 9)], 3));
        assert!(!stride_ok(&[block(3, 4), block(6, 7)], 3));
        assert!(stride_ok(&[block(3, 4)], 3));
        assert!(stride_ok(&[], 3));
    }

    fn perfect(p: bool) -> ExampleScore {
        let mut s = ExampleScore::no_edit(1, 2);
        if p {
            s.precision = 1.0;
            s.recall = 1.0;
            s.unit = 1;
        }
        s
    }

    fn rows(id: &str, perfect_count: usize, total: usize) -> Vec<(String, String, ExampleScore)> {
        (0..total).map(|i| (id.to_string(), format!("sys{i}"), perfect(i < perfect_count))).collect()
    }

    #[test]
    fn easy_filter_threshold() {
        let mut all = rows("a", 7, 9);
        all.extend(rows("b", 6, 9));
        let out = easy_filter(&all, 7).unwrap();
        assert_eq!(out.retained, ["b"]);
        assert_eq!(out.removed, 1);
        assert!(matches!(easy_filter(&rows("c", 0, 5), 7), Err(FilterError::InsufficientSystems { .. })));
    }
}
