// SPDX-License-Identifier: Apache-2.0

//! Aligns predicted edit blocks with ground-truth bug blocks and builds the
//! per-bug tester programs used to verify each pairing.
//!
//! Passes, in priority order:
//! 1. exact: a predicted edit identical (same line, op and text) to a
//!    single-edit ground-truth block;
//! 2. wrap: a predicted block that touches ground-truth blocks (shares a
//!    line, or one inserts right before the other) takes all of the
//!    remaining ones it touches;
//! 3. near: a predicted block touching no ground-truth block whose
//!    surrounding lines equal (as multisets) those around a ground-truth block;
//! 4. distant: a single-edit predicted block making the same change as a
//!    single-edit ground-truth block elsewhere in the file.
//!
//! Within passes 2-4 the assignment is chosen to maximize the number of
//! matches of each kind in that priority order; remaining ties go to the
//! nearest ground-truth block and then to earlier predicted blocks.

use std::collections::BTreeSet;

use pathfinding::prelude::{kuhn_munkres, Matrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edit::{
    apply_edits, block_context, blocks_of, parse_to_blocks, EditBlock, EditError, EditOp, EditScript, LineEdit,
};
use crate::program::{normalize, SourceProgram};

/// Above this many mutually conflicting wrap candidates the wrap pass falls
/// back to ascending greedy order instead of exhaustive choice.
const WRAP_ENUMERATION_LIMIT: usize = 16;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("{which} script targets {expected}, not the buggy program {actual}")]
    ScriptMismatch { which: &'static str, expected: String, actual: String },
    #[error("predicted block collides with a ground-truth block outside its match: {0}")]
    OverlapConflict(EditError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Wrap,
    Near,
    Distant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchRecord {
    pub kind: MatchKind,
    pub pred_block: EditBlock,
    /// Indices into [`MatchSet::gt_blocks`], ascending.
    pub gt_indices: Vec<usize>,
    /// Buggy program with every ground-truth fix applied except the matched
    /// ones, which are replaced by `pred_block`. `None` for exact matches.
    pub tester: Option<SourceProgram>,
    /// `None` until verified.
    pub success: Option<bool>,
    pub essential_size: usize,
    /// Position of each `pred_block` edit in the predicted script.
    pub pred_ranks: Vec<usize>,
    /// Exactly matched predicted edits (with their positions) lifted out of
    /// the run of consecutive lines `pred_block` came from; testers apply them
    /// in place of the ground-truth blocks listed in `companion_gt`.
    pub companions: Vec<(usize, LineEdit)>,
    pub companion_gt: Vec<usize>,
}

impl MatchRecord {
    /// Tester for the sub-run `pred_block.edits[from..to]`.
    pub fn tester_for(
        &self,
        buggy: &SourceProgram,
        gt_blocks: &[EditBlock],
        from: usize,
        to: usize,
    ) -> Result<SourceProgram, MatchError> {
        let consumed: BTreeSet<usize> = self.gt_indices.iter().chain(&self.companion_gt).copied().collect();
        let mut edits: Vec<(usize, LineEdit)> =
            self.pred_ranks[from..to].iter().copied().zip(self.pred_block.edits[from..to].iter().cloned()).collect();
        edits.extend(self.companions.iter().cloned());
        build_tester(buggy, gt_blocks, &consumed, &edits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchSet {
    pub gt_blocks: Vec<EditBlock>,
    /// Sorted by predicted block start.
    pub records: Vec<MatchRecord>,
    pub unmatched_pred: Vec<EditBlock>,
    pub unmatched_gt: Vec<usize>,
    pub total_pred_edits: usize,
}

impl MatchSet {
    pub fn gt_blocks_of<'a>(&'a self, record: &'a MatchRecord) -> impl Iterator<Item = &'a EditBlock> + 'a {
        record.gt_indices.iter().map(|&i| &self.gt_blocks[i])
    }
}

/// Multiset equality of normalized, non-empty lines.
pub fn line_set_match(a: &[String], b: &[String]) -> bool {
    fn bag(lines: &[String]) -> Vec<&str> {
        let mut v: Vec<&str> = lines.iter().map(|l| normalize(l)).filter(|l| !l.is_empty()).collect();
        v.sort_unstable();
        v
    }
    bag(a) == bag(b)
}

/// Applies the ground-truth blocks outside `consumed` together with the
/// given predicted edits. Predicted edits carry their position in the
/// predicted script, which orders several insertions after the same line.
pub fn build_tester(
    buggy: &SourceProgram,
    gt_blocks: &[EditBlock],
    consumed: &BTreeSet<usize>,
    pred_edits: &[(usize, LineEdit)],
) -> Result<SourceProgram, MatchError> {
    let mut ranked = pred_edits.to_vec();
    ranked.sort_by_key(|(rank, _)| *rank);
    let mut edits: Vec<LineEdit> = gt_blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| !consumed.contains(i))
        .flat_map(|(_, b)| b.edits.iter().cloned())
        .collect();
    edits.extend(ranked.into_iter().map(|(_, e)| e));
    let script = EditScript::new(buggy.content_hash(), edits).map_err(MatchError::OverlapConflict)?;
    apply_edits(buggy, &script).map_err(MatchError::OverlapConflict)
}

/// A block's edits ranked by their order within it.
pub fn ranked(block: &EditBlock) -> Vec<(usize, LineEdit)> {
    block.edits.iter().cloned().enumerate().collect()
}

/// Whether a predicted block and a ground-truth block are a near match:
/// the `width` lines before and after each (the predicted side stopping at
/// other predicted blocks) agree as line multisets.
pub fn near_eligible(
    buggy: &SourceProgram,
    pred: &EditBlock,
    pred_exclude: &BTreeSet<usize>,
    gt: &EditBlock,
    width: usize,
) -> bool {
    let (pb, pa) = block_context(buggy, pred, width, pred_exclude);
    let (gb, ga) = block_context(buggy, gt, width, &BTreeSet::new());
    line_set_match(&pb, &gb) && line_set_match(&pa, &ga)
}

/// Whether two single-edit blocks make the same change at different places.
pub fn distant_eligible(pred: &EditBlock, gt: &EditBlock) -> bool {
    pred.edits.len() == 1 && gt.edits.len() == 1 && pred.edits[0].same_change(&gt.edits[0])
}

/// Last line a block reaches, counting an insertion at its end as reaching
/// into the gap before the next line.
fn reach(block: &EditBlock) -> usize {
    let inserts_at_end = block.edits.iter().any(|e| e.op == EditOp::InsertAfter && e.line == block.end);
    block.end + usize::from(inserts_at_end)
}

/// Whether two blocks share a line or one inserts directly before the other.
pub fn touches(a: &EditBlock, b: &EditBlock) -> bool {
    a.start <= reach(b) && b.start <= reach(a)
}

/// Lines covered by `blocks` other than `skip`.
pub fn covered_lines(blocks: &[EditBlock], skip: usize) -> BTreeSet<usize> {
    blocks.iter().enumerate().filter(|(i, _)| *i != skip).flat_map(|(_, b)| b.start..=b.end).collect()
}

struct Assignment {
    pairs: Vec<(usize, usize, MatchKind)>,
    weight: i64,
}

/// Near/distant assignment between free predicted blocks and free GT blocks,
/// maximizing (near count, distant count, closeness) lexicographically.
fn assign_near_distant(
    buggy: &SourceProgram,
    pred_blocks: &[EditBlock],
    free_pred: &[usize],
    gt_blocks: &[EditBlock],
    free_gt: &[usize],
    stride: usize,
) -> Assignment {
    let empty = Assignment { pairs: Vec::new(), weight: 0 };
    if free_pred.is_empty() || free_gt.is_empty() {
        return empty;
    }
    let n = free_pred.len().min(free_gt.len()) as i64;
    let max_dist = buggy.len() as i64 + 2;
    let distant_base = n * (max_dist + 1) + 1;
    let near_base = n * (distant_base + max_dist) + 1;

    let mut kinds = vec![vec![None; free_gt.len()]; free_pred.len()];
    let mut weights = vec![vec![0i64; free_gt.len()]; free_pred.len()];
    let mut any = false;
    for (r, &p) in free_pred.iter().enumerate() {
        let pred = &pred_blocks[p];
        let exclude = covered_lines(pred_blocks, p);
        for (c, &g) in free_gt.iter().enumerate() {
            let gt = &gt_blocks[g];
            let closeness = max_dist - (pred.start as i64 - gt.start as i64).abs();
            let kind = if near_eligible(buggy, pred, &exclude, gt, stride) {
                Some((MatchKind::Near, near_base))
            } else if distant_eligible(pred, gt) {
                Some((MatchKind::Distant, distant_base))
            } else {
                None
            };
            if let Some((k, base)) = kind {
                kinds[r][c] = Some(k);
                weights[r][c] = base + closeness;
                any = true;
            }
        }
    }
    if !any {
        return empty;
    }

    let transpose = free_pred.len() > free_gt.len();
    let (rows, cols) = if transpose { (free_gt.len(), free_pred.len()) } else { (free_pred.len(), free_gt.len()) };
    let matrix = Matrix::from_fn(rows, cols, |(i, j)| if transpose { weights[j][i] } else { weights[i][j] });
    let (_, assignment) = kuhn_munkres(&matrix);

    let mut pairs = Vec::new();
    let mut weight = 0;
    for (i, &j) in assignment.iter().enumerate() {
        let (r, c) = if transpose { (j, i) } else { (i, j) };
        if let Some(kind) = kinds[r][c] {
            pairs.push((free_pred[r], free_gt[c], kind));
            weight += weights[r][c];
        }
    }
    Assignment { pairs, weight }
}

/// Runs the matching passes. `stride` is the context width for near matches.
pub fn map_edits(
    buggy: &SourceProgram,
    gt_script: &EditScript,
    pred_script: &EditScript,
    stride: usize,
) -> Result<MatchSet, MatchError> {
    for (which, script) in [("ground-truth", gt_script), ("predicted", pred_script)] {
        if script.base_hash() != buggy.content_hash() {
            return Err(MatchError::ScriptMismatch {
                which,
                expected: script.base_hash().to_string(),
                actual: buggy.content_hash().to_string(),
            });
        }
    }
    let gt_blocks = parse_to_blocks(gt_script);
    let mut gt_taken = vec![false; gt_blocks.len()];
    // Predicted-script position of the edit that exactly matched each GT block.
    let mut exact_rank: Vec<Option<usize>> = vec![None; gt_blocks.len()];
    let mut records = Vec::new();

    // Pass 1: exact matches, scanning predicted edits from the bottom up.
    let pred_edits = pred_script.edits();
    let mut pred_used = vec![false; pred_edits.len()];
    for (ei, e) in pred_edits.iter().enumerate().rev() {
        let hit = gt_blocks
            .iter()
            .enumerate()
            .find(|(gi, g)| !gt_taken[*gi] && g.edits.len() == 1 && g.edits[0].equivalent(e));
        if let Some((gi, _)) = hit {
            gt_taken[gi] = true;
            exact_rank[gi] = Some(ei);
            pred_used[ei] = true;
            records.push(MatchRecord {
                kind: MatchKind::Exact,
                pred_block: EditBlock { start: e.line, end: e.line, edits: vec![e.clone()] },
                gt_indices: vec![gi],
                tester: None,
                success: None,
                essential_size: 0,
                pred_ranks: vec![ei],
                companions: Vec::new(),
                companion_gt: Vec::new(),
            });
        }
    }
    // Predicted blocks come from the full script; exact edits are lifted out
    // and ride along as companions, so a block keeps its extent.
    let mut pred_blocks = Vec::new();
    let mut block_ranks: Vec<Vec<usize>> = Vec::new();
    let mut block_companions: Vec<Vec<usize>> = Vec::new();
    let mut offset = 0;
    for full in blocks_of(pred_edits) {
        let ranks = offset..offset + full.edits.len();
        offset += full.edits.len();
        let (kept, lifted): (Vec<usize>, Vec<usize>) = ranks.partition(|&i| !pred_used[i]);
        if let (Some(&first), Some(&last)) = (kept.first(), kept.last()) {
            let edits = kept.iter().map(|&i| pred_edits[i].clone()).collect();
            pred_blocks.push(EditBlock { start: pred_edits[first].line, end: pred_edits[last].line, edits });
            block_ranks.push(kept);
            block_companions.push(lifted);
        }
    }

    // Classify predicted blocks by how they sit relative to GT blocks.
    let mut wrap_sets: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut free_pred = Vec::new();
    for (pi, p) in pred_blocks.iter().enumerate() {
        // Exactly matched GT blocks are already settled and do not count.
        let touching: Vec<usize> = gt_blocks
            .iter()
            .enumerate()
            .filter(|(i, g)| exact_rank[*i].is_none() && touches(p, g))
            .map(|(i, _)| i)
            .collect();
        if touching.is_empty() {
            free_pred.push(pi);
        } else {
            wrap_sets.push((pi, touching));
        }
    }

    let conflicts = |a: &[usize], b: &[usize]| a.iter().any(|g| b.contains(g));
    let conflicted: Vec<usize> = (0..wrap_sets.len())
        .filter(|&i| (0..wrap_sets.len()).any(|j| j != i && conflicts(&wrap_sets[i].1, &wrap_sets[j].1)))
        .collect();

    // Candidate wrap selections, best-first preference order for ties.
    let selections: Vec<Vec<bool>> = if conflicted.len() <= WRAP_ENUMERATION_LIMIT {
        let m = conflicted.len();
        let mut out = Vec::new();
        // Masks are read with candidate 0 as the most significant bit, so
        // descending numeric order prefers earlier predicted blocks.
        for mask in (0u32..(1 << m)).rev() {
            let pick: Vec<bool> = (0..m).map(|k| mask & (1 << (m - 1 - k)) != 0).collect();
            let chosen: Vec<usize> = (0..m).filter(|&k| pick[k]).map(|k| conflicted[k]).collect();
            let ok = chosen
                .iter()
                .enumerate()
                .all(|(x, &a)| chosen[x + 1..].iter().all(|&b| !conflicts(&wrap_sets[a].1, &wrap_sets[b].1)));
            if ok {
                out.push(pick);
            }
        }
        out
    } else {
        let mut pick = vec![false; conflicted.len()];
        let mut taken: Vec<usize> = Vec::new();
        for (k, &c) in conflicted.iter().enumerate() {
            if taken.iter().all(|&t| !conflicts(&wrap_sets[t].1, &wrap_sets[c].1)) {
                pick[k] = true;
                taken.push(c);
            }
        }
        vec![pick]
    };

    let mut best: Option<(usize, i64, Vec<usize>, Assignment)> = None;
    for pick in selections {
        let chosen: Vec<usize> = (0..wrap_sets.len())
            .filter(|w| match conflicted.iter().position(|c| c == w) {
                Some(k) => pick[k],
                None => true,
            })
            .collect();
        let mut consumed = gt_taken.clone();
        for &w in &chosen {
            for &g in &wrap_sets[w].1 {
                consumed[g] = true;
            }
        }
        let free_gt: Vec<usize> = (0..gt_blocks.len()).filter(|&g| !consumed[g]).collect();
        let assignment = assign_near_distant(buggy, &pred_blocks, &free_pred, &gt_blocks, &free_gt, stride);
        let better = match &best {
            None => true,
            Some((wraps, weight, _, _)) => (chosen.len(), assignment.weight) > (*wraps, *weight),
        };
        if better {
            best = Some((chosen.len(), assignment.weight, chosen, assignment));
        }
    }
    let (_, _, chosen_wraps, assignment) = best.expect("at least one wrap selection exists");

    let mut pred_matched = vec![false; pred_blocks.len()];
    let mut pending: Vec<(usize, Vec<usize>, MatchKind)> =
        chosen_wraps.iter().map(|&w| (wrap_sets[w].0, wrap_sets[w].1.clone(), MatchKind::Wrap)).collect();
    pending.extend(assignment.pairs.into_iter().map(|(p, g, k)| (p, vec![g], k)));
    for (pi, gts, kind) in pending {
        let pred = &pred_blocks[pi];
        let lifted = &block_companions[pi];
        let companion_gt: Vec<usize> =
            (0..gt_blocks.len()).filter(|&g| exact_rank[g].is_some_and(|r| lifted.contains(&r))).collect();
        let companions = lifted.iter().map(|&r| (r, pred_edits[r].clone())).collect();
        for &g in &gts {
            gt_taken[g] = true;
        }
        pred_matched[pi] = true;
        let mut record = MatchRecord {
            kind,
            pred_block: pred.clone(),
            gt_indices: gts,
            tester: None,
            success: None,
            essential_size: 0,
            pred_ranks: block_ranks[pi].clone(),
            companions,
            companion_gt,
        };
        record.tester = Some(record.tester_for(buggy, &gt_blocks, 0, pred.edits.len())?);
        records.push(record);
    }
    records.sort_by_key(|r| (r.pred_block.start, r.pred_block.end));

    let unmatched_pred = pred_blocks.iter().zip(&pred_matched).filter(|(_, m)| !**m).map(|(b, _)| b.clone()).collect();
    let unmatched_gt = (0..gt_blocks.len()).filter(|&g| !gt_taken[g]).collect();
    Ok(MatchSet { gt_blocks, records, unmatched_pred, unmatched_gt, total_pred_edits: pred_script.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edit::LineEdit;

    fn numbered(n: usize) -> SourceProgram {
        SourceProgram::from_lines((1..=n).map(|i| format!("v{i} = {i}")))
    }

    fn script(p: &SourceProgram, edits: Vec<LineEdit>) -> EditScript {
        EditScript::new(p.content_hash(), edits).unwrap()
    }

    fn sub(p: &SourceProgram, line: usize, after: &str) -> LineEdit {
        LineEdit::substitute(line, p.line(line).unwrap(), after)
    }

    #[test]
    fn line_sets_are_multisets() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(line_set_match(&[], &[]));
        assert!(!line_set_match(&s(&["x=1", " x=1"]), &s(&["x=1"])));
        assert!(line_set_match(&s(&["a", "b", ""]), &s(&["b  ", "a"])));
        assert!(!line_set_match(&s(&["a", "a"]), &s(&["a"])));
    }

    #[test]
    fn identical_prediction_is_all_exact() {
        let p = numbered(20);
        let gt = script(&p, vec![sub(&p, 3, "x"), sub(&p, 12, "y")]);
        let m = map_edits(&p, &gt, &gt, 3).unwrap();
        assert_eq!(m.records.len(), 2);
        assert!(m.records.iter().all(|r| r.kind == MatchKind::Exact && r.tester.is_none()));
        assert!(m.unmatched_gt.is_empty() && m.unmatched_pred.is_empty());
    }

    #[test]
    fn wide_prediction_wraps_gt_block() {
        let p = numbered(20);
        let gt = script(&p, vec![sub(&p, 12, "fixed")]);
        let pred = script(&p, (10..=14).map(|l| sub(&p, l, if l == 12 { "fixed" } else { "noise" })).collect());
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert_eq!(m.records.iter().filter(|r| r.kind == MatchKind::Exact).count(), 1);
        let pred = script(&p, (10..=14).map(|l| sub(&p, l, "noise")).collect());
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[0].kind, MatchKind::Wrap);
        assert_eq!(m.records[0].gt_indices, [0]);
        assert_eq!((m.records[0].pred_block.start, m.records[0].pred_block.end), (10, 14));
    }

    #[test]
    fn gt_block_starting_before_prediction_is_wrapped() {
        let p = numbered(20);
        let gt = script(&p, vec![sub(&p, 5, "a"), sub(&p, 6, "b"), sub(&p, 7, "c")]);
        let pred = script(&p, vec![sub(&p, 7, "c2"), sub(&p, 8, "d")]);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[0].kind, MatchKind::Wrap);
    }

    #[test]
    fn distant_identical_edit() {
        let p = SourceProgram::from_lines((1..=50).map(|i| {
            if i == 12 || i == 40 {
                "x = a + b".to_string()
            } else {
                format!("v{i} = {i}")
            }
        }));
        let gt = script(&p, vec![sub(&p, 12, "x = a - b")]);
        let pred = script(&p, vec![sub(&p, 40, "x = a - b")]);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[0].kind, MatchKind::Distant);
        let tester = m.records[0].tester.as_ref().unwrap();
        assert_eq!(tester.line(12), Some("x = a + b"));
        assert_eq!(tester.line(40), Some("x = a - b"));
    }

    #[test]
    fn near_match_by_context() {
        let p = SourceProgram::from_lines(["q", "w", "BUG", "w", "q", "z", "w", "T", "w", "z"]);
        let gt = script(&p, vec![LineEdit::substitute(3, "BUG", "ok")]);
        let pred = script(&p, vec![LineEdit::substitute(8, "T", "t")]);
        let m = map_edits(&p, &gt, &pred, 1).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[0].kind, MatchKind::Near);
        // With a wider window the contexts differ ("q" vs "z" two lines out).
        let m = map_edits(&p, &gt, &pred, 2).unwrap();
        assert!(m.records.is_empty());
        assert_eq!(m.unmatched_gt, [0]);
    }

    #[test]
    fn tester_replaces_only_the_matched_bug() {
        let p = numbered(20);
        let gt = script(&p, vec![sub(&p, 3, "fix3"), sub(&p, 12, "fix12")]);
        let pred = script(&p, vec![sub(&p, 11, "n11"), sub(&p, 12, "alt12")]);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert_eq!(m.records.len(), 1);
        let t = m.records[0].tester.as_ref().unwrap();
        assert_eq!(t.line(3), Some("fix3"));
        assert_eq!(t.line(11), Some("n11"));
        assert_eq!(t.line(12), Some("alt12"));
        assert_eq!(m.unmatched_gt, [0]);
    }

    #[test]
    fn tester_equals_ground_truth_for_the_exact_fix() {
        let p = numbered(10);
        let gt = script(&p, vec![sub(&p, 3, "fix3"), sub(&p, 4, "fix4")]);
        let blocks = parse_to_blocks(&gt);
        let t = build_tester(&p, &blocks, &BTreeSet::from([0]), &ranked(&blocks[0])).unwrap();
        assert_eq!(t, apply_edits(&p, &gt).unwrap());
    }

    #[test]
    fn insertion_right_before_prediction_is_wrapped() {
        let p = numbered(10);
        let gt = script(&p, vec![LineEdit::insert_after(0, "head")]);
        let pred = script(&p, vec![sub(&p, 1, "head"), sub(&p, 2, "v1 = 1")]);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert_eq!(m.records.len(), 1);
        assert_eq!(m.records[0].kind, MatchKind::Wrap);
        assert_eq!(m.records[0].gt_indices, [0]);
    }

    #[test]
    fn leftover_edits_beside_an_exact_match_still_wrap() {
        let p = numbered(12);
        let gt = script(&p, vec![sub(&p, 2, "a"), LineEdit::insert_after(9, "b")]);
        // The prediction rewrites lines 1-9 and repeats the insertion exactly.
        let mut edits: Vec<LineEdit> = (1..=9).map(|l| sub(&p, l, &format!("w{l}"))).collect();
        edits.push(LineEdit::insert_after(9, "b"));
        edits.push(LineEdit::insert_after(9, "c"));
        let pred = script(&p, edits);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        let kinds: Vec<MatchKind> = m.records.iter().map(|r| r.kind).collect();
        assert_eq!(kinds, [MatchKind::Wrap, MatchKind::Exact]);
        let wrap = &m.records[0];
        assert_eq!(wrap.companion_gt, [1]);
        // The tester reproduces the whole prediction, insertion order included.
        assert_eq!(wrap.tester.as_ref().unwrap(), &apply_edits(&p, &pred).unwrap());
    }

    #[test]
    fn exact_edit_inside_a_run_does_not_split_it() {
        let p = numbered(12);
        let gt = script(&p, vec![sub(&p, 3, "a"), LineEdit::delete(8, p.line(8).unwrap())]);
        // Lines 1-10 are rewritten except line 8, which is deleted exactly as in the fix.
        let edits: Vec<LineEdit> = (1..=10)
            .map(|l| if l == 8 { LineEdit::delete(8, p.line(8).unwrap()) } else { sub(&p, l, &format!("w{l}")) })
            .collect();
        let pred = script(&p, edits);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        assert!(m.unmatched_pred.is_empty());
        let wrap = m.records.iter().find(|r| r.kind == MatchKind::Wrap).unwrap();
        assert_eq!((wrap.pred_block.start, wrap.pred_block.end, wrap.pred_block.edits.len()), (1, 10, 9));
        assert_eq!(wrap.companion_gt, [1]);
        assert_eq!(wrap.tester.as_ref().unwrap(), &apply_edits(&p, &pred).unwrap());
    }

    #[test]
    fn stale_scripts_are_rejected() {
        let p = numbered(5);
        let q = numbered(6);
        let s = script(&q, vec![]);
        assert!(matches!(map_edits(&p, &s, &script(&p, vec![]), 3), Err(MatchError::ScriptMismatch { .. })));
    }

    #[test]
    fn prediction_straddling_two_wraps_prefers_more_matches() {
        let p = numbered(30);
        // GT block [5,8] is overlapped by both predicted blocks [4,5] and [7,7].
        let gt = script(&p, (5..=8).map(|l| sub(&p, l, "g")).chain([sub(&p, 20, "h")]).collect());
        let pred = script(&p, vec![sub(&p, 4, "p"), sub(&p, 5, "p"), sub(&p, 7, "p")]);
        let m = map_edits(&p, &gt, &pred, 3).unwrap();
        let wraps: Vec<_> = m.records.iter().filter(|r| r.kind == MatchKind::Wrap).collect();
        assert_eq!(wraps.len(), 1);
        assert_eq!(wraps[0].pred_block.start, 4, "ties go to the earlier block");
        assert_eq!(m.unmatched_pred.len(), 1);
    }
}
