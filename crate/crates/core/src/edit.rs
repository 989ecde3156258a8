// SPDX-License-Identifier: Apache-2.0

//! Line-level edit scripts: diff, apply, reverse, and block grouping.
//!
//! Every script is expressed in the coordinates of one base program, named by
//! its content hash. Lines are 1-based; `insert_after 0` inserts at the top.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::program::{normalize, SourceProgram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EditError {
    #[error("script targets program {expected} but was applied to {actual}")]
    StaleScript { expected: String, actual: String },
    #[error("line {line}: script expects {expected:?} but the program has {found:?}")]
    BeforeMismatch { line: usize, expected: String, found: String },
    #[error("line {line} is outside a program of {len} lines")]
    LineOutOfRange { line: usize, len: usize },
    #[error("line {line} is substituted or deleted more than once")]
    ConflictingEdits { line: usize },
    #[error("substitution at line {line} leaves the text unchanged")]
    NoOpEdit { line: usize },
    #[error("malformed edit at line {line}: {reason}")]
    MalformedEdit { line: usize, reason: &'static str },
    #[error("blocks overlap at line {line}")]
    OverlappingBlocks { line: usize },
}

/// Declared in lexicographic order so that the derived `Ord` matches the
/// serialized sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditOp {
    Delete,
    InsertAfter,
    Substitute,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineEdit {
    pub op: EditOp,
    pub line: usize,
    #[serde(default)]
    pub before: String,
    #[serde(default)]
    pub after: String,
}

impl LineEdit {
    pub fn substitute(line: usize, before: impl Into<String>, after: impl Into<String>) -> Self {
        LineEdit { op: EditOp::Substitute, line, before: before.into(), after: after.into() }
    }

    pub fn delete(line: usize, before: impl Into<String>) -> Self {
        LineEdit { op: EditOp::Delete, line, before: before.into(), after: String::new() }
    }

    pub fn insert_after(line: usize, after: impl Into<String>) -> Self {
        LineEdit { op: EditOp::InsertAfter, line, before: String::new(), after: after.into() }
    }

    /// Same operation and content, ignoring position.
    pub fn same_change(&self, other: &LineEdit) -> bool {
        self.op == other.op
            && normalize(&self.before) == normalize(&other.before)
            && normalize(&self.after) == normalize(&other.after)
    }

    /// Same operation, position, and content.
    pub fn equivalent(&self, other: &LineEdit) -> bool {
        self.line == other.line && self.same_change(other)
    }

    fn validate(&self) -> Result<(), EditError> {
        let malformed = |reason| Err(EditError::MalformedEdit { line: self.line, reason });
        if self.before.contains('\n') || self.after.contains('\n') {
            return malformed("edit text spans several lines");
        }
        match self.op {
            EditOp::Substitute => {
                if self.line == 0 {
                    return malformed("substitution at line 0");
                }
                if self.before == self.after {
                    return Err(EditError::NoOpEdit { line: self.line });
                }
            }
            EditOp::Delete => {
                if self.line == 0 {
                    return malformed("deletion at line 0");
                }
                if !self.after.is_empty() {
                    return malformed("deletion carries replacement text");
                }
            }
            EditOp::InsertAfter => {
                if !self.before.is_empty() {
                    return malformed("insertion carries original text");
                }
            }
        }
        Ok(())
    }
}

/// A validated set of line edits against one base program.
///
/// Edits are kept sorted by `(line, op)`. Several insertions after the same
/// line are allowed and keep their declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawScript")]
pub struct EditScript {
    base_hash: String,
    edits: Vec<LineEdit>,
}

#[derive(Deserialize)]
struct RawScript {
    base_hash: String,
    edits: Vec<LineEdit>,
}

impl TryFrom<RawScript> for EditScript {
    type Error = EditError;

    fn try_from(raw: RawScript) -> Result<Self, Self::Error> {
        EditScript::new(raw.base_hash, raw.edits)
    }
}

impl EditScript {
    pub fn new(base_hash: impl Into<String>, mut edits: Vec<LineEdit>) -> Result<Self, EditError> {
        for e in &edits {
            e.validate()?;
        }
        edits.sort_by_key(|e| (e.line, e.op));
        let mut replaced = BTreeSet::new();
        for e in edits.iter().filter(|e| e.op != EditOp::InsertAfter) {
            if !replaced.insert(e.line) {
                return Err(EditError::ConflictingEdits { line: e.line });
            }
        }
        Ok(EditScript { base_hash: base_hash.into(), edits })
    }

    pub fn empty(base_hash: impl Into<String>) -> Self {
        EditScript { base_hash: base_hash.into(), edits: Vec::new() }
    }

    pub fn base_hash(&self) -> &str {
        &self.base_hash
    }

    pub fn edits(&self) -> &[LineEdit] {
        &self.edits
    }

    pub fn into_edits(self) -> Vec<LineEdit> {
        self.edits
    }

    pub fn len(&self) -> usize {
        self.edits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edits.is_empty()
    }

    /// Distinct line indices touched by the script.
    pub fn lines(&self) -> BTreeSet<usize> {
        self.edits.iter().map(|e| e.line).collect()
    }
}

/// A maximal run of edits on consecutive line indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditBlock {
    pub start: usize,
    pub end: usize,
    pub edits: Vec<LineEdit>,
}

impl EditBlock {
    pub fn span(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn overlaps(&self, other: &EditBlock) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn covers(&self, line: usize) -> bool {
        self.start <= line && line <= self.end
    }

    /// Contiguous sub-run `edits[from..to]` as its own block.
    pub fn sub_block(&self, from: usize, to: usize) -> EditBlock {
        let edits = self.edits[from..to].to_vec();
        EditBlock { start: edits[0].line, end: edits[edits.len() - 1].line, edits }
    }
}

/// Canonical line diff: `apply_edits(&compute_diff(a, b), a) == b` byte for byte.
///
/// Lines are aligned by a longest common subsequence on exact text. When the
/// alignment is ambiguous the later match wins, which anchors edits at the
/// earliest line where the programs diverge.
pub fn compute_diff(original: &SourceProgram, revised: &SourceProgram) -> EditScript {
    let a = original.lines();
    let b = revised.lines();
    let (mut n, mut m) = (a.len(), b.len());
    while n > 0 && m > 0 && a[n - 1] == b[m - 1] {
        n -= 1;
        m -= 1;
    }

    let w = m + 1;
    let mut table = vec![0u32; (n + 1) * w];
    for i in 1..=n {
        for j in 1..=m {
            table[i * w + j] = if a[i - 1] == b[j - 1] {
                table[(i - 1) * w + j - 1] + 1
            } else {
                table[(i - 1) * w + j].max(table[i * w + j - 1])
            };
        }
    }

    let mut matches = vec![(a.len(), b.len())];
    matches.extend((0..a.len() - n).rev().map(|k| (n + k, m + k)));
    let (mut i, mut j) = (n, m);
    while i > 0 && j > 0 {
        if a[i - 1] == b[j - 1] {
            matches.push((i - 1, j - 1));
            i -= 1;
            j -= 1;
        } else if table[(i - 1) * w + j] >= table[i * w + j - 1] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    matches.reverse();

    let mut edits = Vec::new();
    let (mut pi, mut pj) = (0usize, 0usize);
    for (ai, bj) in matches {
        let (gap_a, gap_b) = (ai - pi, bj - pj);
        let common = gap_a.min(gap_b);
        for k in 0..common {
            edits.push(LineEdit::substitute(pi + k + 1, a[pi + k].clone(), b[pj + k].clone()));
        }
        for k in common..gap_a {
            edits.push(LineEdit::delete(pi + k + 1, a[pi + k].clone()));
        }
        for k in common..gap_b {
            edits.push(LineEdit::insert_after(pi + gap_a, b[pj + k].clone()));
        }
        pi = ai + 1;
        pj = bj + 1;
    }
    EditScript::new(original.content_hash(), edits).expect("diff output is always a valid script")
}

/// Materializes `script` on `program`.
///
/// The result equals applying the edits one at a time in descending line
/// order; insertions after the same line land in declaration order.
pub fn apply_edits(program: &SourceProgram, script: &EditScript) -> Result<SourceProgram, EditError> {
    check_base(program, script)?;
    let (lines, _) = walk(program.lines(), &script.edits)?;
    Ok(SourceProgram::from_lines(lines))
}

/// The script that undoes `script`, in the coordinates of `apply_edits(base, script)`.
pub fn reverse_edits(script: &EditScript, base: &SourceProgram) -> Result<EditScript, EditError> {
    check_base(base, script)?;
    let (lines, reverse) = walk(base.lines(), &script.edits)?;
    let result = SourceProgram::from_lines(lines);
    EditScript::new(result.content_hash(), reverse)
}

/// Applies and also returns the reverse script; saves a second walk.
pub fn apply_with_reverse(
    program: &SourceProgram,
    script: &EditScript,
) -> Result<(SourceProgram, EditScript), EditError> {
    check_base(program, script)?;
    let (lines, reverse) = walk(program.lines(), &script.edits)?;
    let result = SourceProgram::from_lines(lines);
    let reverse = EditScript::new(result.content_hash(), reverse)?;
    Ok((result, reverse))
}

fn check_base(program: &SourceProgram, script: &EditScript) -> Result<(), EditError> {
    if program.content_hash() != script.base_hash {
        return Err(EditError::StaleScript {
            expected: script.base_hash.clone(),
            actual: program.content_hash().to_string(),
        });
    }
    Ok(())
}

fn walk(lines: &[String], edits: &[LineEdit]) -> Result<(Vec<String>, Vec<LineEdit>), EditError> {
    let n = lines.len();
    let mut replace: Vec<Option<&LineEdit>> = vec![None; n + 1];
    let mut inserts: Vec<Vec<&LineEdit>> = vec![Vec::new(); n + 1];
    for e in edits {
        if e.line > n || (e.line == 0 && e.op != EditOp::InsertAfter) {
            return Err(EditError::LineOutOfRange { line: e.line, len: n });
        }
        if e.op == EditOp::InsertAfter {
            inserts[e.line].push(e);
            continue;
        }
        let found = &lines[e.line - 1];
        if normalize(found) != normalize(&e.before) {
            return Err(EditError::BeforeMismatch { line: e.line, expected: e.before.clone(), found: found.clone() });
        }
        if replace[e.line].replace(e).is_some() {
            return Err(EditError::ConflictingEdits { line: e.line });
        }
    }

    let mut out = Vec::with_capacity(n + edits.len());
    let mut reverse = Vec::with_capacity(edits.len());
    for i in 0..=n {
        if i > 0 {
            let original = &lines[i - 1];
            match replace[i] {
                None => out.push(original.clone()),
                Some(e) if e.op == EditOp::Substitute => {
                    out.push(e.after.clone());
                    if e.after != *original {
                        reverse.push(LineEdit::substitute(out.len(), e.after.clone(), original.clone()));
                    }
                }
                Some(_) => reverse.push(LineEdit::insert_after(out.len(), original.clone())),
            }
        }
        for e in &inserts[i] {
            out.push(e.after.clone());
            reverse.push(LineEdit::delete(out.len(), e.after.clone()));
        }
    }
    Ok((out, reverse))
}

/// Groups a script into maximal blocks of consecutive line indices, ascending.
pub fn parse_to_blocks(script: &EditScript) -> Vec<EditBlock> {
    blocks_of(&script.edits)
}

/// Block grouping for an edit list already sorted by line.
pub fn blocks_of(edits: &[LineEdit]) -> Vec<EditBlock> {
    let mut blocks: Vec<EditBlock> = Vec::new();
    for e in edits {
        match blocks.last_mut() {
            Some(b) if e.line <= b.end + 1 => {
                b.end = b.end.max(e.line);
                b.edits.push(e.clone());
            }
            _ => blocks.push(EditBlock { start: e.line, end: e.line, edits: vec![e.clone()] }),
        }
    }
    blocks
}

/// Unions line-disjoint blocks back into one script.
pub fn merge_blocks(base_hash: &str, blocks: &[EditBlock]) -> Result<EditScript, EditError> {
    let mut sorted: Vec<&EditBlock> = blocks.iter().collect();
    sorted.sort_by_key(|b| (b.start, b.end));
    for pair in sorted.windows(2) {
        if pair[0].overlaps(pair[1]) {
            return Err(EditError::OverlappingBlocks { line: pair[1].start });
        }
    }
    EditScript::new(base_hash, sorted.iter().flat_map(|b| b.edits.iter().cloned()).collect())
}

/// Up to `width` lines on each side of `block`, stopping at the file
/// boundaries and at any line in `exclude`.
pub fn block_context(
    program: &SourceProgram,
    block: &EditBlock,
    width: usize,
    exclude: &BTreeSet<usize>,
) -> (Vec<String>, Vec<String>) {
    let lines = program.lines();
    let mut before = Vec::new();
    let mut l = block.start;
    while before.len() < width && l > 1 {
        l -= 1;
        if exclude.contains(&l) {
            break;
        }
        before.push(lines[l - 1].clone());
    }
    before.reverse();

    let mut after = Vec::new();
    let mut l = block.end;
    while after.len() < width && l < lines.len() {
        l += 1;
        if exclude.contains(&l) {
            break;
        }
        after.push(lines[l - 1].clone());
    }
    (before, after)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(lines: &[&str]) -> SourceProgram {
        SourceProgram::from_lines(lines.iter().copied())
    }

    #[test]
    fn identical_programs_have_empty_diff() {
        let p = prog(&["a=1", "b=2"]);
        assert!(compute_diff(&p, &p).is_empty());
    }

    #[test]
    fn single_substitution() {
        let a = prog(&["a=1", "b=2"]);
        let b = prog(&["a=1", "b=3"]);
        let d = compute_diff(&a, &b);
        assert_eq!(d.edits(), [LineEdit::substitute(2, "b=2", "b=3")]);
    }

    #[test]
    fn apply_substitution() {
        let p = prog(&["x=0", "y=1", "z=2"]);
        let s = EditScript::new(p.content_hash(), vec![LineEdit::substitute(2, "y=1", "y=9")]).unwrap();
        assert_eq!(apply_edits(&p, &s).unwrap().lines(), ["x=0", "y=9", "z=2"]);
    }

    #[test]
    fn delete_and_insert() {
        let p = prog(&["a", "b", "c"]);
        let s =
            EditScript::new(p.content_hash(), vec![LineEdit::insert_after(3, "d"), LineEdit::delete(2, "b")]).unwrap();
        assert_eq!(apply_edits(&p, &s).unwrap().lines(), ["a", "c", "d"]);
    }

    #[test]
    fn insert_at_top() {
        let p = prog(&["a"]);
        let s = EditScript::new(p.content_hash(), vec![LineEdit::insert_after(0, "z")]).unwrap();
        assert_eq!(apply_edits(&p, &s).unwrap().lines(), ["z", "a"]);
    }

    #[test]
    fn repeated_inserts_keep_declaration_order() {
        let p = prog(&["a", "b"]);
        let edits =
            vec![LineEdit::insert_after(1, "x"), LineEdit::substitute(2, "b", "B"), LineEdit::insert_after(1, "y")];
        let s = EditScript::new(p.content_hash(), edits).unwrap();
        assert_eq!(apply_edits(&p, &s).unwrap().lines(), ["a", "x", "y", "B"]);
    }

    #[test]
    fn stale_and_mismatched_scripts_fail() {
        let p = prog(&["a", "b"]);
        let q = prog(&["a", "c"]);
        let s = EditScript::new(p.content_hash(), vec![LineEdit::substitute(2, "b", "x")]).unwrap();
        assert!(matches!(apply_edits(&q, &s), Err(EditError::StaleScript { .. })));
        let wrong = EditScript::new(p.content_hash(), vec![LineEdit::substitute(2, "q", "x")]).unwrap();
        assert!(matches!(apply_edits(&p, &wrong), Err(EditError::BeforeMismatch { line: 2, .. })));
        let far = EditScript::new(p.content_hash(), vec![LineEdit::delete(3, "z")]).unwrap();
        assert!(matches!(apply_edits(&p, &far), Err(EditError::LineOutOfRange { line: 3, .. })));
    }

    #[test]
    fn before_check_ignores_trailing_whitespace() {
        let p = prog(&["a  ", "b"]);
        let s = EditScript::new(p.content_hash(), vec![LineEdit::substitute(1, "a", "c")]).unwrap();
        assert_eq!(apply_edits(&p, &s).unwrap().lines(), ["c", "b"]);
    }

    #[test]
    fn script_validation() {
        assert_eq!(EditScript::new("h", vec![LineEdit::substitute(1, "a", "a")]), Err(EditError::NoOpEdit { line: 1 }));
        assert_eq!(
            EditScript::new("h", vec![LineEdit::substitute(1, "a", "b"), LineEdit::delete(1, "a")]),
            Err(EditError::ConflictingEdits { line: 1 })
        );
        assert!(matches!(EditScript::new("h", vec![LineEdit::delete(0, "")]), Err(EditError::MalformedEdit { .. })));
    }

    #[test]
    fn reverse_swaps_substitution() {
        let p = prog(&["x=0", "y=1", "z=2"]);
        let s = EditScript::new(p.content_hash(), vec![LineEdit::substitute(2, "y=1", "y=9")]).unwrap();
        let r = reverse_edits(&s, &p).unwrap();
        assert_eq!(r.edits(), [LineEdit::substitute(2, "y=9", "y=1")]);
        let applied = apply_edits(&p, &s).unwrap();
        assert_eq!(apply_edits(&applied, &r).unwrap(), p);
    }

    #[test]
    fn reverse_of_empty_is_empty() {
        let p = prog(&["a"]);
        assert!(reverse_edits(&EditScript::empty(p.content_hash()), &p).unwrap().is_empty());
    }

    #[test]
    fn blocks_group_consecutive_lines() {
        let mk = |lines: &[usize]| {
            let edits = lines.iter().map(|&l| LineEdit::substitute(l, "a", "b")).collect();
            parse_to_blocks(&EditScript::new("h", edits).unwrap())
        };
        let spans = |bs: Vec<EditBlock>| bs.iter().map(|b| (b.start, b.end)).collect::<Vec<_>>();
        assert_eq!(spans(mk(&[4, 5, 6])), [(4, 6)]);
        assert_eq!(spans(mk(&[2, 7])), [(2, 2), (7, 7)]);
        assert_eq!(spans(mk(&[2, 3, 5])), [(2, 3), (5, 5)]);
    }

    #[test]
    fn merge_rejects_overlap() {
        let b1 = EditBlock {
            start: 2,
            end: 3,
            edits: vec![LineEdit::substitute(2, "a", "b"), LineEdit::substitute(3, "a", "b")],
        };
        let b2 = EditBlock { start: 3, end: 3, edits: vec![LineEdit::delete(3, "a")] };
        assert_eq!(merge_blocks("h", &[b1.clone(), b2]), Err(EditError::OverlappingBlocks { line: 3 }));
        assert!(merge_blocks("h", &[]).unwrap().is_empty());
        let b3 = EditBlock { start: 7, end: 7, edits: vec![LineEdit::delete(7, "a")] };
        assert_eq!(merge_blocks("h", &[b3, b1]).unwrap().lines(), BTreeSet::from([2, 3, 7]));
    }

    #[test]
    fn context_windows() {
        let p = SourceProgram::from_lines((1..=10).map(|i| format!("l{i}")));
        let block = EditBlock { start: 5, end: 6, edits: vec![] };
        let (before, after) = block_context(&p, &block, 3, &BTreeSet::new());
        assert_eq!(before, ["l2", "l3", "l4"]);
        assert_eq!(after, ["l7", "l8", "l9"]);
        let (before, _) = block_context(&p, &block, 3, &BTreeSet::from([4]));
        assert!(before.is_empty());
        let (before, _) = block_context(&p, &block, 3, &BTreeSet::from([3]));
        assert_eq!(before, ["l4"]);
        let top = EditBlock { start: 1, end: 1, edits: vec![] };
        assert!(block_context(&p, &top, 3, &BTreeSet::new()).0.is_empty());
    }

    #[test]
    fn serialized_shape() {
        let s =
            EditScript::new("abc", vec![LineEdit::substitute(2, "x", "y"), LineEdit::insert_after(1, "z")]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(
            json,
            r#"{"base_hash":"abc","edits":[{"op":"insert_after","line":1,"before":"","after":"z"},{"op":"substitute","line":2,"before":"x","after":"y"}]}"#
        );
        assert_eq!(serde_json::from_str::<EditScript>(&json).unwrap(), s);
        let bad = r#"{"base_hash":"abc","edits":[{"op":"substitute","line":2,"before":"x","after":"x"}]}"#;
        assert!(serde_json::from_str::<EditScript>(bad).is_err());
    }
}
