// SPDX-License-Identifier: Apache-2.0

//! Edit-level precision, bug-level recall, and their aggregation.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::edit::{compute_diff, EditError, EditScript};
use crate::exec::{Sandbox, SandboxError, UnitSuite};
use crate::matching::{map_edits, MatchError, MatchKind, MatchSet};
use crate::program::SourceProgram;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("ground-truth script has no edits")]
    NoBugs,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("no scores to aggregate")]
    EmptyInput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleScore {
    pub precision: f64,
    pub recall: f64,
    /// 1 if the full predicted program passes the suite.
    pub unit: u8,
    pub k: usize,
    pub epsilon: usize,
    /// Numerator of precision.
    pub essential_total: usize,
    /// Denominator of precision: edits in the predicted diff.
    pub pred_edits: usize,
    /// Numerator of recall.
    pub fixed_bugs: usize,
    /// Per ground-truth block, whether a verified match fixed it.
    pub block_fixed: Vec<bool>,
}

impl ExampleScore {
    /// The score of a response from which no program could be extracted.
    pub fn no_edit(k: usize, epsilon: usize) -> Self {
        ExampleScore {
            precision: 0.0,
            recall: 0.0,
            unit: 0,
            k,
            epsilon,
            essential_total: 0,
            pred_edits: 0,
            fixed_bugs: 0,
            block_fixed: vec![false; k],
        }
    }

    pub fn is_perfect(&self) -> bool {
        self.precision == 1.0 && self.recall == 1.0 && self.unit == 1
    }
}

/// Upper bound on essential edits credited to a match: the sum over its GT
/// blocks of (block edits + epsilon).
pub fn essential_cap(matchset: &MatchSet, gt_indices: &[usize], epsilon: usize) -> usize {
    gt_indices.iter().map(|&g| matchset.gt_blocks[g].edits.len() + epsilon).sum()
}

/// Verifies each match and finds its essential size: the shortest contiguous
/// run of the predicted block's edits that still fixes the matched bugs,
/// searched shortest-first then lowest-start, and capped.
pub fn essential_edits(
    matchset: &mut MatchSet,
    buggy: &SourceProgram,
    epsilon: usize,
    suite: &UnitSuite,
    sandbox: &Sandbox,
) -> Result<(), ScoreError> {
    for i in 0..matchset.records.len() {
        let record = &matchset.records[i];
        if record.kind == MatchKind::Exact {
            let r = &mut matchset.records[i];
            r.success = Some(true);
            r.essential_size = 1;
            continue;
        }
        let tester = record.tester.as_ref().expect("non-exact records carry a tester");
        if !sandbox.passes(tester, suite)? {
            let r = &mut matchset.records[i];
            r.success = Some(false);
            r.essential_size = 0;
            continue;
        }
        let m = record.pred_block.edits.len();
        let limit = essential_cap(matchset, &record.gt_indices, epsilon).min(m);
        let mut size = limit;
        'search: for len in 1..limit {
            for start in 0..=m - len {
                let candidate = record.tester_for(buggy, &matchset.gt_blocks, start, start + len)?;
                if sandbox.passes(&candidate, suite)? {
                    size = len;
                    break 'search;
                }
            }
        }
        let r = &mut matchset.records[i];
        r.success = Some(true);
        r.essential_size = size;
    }
    Ok(())
}

/// Scores one predicted program against the ground-truth fix of a buggy program.
pub fn score_example(
    buggy: &SourceProgram,
    gt_script: &EditScript,
    predicted: &SourceProgram,
    suite: &UnitSuite,
    epsilon: usize,
    stride: usize,
    sandbox: &Sandbox,
) -> Result<(ExampleScore, MatchSet), ScoreError> {
    if gt_script.is_empty() {
        return Err(ScoreError::NoBugs);
    }
    let pred_script = compute_diff(buggy, predicted);
    let mut matchset = map_edits(buggy, gt_script, &pred_script, stride)?;
    essential_edits(&mut matchset, buggy, epsilon, suite, sandbox)?;
    let k = matchset.gt_blocks.len();

    let mut block_fixed = vec![false; k];
    let mut essential_total = 0;
    for r in matchset.records.iter().filter(|r| r.success == Some(true)) {
        essential_total += r.essential_size;
        for &g in &r.gt_indices {
            block_fixed[g] = true;
        }
    }
    let fixed_bugs = block_fixed.iter().filter(|f| **f).count();
    let pred_edits = matchset.total_pred_edits;
    let precision = if pred_edits == 0 { 0.0 } else { essential_total as f64 / pred_edits as f64 };
    let unit = u8::from(sandbox.passes(predicted, suite)?);
    let score = ExampleScore {
        precision,
        recall: fixed_bugs as f64 / k as f64,
        unit,
        k,
        epsilon,
        essential_total,
        pred_edits,
        fixed_bugs,
        block_fixed,
    };
    Ok((score, matchset))
}

/// Per-block labels used for category and generator breakdowns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLabel {
    pub category: String,
    pub generator: String,
}

/// A score plus the labels it is grouped by.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledScore {
    pub score: ExampleScore,
    /// Free-form example tags such as `source`.
    #[serde(default)]
    pub tags: BTreeMap<String, String>,
    #[serde(default)]
    pub blocks: Vec<BlockLabel>,
}

impl From<ExampleScore> for LabeledScore {
    fn from(score: ExampleScore) -> Self {
        LabeledScore { score, tags: BTreeMap::new(), blocks: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Means {
    pub precision: f64,
    pub recall: f64,
    /// Fraction of examples whose prediction passes the suite.
    pub unit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub count: usize,
    pub means: Means,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecall {
    pub blocks: usize,
    pub fixed: usize,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub count: usize,
    /// Unweighted mean of the per-bug-count means.
    pub overall: Means,
    pub by_bug_count: BTreeMap<usize, Group>,
    /// tag name → tag value → group, each averaged the same way as `overall`.
    pub by_tag: BTreeMap<String, BTreeMap<String, Group>>,
    pub by_category: BTreeMap<String, BlockRecall>,
    pub by_generator: BTreeMap<String, BlockRecall>,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Averages within each bug count, then averages those means.
fn mean_of_means(scores: &[&ExampleScore]) -> (Means, BTreeMap<usize, Group>) {
    let mut by_k: BTreeMap<usize, Vec<&ExampleScore>> = BTreeMap::new();
    for s in scores {
        by_k.entry(s.k).or_default().push(s);
    }
    let groups: BTreeMap<usize, Group> = by_k
        .into_iter()
        .map(|(k, v)| {
            let means = Means {
                precision: mean(v.iter().map(|s| s.precision)),
                recall: mean(v.iter().map(|s| s.recall)),
                unit: mean(v.iter().map(|s| s.unit as f64)),
            };
            (k, Group { count: v.len(), means })
        })
        .collect();
    let overall = Means {
        precision: mean(groups.values().map(|g| g.means.precision)),
        recall: mean(groups.values().map(|g| g.means.recall)),
        unit: mean(groups.values().map(|g| g.means.unit)),
    };
    (overall, groups)
}

pub fn aggregate(scores: &[LabeledScore]) -> Result<Report, AggregateError> {
    if scores.is_empty() {
        return Err(AggregateError::EmptyInput);
    }
    let all: Vec<&ExampleScore> = scores.iter().map(|s| &s.score).collect();
    let (overall, by_bug_count) = mean_of_means(&all);

    let mut tagged: BTreeMap<String, BTreeMap<String, Vec<&ExampleScore>>> = BTreeMap::new();
    for s in scores {
        for (name, value) in &s.tags {
            tagged.entry(name.clone()).or_default().entry(value.clone()).or_default().push(&s.score);
        }
    }
    let by_tag = tagged
        .into_iter()
        .map(|(name, values)| {
            let groups = values
                .into_iter()
                .map(|(value, v)| (value, Group { count: v.len(), means: mean_of_means(&v).0 }))
                .collect();
            (name, groups)
        })
        .collect();

    let mut by_category: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut by_generator: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for s in scores {
        for (label, fixed) in s.blocks.iter().zip(&s.score.block_fixed) {
            for (map, key) in [(&mut by_category, &label.category), (&mut by_generator, &label.generator)] {
                let e = map.entry(key.clone()).or_default();
                e.0 += 1;
                e.1 += usize::from(*fixed);
            }
        }
    }
    let finish = |m: BTreeMap<String, (usize, usize)>| {
        m.into_iter()
            .map(|(k, (blocks, fixed))| (k, BlockRecall { blocks, fixed, recall: fixed as f64 / blocks as f64 }))
            .collect()
    };
    Ok(Report {
        count: scores.len(),
        overall,
        by_bug_count,
        by_tag,
        by_category: finish(by_category),
        by_generator: finish(by_generator),
    })
}

impl Report {
    /// Plain-text table for terminals.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, label: &str, n: usize, m: &Means| {
            let _ = writeln!(out, "{label:<28} {n:>6} {:>9.4} {:>9.4} {:>8.2}%", m.precision, m.recall, m.unit * 100.0);
        };
        let _ = writeln!(out, "{:<28} {:>6} {:>9} {:>9} {:>9}", "group", "n", "precision", "recall", "unit");
        row(&mut out, "overall", self.count, &self.overall);
        for (k, g) in &self.by_bug_count {
            row(&mut out, &format!("bugs={k}"), g.count, &g.means);
        }
        for (name, values) in &self.by_tag {
            for (value, g) in values {
                row(&mut out, &format!("{name}={value}"), g.count, &g.means);
            }
        }
        for (title, map) in [("category", &self.by_category), ("generator", &self.by_generator)] {
            if map.is_empty() {
                continue;
            }
            let _ = writeln!(out, "\n{:<28} {:>6} {:>9}", format!("{title} (block recall)"), "blocks", "recall");
            for (k, r) in map {
                let _ = writeln!(out, "{k:<28} {:>6} {:>9.4}", r.blocks, r.recall);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(k: usize, p: f64) -> LabeledScore {
        let mut s = ExampleScore::no_edit(k, 1);
        s.precision = p;
        s.recall = p;
        LabeledScore::from(s)
    }

    #[test]
    fn mean_of_means_fixture() {
        let r = aggregate(&[score(1, 1.0), score(1, 0.5), score(2, 0.0)]).unwrap();
        assert_eq!(r.by_bug_count[&1].means.precision, 0.75);
        assert_eq!(r.by_bug_count[&2].means.precision, 0.0);
        assert_eq!(r.overall.precision, 0.375);
    }

    #[test]
    fn single_and_uniform() {
        let r = aggregate(&[score(3, 0.25)]).unwrap();
        assert_eq!(r.overall.recall, 0.25);
        let r = aggregate(&[score(1, 0.8), score(2, 0.8), score(2, 0.8), score(4, 0.8)]).unwrap();
        assert!((r.overall.precision - 0.8).abs() < 1e-12);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(aggregate(&[]), Err(AggregateError::EmptyInput));
    }

    #[test]
    fn block_level_breakdowns() {
        let mut a = score(2, 0.5);
        a.score.block_fixed = vec![true, false];
        a.blocks = vec![
            BlockLabel { category: "Checking".into(), generator: "mutation".into() },
            BlockLabel { category: "Algorithm".into(), generator: "mutation".into() },
        ];
        a.tags.insert("source".into(), "toy".into());
        let r = aggregate(&[a]).unwrap();
        assert_eq!(r.by_category["Checking"].recall, 1.0);
        assert_eq!(r.by_category["Algorithm"].recall, 0.0);
        assert_eq!(r.by_generator["mutation"].recall, 0.5);
        assert_eq!(r.by_tag["source"]["toy"].count, 1);
        assert!(r.render().contains("bugs=2"));
    }
}
