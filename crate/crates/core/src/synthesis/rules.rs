// SPDX-License-Identifier: Apache-2.0

//! Subject-language line classification and edit eligibility.

use std::collections::BTreeSet;

use serde::Deserialize;

use super::Operation;
use crate::program::SourceProgram;

const PYTHON_RULES: &str = include_str!("../../assets/python_rules.toml");

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageRules {
    pub comment_prefix: String,
    pub block_opener_suffix: String,
    pub header_prefixes: Vec<String>,
    pub import_prefixes: Vec<String>,
    pub indent_unit: String,
}

impl LanguageRules {
    pub fn python() -> Self {
        Self::from_toml(PYTHON_RULES).expect("bundled rules parse")
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Blank,
    Comment,
    Header,
    Import,
    /// Starts an indented block (`if`, `for`, `while`, ...).
    Opener,
    Statement,
}

pub fn indentation(line: &str) -> &str {
    &line[..line.len() - line.trim_start().len()]
}

/// Byte offset where a trailing comment starts, skipping quoted text.
pub fn code_end(line: &str, comment_prefix: &str) -> usize {
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match quote {
            Some(q) => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    quote = None;
                }
            }
            None if c == '\'' || c == '"' => quote = Some(c),
            None if line[i..].starts_with(comment_prefix) => return i,
            None => {}
        }
    }
    line.len()
}

pub fn classify(program: &SourceProgram, rules: &LanguageRules) -> Vec<LineKind> {
    let lines = program.lines();
    let mut kinds: Vec<LineKind> = lines
        .iter()
        .map(|line| {
            let t = line.trim();
            if t.is_empty() {
                LineKind::Blank
            } else if t.starts_with(&rules.comment_prefix) {
                LineKind::Comment
            } else if rules.header_prefixes.iter().any(|p| t.starts_with(p.as_str())) {
                LineKind::Header
            } else if rules.import_prefixes.iter().any(|p| t.starts_with(p.as_str())) {
                LineKind::Import
            } else if line[..code_end(line, &rules.comment_prefix)].trim_end().ends_with(&rules.block_opener_suffix) {
                LineKind::Opener
            } else {
                LineKind::Statement
            }
        })
        .collect();
    // A statement followed by a deeper line also opens a block (e.g. a
    // wrapped header the suffix test missed).
    let code: Vec<usize> = (0..lines.len()).filter(|&i| is_code(kinds[i])).collect();
    for w in code.windows(2) {
        let (a, b) = (w[0], w[1]);
        if kinds[a] == LineKind::Statement && indentation(&lines[b]).len() > indentation(&lines[a]).len() {
            kinds[a] = LineKind::Opener;
        }
    }
    kinds
}

fn is_code(kind: LineKind) -> bool {
    !matches!(kind, LineKind::Blank | LineKind::Comment)
}

/// 1-based lines an operation of the given kind may target.
///
/// Deletion skips block openers and statements that are the only body line
/// of their block. Every operation skips headers, blank and comment lines,
/// and imports unless `allow_imports`.
pub fn eligible_lines(
    program: &SourceProgram,
    operation: Operation,
    rules: &LanguageRules,
    allow_imports: bool,
) -> BTreeSet<usize> {
    let lines = program.lines();
    let kinds = classify(program, rules);
    let code: Vec<usize> = (0..lines.len()).filter(|&i| is_code(kinds[i])).collect();
    let indent = |i: usize| indentation(&lines[i]).len();
    let mut out = BTreeSet::new();
    for (pos, &i) in code.iter().enumerate() {
        let editable = match kinds[i] {
            LineKind::Statement | LineKind::Opener => true,
            LineKind::Import => allow_imports,
            _ => false,
        };
        if !editable {
            continue;
        }
        if operation == Operation::Deletion {
            if kinds[i] == LineKind::Opener {
                continue;
            }
            let opens_block = pos > 0 && indent(code[pos - 1]) < indent(i);
            let closes_block = code.get(pos + 1).is_none_or(|&n| indent(n) < indent(i));
            if opens_block && closes_block {
                continue;
            }
        }
        out.insert(i + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SRC: &str = "\
def f(xs):
    # sum the positives
    total = 0
    for x in xs:
        if x > 0:
            total += x

    return total
";

    #[test]
    fn classification() {
        let p = SourceProgram::from_text(SRC);
        use LineKind::*;
        assert_eq!(
            classify(&p, &LanguageRules::python()),
            [Header, Comment, Statement, Opener, Opener, Statement, Blank, Statement]
        );
    }

    #[test]
    fn deletion_skips_openers_and_sole_bodies() {
        let p = SourceProgram::from_text(SRC);
        let r = LanguageRules::python();
        assert_eq!(eligible_lines(&p, Operation::Deletion, &r, false), BTreeSet::from([3, 8]));
        assert_eq!(eligible_lines(&p, Operation::Substitution, &r, false), BTreeSet::from([3, 4, 5, 6, 8]));
    }

    #[test]
    fn straight_line_body_is_fully_substitutable() {
        let p = SourceProgram::from_text("def g(a):\n    b = a\n    c = b\n    d = c\n    e = d\n    return e\n");
        let r = LanguageRules::python();
        assert_eq!(eligible_lines(&p, Operation::Substitution, &r, false), BTreeSet::from([2, 3, 4, 5, 6]));
        assert_eq!(eligible_lines(&p, Operation::Deletion, &r, false).len(), 5);
    }

    #[test]
    fn imports_need_permission() {
        let p = SourceProgram::from_text("import math\nx = math.pi\n");
        let r = LanguageRules::python();
        assert_eq!(eligible_lines(&p, Operation::Substitution, &r, false), BTreeSet::from([2]));
        assert_eq!(eligible_lines(&p, Operation::Substitution, &r, true), BTreeSet::from([1, 2]));
    }

    #[test]
    fn comment_detection_ignores_quotes() {
        assert_eq!(code_end("s = '#' # c", "#"), 8);
        assert_eq!(code_end("x = 1", "#"), 5);
    }
}
