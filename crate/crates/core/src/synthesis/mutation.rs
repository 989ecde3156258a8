// SPDX-License-Identifier: Apache-2.0

//! Rule-based mutation operators; an offline stand-in for model generators.

use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use regex::{Captures, Regex};

use super::rules::{code_end, indentation, LanguageRules};
use super::{BugSpec, Operation};
use crate::program::SourceProgram;
use crate::taxonomy::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    /// `<` ↔ `>=`, `==` ↔ `!=`, ...
    CompareFlip,
    /// `<` ↔ `<=`, `range(n)` → `range(n - 1)`, `len(x)` → `len(x) - 1`.
    Boundary,
    /// `if c:` → `if not (c):`.
    NegateCondition,
    AndOr,
    BoolFlip,
    MembershipFlip,
    /// `+` ↔ `-`, `*` → `+`, `//` ↔ `%`, and the augmented forms.
    ArithSwap,
    /// `a - b` → `b - a` for non-commutative operators.
    OperandSwap,
    /// Integer literal ± 1.
    Constant,
    /// Drops the last argument of a call.
    ArgDrop,
    /// Calls a method name the receiver does not provide.
    MethodSwap,
    /// Misspells a name that is read.
    NameTypo,
}

impl Rule {
    pub const ALL: [Rule; 12] = [
        Rule::CompareFlip,
        Rule::Boundary,
        Rule::NegateCondition,
        Rule::AndOr,
        Rule::BoolFlip,
        Rule::MembershipFlip,
        Rule::ArithSwap,
        Rule::OperandSwap,
        Rule::Constant,
        Rule::ArgDrop,
        Rule::MethodSwap,
        Rule::NameTypo,
    ];

    /// Rules that best express a taxonomy entry, most specific first.
    pub fn preferred(category: Category, subcategory: &str) -> &'static [Rule] {
        use Rule::*;
        match (category, subcategory) {
            (Category::Checking, "Off-by-One Error") => &[Boundary],
            (Category::Checking, "Negation Error") => &[CompareFlip, NegateCondition],
            (Category::Checking, "Chained Boolean Comparison Logic") => &[AndOr, CompareFlip],
            (Category::Checking, "Implicit Boolean Conversion") => &[NegateCondition],
            (Category::Checking, "Membership Logic Flaws") => &[MembershipFlip],
            (Category::Checking, _) => &[CompareFlip, Boundary, NegateCondition],
            (Category::Algorithm, "Wrong Math Expression") => &[ArithSwap, OperandSwap, Constant],
            (Category::Algorithm, "Function Argument Misunderstanding") => &[ArgDrop],
            (Category::Algorithm, "Function Algorithm Misunderstanding") => &[MethodSwap, ArgDrop],
            (Category::Algorithm, _) => &[ArithSwap, OperandSwap],
            (Category::Assignment, "Name Error" | "Variable Shadowing" | "Built-in Shadowing") => &[NameTypo],
            (Category::Assignment, _) => &[Constant, BoolFlip],
            (Category::BuildPackageMerge, _) => &[MethodSwap, ArgDrop],
            (Category::TimingSerialization, _) => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no mutable site on the candidate lines")]
pub struct NoMutableSite;

fn re(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("static pattern"))
}

/// Byte ranges of quoted literals within `code`.
fn string_spans(code: &str) -> Vec<(usize, usize)> {
    static STR: OnceLock<Regex> = OnceLock::new();
    re(&STR, r#"'(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*""#).find_iter(code).map(|m| (m.start(), m.end())).collect()
}

const KEYWORDS: &[&str] = &[
    "and", "as", "assert", "break", "class", "continue", "def", "del", "elif", "else", "except", "False", "finally",
    "for", "from", "global", "if", "import", "in", "is", "lambda", "None", "nonlocal", "not", "or", "pass", "raise",
    "return", "True", "try", "while", "with", "yield",
];

const METHOD_SWAPS: &[(&str, &str)] = &[
    ("append", "push"),
    ("extend", "concat"),
    ("get", "fetch"),
    ("items", "iteritems"),
    ("join", "joinall"),
    ("split", "tokenize"),
    ("pop", "take"),
    ("strip", "trim"),
    ("keys", "iterkeys"),
    ("lower", "lowercase"),
];

/// Every single-site rewrite of `line` under `rule`, in left-to-right order.
pub fn mutants(line: &str, rule: Rule, rules: &LanguageRules) -> Vec<String> {
    let end = code_end(line, &rules.comment_prefix);
    let code = &line[..end];
    let strings = string_spans(code);
    let in_string = |s: usize, e: usize| strings.iter().any(|&(a, b)| s < b && a < e);
    let trimmed = code.trim_start();
    let mut out = Vec::new();
    let mut push = |s: usize, e: usize, replacement: String| {
        if in_string(s, e) || code[s..e] == replacement {
            return;
        }
        out.push(format!("{}{}{}", &code[..s], replacement, &line[e..]));
    };
    let each = |pattern: &Regex, f: &mut dyn FnMut(&Captures)| {
        for c in pattern.captures_iter(code) {
            f(&c);
        }
    };
    static CMP: OnceLock<Regex> = OnceLock::new();
    static RANGE: OnceLock<Regex> = OnceLock::new();
    static LEN: OnceLock<Regex> = OnceLock::new();
    static COND: OnceLock<Regex> = OnceLock::new();
    static ANDOR: OnceLock<Regex> = OnceLock::new();
    static BOOL: OnceLock<Regex> = OnceLock::new();
    static MEMBER: OnceLock<Regex> = OnceLock::new();
    static ARITH: OnceLock<Regex> = OnceLock::new();
    static OPERANDS: OnceLock<Regex> = OnceLock::new();
    static INT: OnceLock<Regex> = OnceLock::new();
    static CALL: OnceLock<Regex> = OnceLock::new();
    static METHOD: OnceLock<Regex> = OnceLock::new();
    static NAME: OnceLock<Regex> = OnceLock::new();
    match rule {
        Rule::CompareFlip | Rule::Boundary => {
            let table: &[(&str, &str)] = if rule == Rule::CompareFlip {
                &[("<", ">="), ("<=", ">"), (">", "<="), (">=", "<"), ("==", "!="), ("!=", "==")]
            } else {
                &[("<", "<="), ("<=", "<"), (">", ">="), (">=", ">")]
            };
            each(re(&CMP, r"(?:[<>=!]=|[<>])[<>=]?"), &mut |c| {
                let m = c.get(0).unwrap();
                if let Some(&(_, to)) = table.iter().find(|(from, _)| *from == m.as_str()) {
                    push(m.start(), m.end(), to.to_string());
                }
            });
            if rule == Rule::Boundary {
                each(re(&RANGE, r"\brange\(([^()]*)\)"), &mut |c| {
                    let m = c.get(0).unwrap();
                    push(m.start(), m.end(), format!("range({} - 1)", &c[1]));
                });
                each(re(&LEN, r"\blen\([^()]*\)"), &mut |c| {
                    let m = c.get(0).unwrap();
                    push(m.start(), m.end(), format!("{} - 1", m.as_str()));
                });
            }
        }
        Rule::NegateCondition => {
            if let Some(c) = re(&COND, r"^(\s*)(if|elif|while) (.+):\s*$").captures(code) {
                let cond = c.get(3).unwrap();
                push(cond.start(), cond.end(), format!("not ({})", cond.as_str()));
            }
        }
        Rule::AndOr => each(re(&ANDOR, r"\b(and|or)\b"), &mut |c| {
            let m = c.get(0).unwrap();
            push(m.start(), m.end(), if m.as_str() == "and" { "or" } else { "and" }.into());
        }),
        Rule::BoolFlip => each(re(&BOOL, r"\b(True|False)\b"), &mut |c| {
            let m = c.get(0).unwrap();
            push(m.start(), m.end(), if m.as_str() == "True" { "False" } else { "True" }.into());
        }),
        Rule::MembershipFlip => {
            if !trimmed.starts_with("for ") {
                each(re(&MEMBER, r" (not in|in) "), &mut |c| {
                    let m = c.get(0).unwrap();
                    push(m.start(), m.end(), if &c[1] == "in" { " not in " } else { " in " }.into());
                });
            }
        }
        Rule::ArithSwap => each(re(&ARITH, r" (\+=|-=|\+|-|\*|//|%) "), &mut |c| {
            let m = c.get(0).unwrap();
            let to = match &c[1] {
                "+=" => "-=",
                "-=" => "+=",
                "+" => "-",
                "-" => "+",
                "*" => "+",
                "//" => "%",
                _ => "//",
            };
            push(m.start(), m.end(), format!(" {to} "));
        }),
        Rule::OperandSwap => each(re(&OPERANDS, r"\b([A-Za-z_]\w*|\d+) (-|//|/|%) ([A-Za-z_]\w*|\d+)\b"), &mut |c| {
            let m = c.get(0).unwrap();
            push(m.start(), m.end(), format!("{} {} {}", &c[3], &c[2], &c[1]));
        }),
        Rule::Constant => each(re(&INT, r"(^|[^\w.])(\d+)($|[^\w.])"), &mut |c| {
            let m = c.get(2).unwrap();
            let n: i64 = match m.as_str().parse() {
                Ok(n) => n,
                Err(_) => return,
            };
            push(m.start(), m.end(), (n + 1).to_string());
            if n > 0 {
                push(m.start(), m.end(), (n - 1).to_string());
            }
        }),
        Rule::ArgDrop => each(re(&CALL, r"\b[A-Za-z_][\w.]*\(([^()]*,[^()]*)\)"), &mut |c| {
            let args = c.get(1).unwrap();
            let cut = args.as_str().rfind(',').unwrap();
            push(args.start(), args.end(), args.as_str()[..cut].to_string());
        }),
        Rule::MethodSwap => each(re(&METHOD, r"\.([A-Za-z_]\w*)\("), &mut |c| {
            let m = c.get(1).unwrap();
            if let Some(&(_, to)) = METHOD_SWAPS.iter().find(|(from, _)| *from == m.as_str()) {
                push(m.start(), m.end(), to.to_string());
            }
        }),
        Rule::NameTypo => {
            // Only names that are read: right of an assignment or in a condition/return.
            let read_from = ["return ", "if ", "elif ", "while "]
                .iter()
                .find(|k| trimmed.starts_with(*k))
                .map(|_| code.len() - trimmed.len())
                .or_else(|| assignment_rhs(code));
            if let Some(from) = read_from {
                each(re(&NAME, r"[A-Za-z_]\w*"), &mut |c| {
                    let m = c.get(0).unwrap();
                    let name = m.as_str();
                    let prev = code[..m.start()].chars().next_back();
                    let next = code[m.end()..].chars().next();
                    if m.start() < from
                        || KEYWORDS.contains(&name)
                        || prev == Some('.')
                        || prev.is_some_and(|p| p.is_ascii_digit())
                        || next == Some('(')
                    {
                        return;
                    }
                    let typo = if name.len() >= 4 { name[..name.len() - 1].to_string() } else { format!("{name}_") };
                    push(m.start(), m.end(), typo);
                });
            }
        }
    }
    out.dedup();
    out
}

/// Byte offset just past the `=` of a plain or augmented assignment.
fn assignment_rhs(code: &str) -> Option<usize> {
    static ASSIGN: OnceLock<Regex> = OnceLock::new();
    re(&ASSIGN, r"^[^=]*?(?:[+\-*/%]|//)?=[^=]").find(code).map(|m| m.end() - 1)
}

/// Statement to insert after `anchor`, if the rule table has one.
fn insertion_for(program: &SourceProgram, anchor: usize, rules: &LanguageRules) -> Option<String> {
    let line = program.line(anchor)?;
    let code = line[..code_end(line, &rules.comment_prefix)].trim_end();
    let t = code.trim_start();
    if t.ends_with(&rules.block_opener_suffix) {
        if t.starts_with("for ") || t.starts_with("while ") {
            let body_indent = program
                .lines()
                .iter()
                .skip(anchor)
                .find(|l| !l.trim().is_empty())
                .map(|l| indentation(l).to_string())
                .unwrap_or_else(|| format!("{}{}", indentation(line), rules.indent_unit));
            return Some(format!("{body_indent}break"));
        }
        return None;
    }
    let mutating = t.contains("+=") || t.contains("-=") || t.contains(".append(") || t.contains(".pop(");
    mutating.then(|| code.to_string())
}

/// Applies one rule-based mutation honoring `spec`. Deterministic for a given RNG state.
pub fn mutate<R: Rng>(
    program: &SourceProgram,
    spec: &BugSpec,
    rules: &LanguageRules,
    rng: &mut R,
) -> Result<SourceProgram, NoMutableSite> {
    let candidates: Vec<usize> = spec.candidate_lines.iter().copied().collect();
    let mut lines = program.lines().to_vec();
    match spec.operation {
        Operation::Deletion => {
            let &line = candidates.choose(rng).ok_or(NoMutableSite)?;
            lines.remove(line - 1);
        }
        Operation::Insertion => {
            let options: Vec<(usize, String)> =
                candidates.iter().filter_map(|&l| insertion_for(program, l, rules).map(|s| (l, s))).collect();
            let (anchor, text) = options.choose(rng).ok_or(NoMutableSite)?.clone();
            lines.insert(anchor, text);
        }
        Operation::Substitution if spec.block_size > 1 => {
            // Every line of the block changes, so the fix is one contiguous block.
            for &l in &candidates {
                let options = site_options(&lines[l - 1], spec, rules);
                lines[l - 1] = options.choose(rng).ok_or(NoMutableSite)?.clone();
            }
        }
        Operation::Substitution => {
            let preferred = Rule::preferred(spec.category, &spec.subcategory);
            let current = &lines;
            let gather = |tier: &[Rule]| -> Vec<(usize, String)> {
                let mut out = Vec::new();
                for &l in &candidates {
                    for &r in tier {
                        out.extend(mutants(&current[l - 1], r, rules).into_iter().map(|m| (l, m)));
                    }
                }
                out
            };
            let mut options = gather(preferred);
            if options.is_empty() {
                options = gather(&Rule::ALL);
            }
            let (l, text) = options.choose(rng).ok_or(NoMutableSite)?.clone();
            lines[l - 1] = text;
        }
    }
    Ok(SourceProgram::from_lines(lines))
}

fn site_options(line: &str, spec: &BugSpec, rules: &LanguageRules) -> Vec<String> {
    let tiers = std::iter::once(spec.category)
        .chain(spec.auxiliary.iter().copied())
        .map(|c| Rule::preferred(c, if c == spec.category { &spec.subcategory } else { "" }));
    for tier in tiers {
        let options: Vec<String> = tier.iter().flat_map(|&r| mutants(line, r, rules)).collect();
        if !options.is_empty() {
            return options;
        }
    }
    Rule::ALL.iter().flat_map(|&r| mutants(line, r, rules)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(line: &str, rule: Rule) -> Vec<String> {
        mutants(line, rule, &LanguageRules::python())
    }

    #[test]
    fn comparison_rules() {
        assert_eq!(m("if a < b:", Rule::CompareFlip), ["if a >= b:"]);
        assert_eq!(m("if a <= b:", Rule::Boundary), ["if a < b:"]);
        assert_eq!(m("while x == '<':", Rule::CompareFlip), ["while x != '<':"]);
    }

    #[test]
    fn boundary_shifts_range_and_len() {
        assert_eq!(m("for i in range(n):", Rule::Boundary), ["for i in range(n - 1):"]);
        assert_eq!(m("k = len(xs)", Rule::Boundary), ["k = len(xs) - 1"]);
    }

    #[test]
    fn arithmetic_and_operands() {
        assert_eq!(m("total += x", Rule::ArithSwap), ["total -= x"]);
        assert_eq!(m("d = a - b", Rule::OperandSwap), ["d = b - a"]);
        assert_eq!(m("y = x * 2 + 1", Rule::ArithSwap), ["y = x + 2 + 1", "y = x * 2 - 1"]);
        assert_eq!(m("z = 1.5", Rule::Constant), Vec::<String>::new());
        assert_eq!(m("z = x1 + 10", Rule::Constant), ["z = x1 + 11", "z = x1 + 9"]);
    }

    #[test]
    fn call_rules() {
        assert_eq!(m("v = max(a, b)", Rule::ArgDrop), ["v = max(a)"]);
        assert_eq!(m("out.append(x)", Rule::MethodSwap), ["out.push(x)"]);
    }

    #[test]
    fn conditions_and_names() {
        assert_eq!(m("    if x in seen:", Rule::NegateCondition), ["    if not (x in seen):"]);
        assert_eq!(m("if x in seen:", Rule::MembershipFlip), ["if x not in seen:"]);
        assert!(m("for x in xs:", Rule::MembershipFlip).is_empty());
        assert_eq!(m("total = count + x", Rule::NameTypo), ["total = coun + x", "total = count + x_"]);
        assert_eq!(m("return best", Rule::NameTypo), ["return bes"]);
    }

    #[test]
    fn comments_and_strings_are_untouched() {
        assert!(m("s = 'a < b'  # x < y", Rule::CompareFlip).is_empty());
    }
}
