// SPDX-License-Identifier: Apache-2.0

//! Tokenizer with Python-style INDENT/DEDENT handling.

use crate::error::Exception;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
}

const OPERATORS: &[&str] = &[
    "**=", "//=", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "**", "//", "->", "+", "-", "*", "/", "%", "<",
    ">", "=", "(", ")", "[", "]", "{", "}", ",", ":", ".", ";",
];

pub fn tokenize(source: &str) -> Result<Vec<Token>, Exception> {
    let mut out = Vec::new();
    let mut indents: Vec<usize> = vec![0];
    let mut depth: usize = 0;

    for (idx, raw) in source.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let chars: Vec<char> = line.chars().collect();
        let mut pos = 0;

        if depth == 0 {
            let mut width = 0;
            while pos < chars.len() && (chars[pos] == ' ' || chars[pos] == '\t') {
                width = if chars[pos] == '\t' { (width / 8 + 1) * 8 } else { width + 1 };
                pos += 1;
            }
            if pos == chars.len() || chars[pos] == '#' {
                continue;
            }
            let current = *indents.last().unwrap();
            if width > current {
                indents.push(width);
                out.push(Token { tok: Tok::Indent, line: line_no });
            } else if width < current {
                while *indents.last().unwrap() > width {
                    indents.pop();
                    out.push(Token { tok: Tok::Dedent, line: line_no });
                }
                if *indents.last().unwrap() != width {
                    return Err(Exception::new(
                        "IndentationError",
                        "unindent does not match any outer indentation level",
                    )
                    .at(line_no));
                }
            }
        }

        while pos < chars.len() {
            let c = chars[pos];
            if c == ' ' || c == '\t' {
                pos += 1;
                continue;
            }
            if c == '#' {
                break;
            }
            if c == '\\' && pos + 1 == chars.len() {
                return Err(Exception::new("SyntaxError", "line continuation is not supported").at(line_no));
            }
            if c.is_ascii_digit() || (c == '.' && pos + 1 < chars.len() && chars[pos + 1].is_ascii_digit()) {
                let start = pos;
                let mut is_float = false;
                while pos < chars.len()
                    && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_' || chars[pos] == '.')
                {
                    if chars[pos] == '.' {
                        is_float = true;
                    }
                    if (chars[pos] == 'e' || chars[pos] == 'E')
                        && pos + 1 < chars.len()
                        && (chars[pos + 1] == '-' || chars[pos + 1] == '+')
                    {
                        is_float = true;
                        pos += 1;
                    }
                    pos += 1;
                }
                let text: String = chars[start..pos].iter().filter(|c| **c != '_').collect();
                let tok = if is_float || text.contains(['e', 'E']) {
                    text.parse::<f64>().ok().map(Tok::Float)
                } else {
                    text.parse::<i64>().ok().map(Tok::Int)
                };
                match tok {
                    Some(tok) => out.push(Token { tok, line: line_no }),
                    None => {
                        return Err(
                            Exception::new("SyntaxError", format!("invalid number literal '{text}'")).at(line_no)
                        )
                    }
                }
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = pos;
                while pos < chars.len() && (chars[pos].is_alphanumeric() || chars[pos] == '_') {
                    pos += 1;
                }
                let word: String = chars[start..pos].iter().collect();
                if pos < chars.len() && (chars[pos] == '"' || chars[pos] == '\'') && is_string_prefix(&word) {
                    if word.eq_ignore_ascii_case("f") {
                        return Err(Exception::new("SyntaxError", "f-strings are not supported").at(line_no));
                    }
                    let (s, next) = lex_string(&chars, pos, line_no, word.contains(['r', 'R']))?;
                    out.push(Token { tok: Tok::Str(s), line: line_no });
                    pos = next;
                } else {
                    out.push(Token { tok: Tok::Name(word), line: line_no });
                }
                continue;
            }
            if c == '"' || c == '\'' {
                let (s, next) = lex_string(&chars, pos, line_no, false)?;
                out.push(Token { tok: Tok::Str(s), line: line_no });
                pos = next;
                continue;
            }
            let rest: String = chars[pos..chars.len().min(pos + 3)].iter().collect();
            let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) else {
                return Err(Exception::new("SyntaxError", format!("invalid character '{c}'")).at(line_no));
            };
            match *op {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    if depth == 0 {
                        return Err(Exception::new("SyntaxError", format!("unmatched '{op}'")).at(line_no));
                    }
                    depth -= 1;
                }
                _ => {}
            }
            out.push(Token { tok: Tok::Op(op), line: line_no });
            pos += op.len();
        }

        if depth == 0 && out.last().is_some_and(|t| t.tok != Tok::Newline) {
            out.push(Token { tok: Tok::Newline, line: line_no });
        }
    }

    let last_line = source.split('\n').count();
    if depth > 0 {
        return Err(Exception::new("SyntaxError", "unexpected EOF: unclosed bracket").at(last_line));
    }
    while indents.len() > 1 {
        indents.pop();
        out.push(Token { tok: Tok::Dedent, line: last_line });
    }
    out.push(Token { tok: Tok::Eof, line: last_line });
    Ok(out)
}

fn is_string_prefix(word: &str) -> bool {
    matches!(word.to_ascii_lowercase().as_str(), "r" | "b" | "u" | "f" | "rb" | "br")
}

fn lex_string(chars: &[char], start: usize, line: usize, raw: bool) -> Result<(String, usize), Exception> {
    let quote = chars[start];
    if start + 2 < chars.len() && chars[start + 1] == quote && chars[start + 2] == quote {
        return Err(Exception::new("SyntaxError", "triple-quoted strings are not supported").at(line));
    }
    let mut out = String::new();
    let mut pos = start + 1;
    while pos < chars.len() {
        let c = chars[pos];
        if c == quote {
            return Ok((out, pos + 1));
        }
        if c == '\\' && !raw && pos + 1 < chars.len() {
            let esc = chars[pos + 1];
            match esc {
                'n' => out.push('\n'),
                't' => out.push('\t'),
                'r' => out.push('\r'),
                '0' => out.push('\0'),
                '\\' => out.push('\\'),
                '\'' => out.push('\''),
                '"' => out.push('"'),
                other => {
                    out.push('\\');
                    out.push(other);
                }
            }
            pos += 2;
            continue;
        }
        out.push(c);
        pos += 1;
    }
    Err(Exception::new("SyntaxError", "unterminated string literal").at(line))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_produces_indent_and_dedent() {
        let toks = kinds("if x:\n    y = 1\nz = 2\n");
        assert!(toks.contains(&Tok::Indent));
        assert!(toks.contains(&Tok::Dedent));
        assert_eq!(toks.last(), Some(&Tok::Eof));
    }

    #[test]
    fn brackets_join_lines() {
        let toks = kinds("x = [1,\n     2]\n");
        let newlines = toks.iter().filter(|t| **t == Tok::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn bad_dedent_is_indentation_error() {
        let err = tokenize("if x:\n    y = 1\n  z = 2\n").unwrap_err();
        assert_eq!(err.kind, "IndentationError");
    }

    #[test]
    fn string_escapes() {
        assert_eq!(kinds("'a\\nb'")[0], Tok::Str("a\nb".into()));
    }
}
