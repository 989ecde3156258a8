// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Line equality used by matching and `before` checks: trailing whitespace is
/// ignored, leading whitespace is not.
pub fn normalize(line: &str) -> &str {
    line.trim_end()
}

/// Hex prefix of the SHA-256 of `bytes`; 32 hex digits is plenty for cache keys.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(16).map(|b| format!("{b:02x}")).collect()
}

/// A program as an ordered list of newline-free lines.
///
/// The hash covers the exact text, so two programs that differ only in
/// trailing whitespace are distinct (and get distinct verdict-cache entries).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct SourceProgram {
    lines: Vec<String>,
    hash: String,
}

impl SourceProgram {
    pub fn from_lines<I, S>(lines: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let lines: Vec<String> = lines.into_iter().map(Into::into).collect();
        debug_assert!(lines.iter().all(|l| !l.contains('\n')));
        let hash = short_hash(render(&lines).as_bytes());
        SourceProgram { lines, hash }
    }

    /// Splits on `\n`. A single trailing newline does not create an empty last line.
    pub fn from_text(text: &str) -> Self {
        if text.is_empty() {
            return Self::from_lines(Vec::<String>::new());
        }
        let body = text.strip_suffix('\n').unwrap_or(text);
        Self::from_lines(body.split('\n'))
    }

    pub fn lines(&self) -> &[String] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// 1-based line access.
    pub fn line(&self, n: usize) -> Option<&str> {
        n.checked_sub(1).and_then(|i| self.lines.get(i)).map(String::as_str)
    }

    pub fn content_hash(&self) -> &str {
        &self.hash
    }

    pub fn to_text(&self) -> String {
        render(&self.lines)
    }
}

fn render(lines: &[String]) -> String {
    let mut out = lines.join("\n");
    if !lines.is_empty() {
        out.push('\n');
    }
    out
}

impl From<String> for SourceProgram {
    fn from(text: String) -> Self {
        SourceProgram::from_text(&text)
    }
}

impl From<SourceProgram> for String {
    fn from(p: SourceProgram) -> Self {
        p.to_text()
    }
}

impl fmt::Debug for SourceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceProgram").field("hash", &self.hash).field("lines", &self.lines).finish()
    }
}

impl fmt::Display for SourceProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let p = SourceProgram::from_text("a = 1\n\nb = 2\n");
        assert_eq!(p.lines(), ["a = 1", "", "b = 2"]);
        assert_eq!(p.to_text(), "a = 1\n\nb = 2\n");
        assert_eq!(SourceProgram::from_text(&p.to_text()), p);
    }

    #[test]
    fn missing_final_newline_is_tolerated() {
        assert_eq!(SourceProgram::from_text("x\ny").lines(), ["x", "y"]);
        assert!(SourceProgram::from_text("").is_empty());
        assert_eq!(SourceProgram::from_text("\n").lines(), [""]);
    }

    #[test]
    fn hash_sees_trailing_whitespace() {
        let a = SourceProgram::from_text("x = 1\n");
        let b = SourceProgram::from_text("x = 1  \n");
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(normalize(&a.lines()[0]), normalize(&b.lines()[0]));
    }

    #[test]
    fn serde_as_plain_text() {
        let p = SourceProgram::from_text("def f():\n    return 1\n");
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "\"def f():\\n    return 1\\n\"");
        let back: SourceProgram = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
