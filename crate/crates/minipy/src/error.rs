// SPDX-License-Identifier: Apache-2.0

use std::fmt;

/// A raised exception, named after the Python exception class it mirrors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct Exception {
    pub kind: &'static str,
    pub message: String,
    pub line: Option<usize>,
}

impl Exception {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Exception { kind, message: message.into(), line: None }
    }

    /// Attaches a line number unless one is already recorded.
    pub fn at(mut self, line: usize) -> Self {
        if self.line.is_none() {
            self.line = Some(line);
        }
        self
    }
}

impl fmt::Display for Exception {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.message.is_empty() {
            write!(f, "{}", self.kind)?;
        } else {
            write!(f, "{}: {}", self.kind, self.message)?;
        }
        if let Some(line) = self.line {
            write!(f, " (line {line})")?;
        }
        Ok(())
    }
}

pub(crate) fn type_error(msg: impl Into<String>) -> Exception {
    Exception::new("TypeError", msg)
}

pub(crate) fn value_error(msg: impl Into<String>) -> Exception {
    Exception::new("ValueError", msg)
}
