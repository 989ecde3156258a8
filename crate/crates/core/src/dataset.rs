// SPDX-License-Identifier: Apache-2.0

//! Tasks, buggy variants, and JSONL persistence.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composer::ProbeVerdict;
use crate::edit::{apply_edits, parse_to_blocks, EditBlock, EditError, EditScript, LineEdit};
use crate::exec::{Status, UnitSuite};
use crate::program::SourceProgram;
use crate::taxonomy::Category;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Row { path: String, line: usize, message: String },
    #[error("unknown task `{0}`")]
    UnknownTask(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.display().to_string(), source }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: String,
    #[serde(default)]
    pub source: String,
    pub description: String,
    pub gt_program: SourceProgram,
    pub suite: UnitSuite,
    /// Whether debuggers may be shown the suite.
    #[serde(default = "default_true")]
    pub suite_visible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTag {
    /// Span of the fix block in buggy-program coordinates.
    pub start: usize,
    pub end: usize,
    pub category: Category,
    pub subcategory: String,
    /// Secondary categories requested for multi-line bugs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub auxiliary: Vec<Category>,
    pub generator: String,
    pub verdict_kind: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuggyVariant {
    pub bug_id: String,
    pub task_id: String,
    pub k: usize,
    pub blocks: Vec<BlockTag>,
    /// Edits that turn `buggy_program` back into the ground truth.
    pub fix_edits: Vec<LineEdit>,
    pub buggy_program: SourceProgram,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub independence: Option<ProbeVerdict>,
}

impl BuggyVariant {
    pub fn make_id(task_id: &str, buggy: &SourceProgram) -> String {
        format!("{task_id}:{}", &buggy.content_hash()[..12])
    }

    pub fn fix_script(&self) -> Result<EditScript, EditError> {
        EditScript::new(self.buggy_program.content_hash(), self.fix_edits.clone())
    }

    pub fn fix_blocks(&self) -> Result<Vec<EditBlock>, EditError> {
        Ok(parse_to_blocks(&self.fix_script()?))
    }

    /// The program the fix restores.
    pub fn fixed_program(&self) -> Result<SourceProgram, EditError> {
        apply_edits(&self.buggy_program, &self.fix_script()?)
    }
}

pub fn task_index(tasks: &[Task]) -> HashMap<&str, &Task> {
    tasks.iter().map(|t| (t.task_id.as_str(), t)).collect()
}

/// One line of a JSONL file that failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: usize,
    pub message: String,
}

/// Reads every row, keeping per-row parse failures instead of stopping.
pub fn read_jsonl_lenient<T: DeserializeOwned>(path: &Path) -> Result<Vec<Result<T, RowError>>, DatasetError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| RowError { line: i + 1, message: e.to_string() }));
    }
    Ok(rows)
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DatasetError> {
    read_jsonl_lenient(path)?
        .into_iter()
        .map(|r| {
            r.map_err(|e| DatasetError::Row { path: path.display().to_string(), line: e.line, message: e.message })
        })
        .collect()
}

pub fn to_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), DatasetError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    w.write_all(to_jsonl(items).as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}
