//! Dataset JSONL import/export.
//!
//! One demonstration per line:
//! `{"task": ..., "split": "induce"|"execute", "input": ..., "gold": [...], "aux": {...}}`,
//! preceded by a single header line `{"task": ..., "seed": ...}` that
//! preserves the generation seed so import ∘ export is the identity.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::taskgen::{Demonstration, TaskDataset, TaskId};

#[derive(Serialize, Deserialize)]
struct Header {
    task: TaskId,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct Line {
    task: TaskId,
    split: String,
    input: String,
    gold: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    aux: BTreeMap<String, String>,
}

pub fn export_dataset(ds: &TaskDataset, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let emit = |out: &mut std::io::BufWriter<std::fs::File>, value: &str| -> Result<()> {
        writeln!(out, "{value}").map_err(|e| Error::io(path, e))
    };
    emit(
        &mut out,
        &serde_json::to_string(&Header {
            task: ds.task,
            seed: ds.seed,
        })
        .unwrap(),
    )?;
    for (split, demos) in [("induce", &ds.induce), ("execute", &ds.execute)] {
        for d in demos {
            let line = Line {
                task: ds.task,
                split: split.to_string(),
                input: d.input.clone(),
                gold: d.gold.clone(),
                aux: d.aux.clone(),
            };
            emit(&mut out, &serde_json::to_string(&line).unwrap())?;
        }
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn import_dataset(path: &Path) -> Result<TaskDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut task: Option<TaskId> = None;
    let mut seed = 0u64;
    let mut induce = Vec::new();
    let mut execute = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if value.get("split").is_none() {
            let header: Header = serde_json::from_value(value)
                .map_err(|e| Error::parse(path, lineno, format!("bad header: {e}")))?;
            task = Some(header.task);
            seed = header.seed;
            continue;
        }
        let record: Line =
            serde_json::from_value(value).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        match task {
            None => task = Some(record.task),
            Some(t) if t != record.task => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("task '{}' conflicts with '{}'", record.task, t),
                ));
            }
            _ => {}
        }
        let mut demo = Demonstration::new(record.input, record.gold)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        demo.aux = record.aux;
        match record.split.as_str() {
            "induce" => induce.push(demo),
            "execute" => execute.push(demo),
            other => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("bad split tag '{other}'"),
                ));
            }
        }
    }

    let task = task.ok_or_else(|| Error::parse(path, 1, "empty dataset file"))?;
    TaskDataset::new(task, induce, execute, seed)
}
