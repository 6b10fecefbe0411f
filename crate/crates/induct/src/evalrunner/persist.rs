//! Run-directory persistence.
//!
//! Layout: `config.json`, `datasets/<task>.jsonl`, `prompts.jsonl`,
//! `completions.jsonl`, `scores.jsonl`, `instructions.jsonl` (induction
//! runs), `summary.json`. Records are written in item order after each
//! experiment finishes, so re-running with the same seed reproduces
//! `prompts.jsonl` and `summary.json` byte-for-byte (completion latencies
//! are the one nondeterministic field, confined to `completions.jsonl`).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evalrunner::RunConfig;
use crate::scoring::{self, MetricKind};
use crate::taskgen::{export_dataset, TaskDataset, TaskId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Icl,
    Induction,
    Execution,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PromptRecord {
    pub kind: RecordKind,
    pub task: TaskId,
    /// Trial index (ICL), example index (induction), or instruction index
    /// (execution).
    pub example: usize,
    /// Execute-item index for execution records.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<usize>,
    pub prompt: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub kind: RecordKind,
    pub task: TaskId,
    pub example: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<usize>,
    pub text: String,
    /// Gold outputs of the scored item; empty for induction records.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gold: Vec<String>,
    pub backend: String,
    pub cached: bool,
    pub failed: bool,
    pub latency_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub kind: RecordKind,
    pub task: TaskId,
    pub example: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<usize>,
    pub score: f64,
}

/// Raw and normalized induced instructions, one record per example.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstructionRecord {
    pub index: usize,
    pub raw: String,
    pub normalized: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icl_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exec_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_score: Option<f64>,
    pub n_items: usize,
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_instruction: Option<Vec<f64>>,
}

/// Unweighted cross-task means of the present per-task values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryAverages {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icl_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exec_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_score: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub tasks: BTreeMap<String, TaskSummary>,
    pub averages: SummaryAverages,
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let values: Vec<f64> = values.collect();
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

impl RunSummary {
    pub fn compute_averages(&mut self) {
        self.averages = SummaryAverages {
            icl_accuracy: mean_of(self.tasks.values().filter_map(|t| t.icl_accuracy)),
            exec_accuracy: mean_of(self.tasks.values().filter_map(|t| t.exec_accuracy)),
            ref_score: mean_of(self.tasks.values().filter_map(|t| t.ref_score)),
        };
    }
}

/// Writes one run directory. Records are appended per experiment, in item
/// order; `finish` rewrites `summary.json`.
pub struct RunWriter {
    dir: PathBuf,
    summary: RunSummary,
}

fn append_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for record in records {
        writeln!(out, "{}", serde_json::to_string(record).unwrap())
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn read_jsonl_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    crate::corpus::parse_jsonl(&text, path)
}

impl RunWriter {
    /// Start a fresh run in `dir`: existing record files are removed so a
    /// rerun with the same seed reproduces them byte-for-byte. The
    /// completion cache (cache.jsonl) is deliberately left alone.
    pub fn create(dir: &Path, config: RunConfig) -> Result<RunWriter> {
        std::fs::create_dir_all(dir.join("datasets")).map_err(|e| Error::io(dir, e))?;
        for stale in [
            "prompts.jsonl",
            "completions.jsonl",
            "scores.jsonl",
            "instructions.jsonl",
            "summary.json",
        ] {
            match std::fs::remove_file(dir.join(stale)) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(Error::io(dir.join(stale), e)),
            }
        }
        let config_path = dir.join("config.json");
        let mut text = serde_json::to_string_pretty(&config).unwrap();
        text.push('\n');
        std::fs::write(&config_path, text).map_err(|e| Error::io(&config_path, e))?;
        Ok(RunWriter {
            dir: dir.to_path_buf(),
            summary: RunSummary {
                config,
                tasks: BTreeMap::new(),
                averages: SummaryAverages::default(),
            },
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Persist the dataset an experiment ran against, making the run
    /// directory self-contained.
    pub fn save_dataset(&self, ds: &TaskDataset) -> Result<()> {
        export_dataset(
            ds,
            &self.dir.join("datasets").join(format!("{}.jsonl", ds.task)),
        )
    }

    pub fn write_prompts(&self, records: &[PromptRecord]) -> Result<()> {
        append_jsonl(&self.dir.join("prompts.jsonl"), records)
    }

    pub fn write_completions(&self, records: &[CompletionRecord]) -> Result<()> {
        append_jsonl(&self.dir.join("completions.jsonl"), records)
    }

    pub fn write_scores(&self, records: &[ScoreRecord]) -> Result<()> {
        append_jsonl(&self.dir.join("scores.jsonl"), records)
    }

    pub fn write_instructions(&self, records: &[InstructionRecord]) -> Result<()> {
        append_jsonl(&self.dir.join("instructions.jsonl"), records)
    }

    /// Merge an update into a task's summary row.
    pub fn update_task(&mut self, task: TaskId, update: impl FnOnce(&mut TaskSummary)) {
        update(
            self.summary
                .tasks
                .entry(task.name().to_string())
                .or_default(),
        );
    }

    /// Recompute averages and write `summary.json`.
    pub fn finish(&mut self) -> Result<&RunSummary> {
        self.summary.compute_averages();
        let path = self.dir.join("summary.json");
        let mut text = serde_json::to_string_pretty(&self.summary).unwrap();
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(&self.summary)
    }
}

pub fn load_summary(dir: &Path) -> Result<RunSummary> {
    let path = dir.join("summary.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(&path, 1, e.to_string()))
}

pub fn load_completions(dir: &Path) -> Result<Vec<CompletionRecord>> {
    read_jsonl_file(&dir.join("completions.jsonl"))
}

pub fn load_instructions(dir: &Path) -> Result<Vec<InstructionRecord>> {
    read_jsonl_file(&dir.join("instructions.jsonl"))
}

/// Task scores recomputed from persisted completions alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReplayedScores {
    pub icl_accuracy: Option<f64>,
    pub exec_accuracy: Option<f64>,
    pub per_instruction: Option<Vec<f64>>,
}

/// Rescore every persisted completion; the result must agree exactly with
/// the run's summary (the replay property).
pub fn replay_scores(dir: &Path) -> Result<BTreeMap<String, ReplayedScores>> {
    let completions = load_completions(dir)?;
    let mut icl: BTreeMap<TaskId, Vec<(usize, f64)>> = BTreeMap::new();
    let mut exec: BTreeMap<TaskId, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();

    for rec in &completions {
        let metric = MetricKind::for_task(rec.task);
        match rec.kind {
            RecordKind::Icl => {
                let score = scoring::score_outputs(metric, &rec.text, &rec.gold);
                icl.entry(rec.task).or_default().push((rec.example, score));
            }
            RecordKind::Execution => {
                let score = scoring::score_outputs(metric, &rec.text, &rec.gold);
                exec.entry(rec.task)
                    .or_default()
                    .entry(rec.example)
                    .or_default()
                    .push(score);
            }
            RecordKind::Induction => {}
        }
    }

    let mut out: BTreeMap<String, ReplayedScores> = BTreeMap::new();
    for (task, mut trials) in icl {
        trials.sort_by_key(|(example, _)| *example);
        let entry = out.entry(task.name().to_string()).or_default();
        entry.icl_accuracy = mean_of(trials.iter().map(|(_, s)| *s));
    }
    for (task, by_instruction) in exec {
        let per_instruction: Vec<f64> = by_instruction
            .values()
            .map(|scores| scores.iter().sum::<f64>() / scores.len() as f64)
            .collect();
        let entry = out.entry(task.name().to_string()).or_default();
        entry.exec_accuracy = mean_of(per_instruction.iter().copied());
        entry.per_instruction = Some(per_instruction);
    }
    Ok(out)
}
