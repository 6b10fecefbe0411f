//! The three experiments.
//!
//! Each experiment renders its prompts sequentially (so record files are
//! byte-deterministic), fans the backend calls out through the model
//! module's bounded parallelism, and persists prompts, completions, and
//! per-item scores in item order. A failed backend call scores 0 and is
//! counted; a run aborts once failures exceed the configured fraction.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::evalrunner::persist::{
    CompletionRecord, InstructionRecord, PromptRecord, RecordKind, RunWriter, ScoreRecord,
};
use crate::evalrunner::{RunConfig, TaskScore};
use crate::model::{map_bounded, CompletionRequest, CompletionResponse, ModelClient};
use crate::prompting::{
    render_execution_prompt, render_in_context_prompt, render_induction_prompt, PromptTemplate,
    PROMPT_DEMOS,
};
use crate::scoring::{self, MetricKind};
use crate::taskgen::{subrng, Demonstration, InductionExample, TaskDataset};

/// Outcome of one backend call: the completion, or the failure that stood
/// in for it.
struct CallOutcome {
    text: String,
    backend: String,
    cached: bool,
    failed: bool,
    latency_ms: u64,
}

impl CallOutcome {
    fn from_result(result: Result<CompletionResponse>, fallback_backend: &str) -> CallOutcome {
        match result {
            Ok(resp) => CallOutcome {
                text: resp.text,
                backend: resp.backend,
                cached: resp.cached,
                failed: false,
                latency_ms: resp.latency_ms,
            },
            Err(_) => CallOutcome {
                text: String::new(),
                backend: fallback_backend.to_string(),
                cached: false,
                failed: true,
                latency_ms: 0,
            },
        }
    }
}

fn abort_on_failures(task_name: &str, failures: usize, total: usize, ratio: f64) -> Result<()> {
    if total > 0 && (failures as f64) > ratio * (total as f64) {
        return Err(Error::Aborted(format!(
            "{task_name}: {failures}/{total} backend calls failed (limit {:.0}%)",
            ratio * 100.0
        )));
    }
    Ok(())
}

/// In-context learning verification: `n_icl` trials of five induce
/// demonstrations plus one held-out execute input, scored with the task
/// metric. Returns the per-trial scores and their mean.
pub fn run_icl_verification(
    ds: &TaskDataset,
    client: &ModelClient,
    cfg: &RunConfig,
    writer: &mut RunWriter,
) -> Result<TaskScore> {
    let task = ds.task;
    if cfg.n_icl == 0 {
        return Err(Error::InvalidArgument("n_icl must be at least 1".into()));
    }
    if ds.induce.len() < PROMPT_DEMOS {
        return Err(Error::Unsatisfiable(format!(
            "{task}: induce pool has fewer than {PROMPT_DEMOS} demonstrations"
        )));
    }
    if ds.execute.len() < cfg.n_icl {
        return Err(Error::Unsatisfiable(format!(
            "{task}: execute pool has {} items; n_icl is {}",
            ds.execute.len(),
            cfg.n_icl
        )));
    }
    writer.save_dataset(ds)?;

    // Draw each trial's demonstrations and test item up front; prompts and
    // records then come out in trial order.
    let mut rng = subrng(cfg.seed, &format!("icl/{}", task.name()));
    let mut test_indices: Vec<usize> = (0..ds.execute.len()).collect();
    test_indices.shuffle(&mut rng);
    test_indices.truncate(cfg.n_icl);

    let mut prompts = Vec::with_capacity(cfg.n_icl);
    let mut golds: Vec<&Demonstration> = Vec::with_capacity(cfg.n_icl);
    for &test_idx in &test_indices {
        let mut demo_indices: Vec<usize> = (0..ds.induce.len()).collect();
        demo_indices.shuffle(&mut rng);
        let demos: Vec<Demonstration> = demo_indices[..PROMPT_DEMOS]
            .iter()
            .map(|&i| ds.induce[i].clone())
            .collect();
        let test = &ds.execute[test_idx];
        prompts.push(render_in_context_prompt(&demos, &test.input)?);
        golds.push(test);
    }

    let requests: Vec<CompletionRequest> = prompts
        .iter()
        .map(|p| {
            let mut req = CompletionRequest::greedy(&p.text, &cfg.model, cfg.max_tokens_execution);
            req.stop = cfg.execution_stop.clone();
            req
        })
        .collect();
    let outcomes: Vec<CallOutcome> = map_bounded(&requests, cfg.max_in_flight, |req| {
        CallOutcome::from_result(client.complete(req), client.backend_id())
    });

    let metric = MetricKind::for_task(task);
    let mut prompt_records = Vec::new();
    let mut completion_records = Vec::new();
    let mut score_records = Vec::new();
    let mut scores = Vec::with_capacity(cfg.n_icl);
    let mut failures = 0usize;
    for (i, outcome) in outcomes.iter().enumerate() {
        let score = if outcome.failed {
            failures += 1;
            0.0
        } else {
            scoring::score(metric, &outcome.text, golds[i])
        };
        scores.push(score);
        prompt_records.push(PromptRecord {
            kind: RecordKind::Icl,
            task,
            example: i,
            item: None,
            prompt: prompts[i].text.clone(),
        });
        completion_records.push(CompletionRecord {
            kind: RecordKind::Icl,
            task,
            example: i,
            item: None,
            text: outcome.text.clone(),
            gold: golds[i].gold.clone(),
            backend: outcome.backend.clone(),
            cached: outcome.cached,
            failed: outcome.failed,
            latency_ms: outcome.latency_ms,
        });
        score_records.push(ScoreRecord {
            kind: RecordKind::Icl,
            task,
            example: i,
            item: None,
            score,
        });
    }
    writer.write_prompts(&prompt_records)?;
    writer.write_completions(&completion_records)?;
    writer.write_scores(&score_records)?;

    let task_score = TaskScore::new(task, scores, cfg.n_icl);
    writer.update_task(task, |summary| {
        summary.icl_accuracy = Some(task_score.mean);
        summary.n_items = summary.n_items.max(cfg.n_icl);
        summary.failures += failures;
    });
    abort_on_failures(task.name(), failures, cfg.n_icl, cfg.failure_abort_ratio)?;
    Ok(task_score)
}

/// Instruction induction: one completion per example, stored raw and
/// normalized, order preserved. Failed calls are retained as empty
/// instructions.
pub fn run_induction(
    examples: &[InductionExample],
    template: &PromptTemplate,
    client: &ModelClient,
    cfg: &RunConfig,
    writer: &mut RunWriter,
) -> Result<Vec<String>> {
    if examples.is_empty() {
        return Err(Error::InvalidArgument("no induction examples".into()));
    }
    let task = examples[0].task;
    let prompts: Vec<_> = examples
        .iter()
        .map(|ex| render_induction_prompt(&ex.demos, template))
        .collect::<Result<_>>()?;

    let requests: Vec<CompletionRequest> = prompts
        .iter()
        .map(|p: &crate::prompting::RenderedPrompt| {
            CompletionRequest::greedy(&p.text, &cfg.model, cfg.max_tokens_induction)
        })
        .collect();
    let outcomes: Vec<CallOutcome> = map_bounded(&requests, cfg.max_in_flight, |req| {
        CallOutcome::from_result(client.complete(req), client.backend_id())
    });

    let mut prompt_records = Vec::new();
    let mut completion_records = Vec::new();
    let mut instruction_records = Vec::new();
    let mut instructions = Vec::with_capacity(examples.len());
    let mut failures = 0usize;
    for (i, outcome) in outcomes.iter().enumerate() {
        if outcome.failed {
            failures += 1;
        }
        prompt_records.push(PromptRecord {
            kind: RecordKind::Induction,
            task,
            example: i,
            item: None,
            prompt: prompts[i].text.clone(),
        });
        completion_records.push(CompletionRecord {
            kind: RecordKind::Induction,
            task,
            example: i,
            item: None,
            text: outcome.text.clone(),
            gold: Vec::new(),
            backend: outcome.backend.clone(),
            cached: outcome.cached,
            failed: outcome.failed,
            latency_ms: outcome.latency_ms,
        });
        instruction_records.push(InstructionRecord {
            index: i,
            raw: outcome.text.clone(),
            normalized: scoring::normalize(&outcome.text),
        });
        instructions.push(outcome.text.clone());
    }
    writer.write_prompts(&prompt_records)?;
    writer.write_completions(&completion_records)?;
    writer.write_instructions(&instruction_records)?;
    writer.update_task(task, |summary| {
        summary.failures += failures;
    });
    abort_on_failures(
        task.name(),
        failures,
        examples.len(),
        cfg.failure_abort_ratio,
    )?;
    Ok(instructions)
}

/// Execution accuracy: prompt the execution model with each instruction
/// over every execute item; per-instruction scores are item averages, the
/// task score is their mean. Empty instructions cannot be rendered and
/// score 0 across the board.
pub fn run_execution_accuracy(
    instructions: &[String],
    ds: &TaskDataset,
    client: &ModelClient,
    cfg: &RunConfig,
    writer: &mut RunWriter,
) -> Result<TaskScore> {
    let task = ds.task;
    if instructions.is_empty() {
        return Err(Error::InvalidArgument("empty instruction list".into()));
    }
    if ds.execute.is_empty() {
        return Err(Error::InvalidArgument(format!("{task}: empty execute set")));
    }
    writer.save_dataset(ds)?;

    struct WorkItem {
        instruction: usize,
        item: usize,
        prompt: Option<String>,
    }
    let mut work = Vec::with_capacity(instructions.len() * ds.execute.len());
    for (i, instruction) in instructions.iter().enumerate() {
        for (j, demo) in ds.execute.iter().enumerate() {
            let prompt = render_execution_prompt(instruction, &demo.input)
                .ok()
                .map(|p| p.text);
            work.push(WorkItem {
                instruction: i,
                item: j,
                prompt,
            });
        }
    }

    let outcomes: Vec<CallOutcome> = map_bounded(&work, cfg.max_in_flight, |w| {
        match &w.prompt {
            Some(prompt) => {
                let mut req =
                    CompletionRequest::greedy(prompt, &cfg.model, cfg.max_tokens_execution);
                req.stop = cfg.execution_stop.clone();
                CallOutcome::from_result(client.complete(&req), client.backend_id())
            }
            // Unrenderable (empty) instruction: an empty completion that
            // scores 0 without a backend call.
            None => CallOutcome {
                text: String::new(),
                backend: client.backend_id().to_string(),
                cached: false,
                failed: true,
                latency_ms: 0,
            },
        }
    });

    let metric = MetricKind::for_task(task);
    let mut prompt_records = Vec::new();
    let mut completion_records = Vec::new();
    let mut score_records = Vec::new();
    let mut per_instruction = vec![0.0f64; instructions.len()];
    let mut backend_failures = 0usize;
    let mut backend_calls = 0usize;
    for (w, outcome) in work.iter().zip(&outcomes) {
        let demo = &ds.execute[w.item];
        let score = if outcome.failed {
            if w.prompt.is_some() {
                backend_failures += 1;
            }
            0.0
        } else {
            scoring::score(metric, &outcome.text, demo)
        };
        if w.prompt.is_some() {
            backend_calls += 1;
        }
        per_instruction[w.instruction] += score;
        prompt_records.push(PromptRecord {
            kind: RecordKind::Execution,
            task,
            example: w.instruction,
            item: Some(w.item),
            prompt: w.prompt.clone().unwrap_or_default(),
        });
        completion_records.push(CompletionRecord {
            kind: RecordKind::Execution,
            task,
            example: w.instruction,
            item: Some(w.item),
            text: outcome.text.clone(),
            gold: demo.gold.clone(),
            backend: outcome.backend.clone(),
            cached: outcome.cached,
            failed: outcome.failed,
            latency_ms: outcome.latency_ms,
        });
        score_records.push(ScoreRecord {
            kind: RecordKind::Execution,
            task,
            example: w.instruction,
            item: Some(w.item),
            score,
        });
    }
    for total in &mut per_instruction {
        *total /= ds.execute.len() as f64;
    }
    writer.write_prompts(&prompt_records)?;
    writer.write_completions(&completion_records)?;
    writer.write_scores(&score_records)?;

    let task_score = TaskScore::new(task, per_instruction, ds.execute.len());
    writer.update_task(task, |summary| {
        summary.exec_accuracy = Some(task_score.mean);
        summary.n_items = summary.n_items.max(ds.execute.len());
        summary.failures += backend_failures;
        summary.per_instruction = Some(task_score.per_instruction.clone());
    });
    abort_on_failures(
        task.name(),
        backend_failures,
        backend_calls,
        cfg.failure_abort_ratio,
    )?;
    Ok(task_score)
}
