//! Constrained sampling of 5-demonstration induction examples.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::taskgen::generate::subrng;
use crate::taskgen::{Demonstration, InductionExample, SeedPath, TaskDataset, TaskId};

/// Demonstrations per induction example.
pub const DEMOS_PER_EXAMPLE: usize = 5;

/// Per-task composition constraint on a sampled example.
enum Constraint {
    /// Any five distinct demonstrations.
    Plain,
    /// At least two demonstrations per value of the given aux key
    /// (sentiment and word-in-context label balance).
    MinTwoPerLabel(&'static str),
    /// At least one demonstration with aux score 0 and one with score 5.
    ScoreEndpoints,
}

fn constraint_for(task: TaskId) -> Constraint {
    match task {
        TaskId::Sentiment | TaskId::WordInContext => Constraint::MinTwoPerLabel("label"),
        TaskId::SentenceSimilarity => Constraint::ScoreEndpoints,
        _ => Constraint::Plain,
    }
}

/// Sample `n` induction examples of five distinct induce demonstrations
/// each, honoring the task's composition constraint. Deterministic given
/// the seed.
pub fn sample_induction_examples(
    ds: &TaskDataset,
    n: usize,
    seed: u64,
) -> Result<Vec<InductionExample>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "requested 0 induction examples".into(),
        ));
    }
    if ds.induce.len() < DEMOS_PER_EXAMPLE {
        return Err(Error::Unsatisfiable(format!(
            "{}: induce pool has {} demonstrations; needs at least {DEMOS_PER_EXAMPLE}",
            ds.task,
            ds.induce.len()
        )));
    }
    let constraint = constraint_for(ds.task);
    let mut rng = subrng(seed, &format!("induction/{}", ds.task.name()));
    let mut examples = Vec::with_capacity(n);
    for index in 0..n {
        let demos = sample_one(ds, &constraint, &mut rng)?;
        examples.push(InductionExample {
            task: ds.task,
            demos,
            seed_path: SeedPath {
                seed,
                index: index as u64,
            },
        });
    }
    Ok(examples)
}

fn sample_one(
    ds: &TaskDataset,
    constraint: &Constraint,
    rng: &mut ChaCha20Rng,
) -> Result<Vec<Demonstration>> {
    let pool = &ds.induce;
    let mut chosen: Vec<usize> = match constraint {
        Constraint::Plain => draw(&(0..pool.len()).collect::<Vec<_>>(), DEMOS_PER_EXAMPLE, rng),
        Constraint::MinTwoPerLabel(key) => {
            let mut by_label: std::collections::BTreeMap<&str, Vec<usize>> = Default::default();
            for (i, d) in pool.iter().enumerate() {
                let label = d.aux.get(*key).map(String::as_str).unwrap_or("");
                by_label.entry(label).or_default().push(i);
            }
            // Binary labels: two per label plus one free slot fills the five.
            if by_label.len() != 2 || by_label.values().any(|v| v.len() < 2) {
                return Err(Error::Unsatisfiable(format!(
                    "{}: induce pool cannot supply 2 demonstrations per label",
                    ds.task
                )));
            }
            // Two from each label, then one from anywhere else.
            let mut picked = Vec::with_capacity(DEMOS_PER_EXAMPLE);
            for indices in by_label.values() {
                picked.extend(draw(indices, 2, rng));
            }
            let rest: Vec<usize> = (0..pool.len()).filter(|i| !picked.contains(i)).collect();
            picked.extend(draw(&rest, DEMOS_PER_EXAMPLE - picked.len(), rng));
            picked
        }
        Constraint::ScoreEndpoints => {
            let with_score = |s: &str| -> Vec<usize> {
                pool.iter()
                    .enumerate()
                    .filter(|(_, d)| d.aux.get("score").map(String::as_str) == Some(s))
                    .map(|(i, _)| i)
                    .collect()
            };
            let zeros = with_score("0");
            let fives = with_score("5");
            if zeros.is_empty() || fives.is_empty() {
                return Err(Error::Unsatisfiable(format!(
                    "{}: induce pool lacks a score-0 or score-5 pair",
                    ds.task
                )));
            }
            let mut picked = vec![draw(&zeros, 1, rng)[0], draw(&fives, 1, rng)[0]];
            let rest: Vec<usize> = (0..pool.len()).filter(|i| !picked.contains(i)).collect();
            picked.extend(draw(&rest, DEMOS_PER_EXAMPLE - picked.len(), rng));
            picked
        }
    };
    if chosen.len() < DEMOS_PER_EXAMPLE {
        return Err(Error::Unsatisfiable(format!(
            "{}: induce pool too small for a constrained example",
            ds.task
        )));
    }
    // Slot order is itself random so constrained picks don't always lead.
    chosen.shuffle(rng);
    Ok(chosen.into_iter().map(|i| pool[i].clone()).collect())
}

/// `k` distinct values drawn without replacement.
fn draw(indices: &[usize], k: usize, rng: &mut ChaCha20Rng) -> Vec<usize> {
    let mut copy: Vec<usize> = indices.to_vec();
    copy.shuffle(rng);
    copy.truncate(k);
    copy
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labeled_dataset(labels: &[&str]) -> TaskDataset {
        let induce: Vec<Demonstration> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                Demonstration::new(format!("sentence {i}"), vec![l.to_string()])
                    .unwrap()
                    .with_aux("label", *l)
            })
            .collect();
        let execute = vec![Demonstration::new("held out", vec!["positive".to_string()]).unwrap()];
        TaskDataset::new(TaskId::Sentiment, induce, execute, 0).unwrap()
    }

    #[test]
    fn examples_have_five_distinct_demos() {
        let ds = labeled_dataset(&[
            "positive", "positive", "positive", "negative", "negative", "negative", "positive",
        ]);
        let examples = sample_induction_examples(&ds, 50, 9).unwrap();
        assert_eq!(examples.len(), 50);
        for ex in &examples {
            assert_eq!(ex.demos.len(), 5);
            let inputs: std::collections::HashSet<&str> =
                ex.demos.iter().map(|d| d.input.as_str()).collect();
            assert_eq!(inputs.len(), 5, "demos must be pairwise distinct");
            let pos = ex
                .demos
                .iter()
                .filter(|d| d.aux["label"] == "positive")
                .count();
            assert!((2..=3).contains(&pos), "label balance violated");
        }
    }

    #[test]
    fn single_label_pool_is_unsatisfiable() {
        let ds = labeled_dataset(&["positive"; 8]);
        let err = sample_induction_examples(&ds, 1, 0).unwrap_err();
        assert_eq!(err.category(), "unsatisfiable");
    }

    #[test]
    fn sampling_is_deterministic() {
        let ds = labeled_dataset(&[
            "positive", "negative", "positive", "negative", "positive", "negative",
        ]);
        let a = sample_induction_examples(&ds, 10, 4).unwrap();
        let b = sample_induction_examples(&ds, 10, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_examples_is_invalid() {
        let ds = labeled_dataset(&["positive", "negative", "positive", "negative", "positive"]);
        assert!(sample_induction_examples(&ds, 0, 0).is_err());
    }
}
