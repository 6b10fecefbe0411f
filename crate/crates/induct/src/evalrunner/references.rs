//! Reference-based instruction scoring and instruction tallying.
//!
//! A candidate instruction is scored as the maximum similarity over all
//! gold-reference instructions, with a pluggable scorer: the built-in
//! lexical unigram-F1 scorer by default, or an external process (e.g. a
//! neural similarity model) speaking JSONL on stdin/stdout.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use crate::error::{Error, Result};
use crate::scoring;

/// Pairwise instruction-similarity scorer.
pub trait SimilarityScorer: Send + Sync {
    fn name(&self) -> &str;

    /// Score each (candidate, reference) pair, in order.
    fn score_pairs(&self, pairs: &[(String, String)]) -> Result<Vec<f64>>;
}

/// Built-in lexical scorer: unigram-overlap F1 over lowercased,
/// punctuation-stripped tokens.
pub struct UnigramF1Scorer;

impl SimilarityScorer for UnigramF1Scorer {
    fn name(&self) -> &str {
        "unigram-f1"
    }

    fn score_pairs(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        Ok(pairs
            .iter()
            .map(|(c, r)| scoring::unigram_f1(c, r))
            .collect())
    }
}

/// Adapter for external similarity scorers. The command receives one
/// `{"candidate": ..., "reference": ...}` JSON line per pair on stdin and
/// must print one score per line on stdout, in order.
pub struct ExternalProcessScorer {
    pub command: Vec<String>,
}

impl SimilarityScorer for ExternalProcessScorer {
    fn name(&self) -> &str {
        "external"
    }

    fn score_pairs(&self, pairs: &[(String, String)]) -> Result<Vec<f64>> {
        let program = self
            .command
            .first()
            .ok_or_else(|| Error::InvalidArgument("external scorer: empty command".into()))?;
        let backend_err = |message: String| Error::Backend {
            backend: "external-scorer".into(),
            message,
        };
        let mut child = Command::new(program)
            .args(&self.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| backend_err(format!("spawn '{program}': {e}")))?;
        {
            let mut stdin = child.stdin.take().expect("stdin piped");
            for (candidate, reference) in pairs {
                let line = serde_json::json!({
                    "candidate": candidate,
                    "reference": reference,
                });
                writeln!(stdin, "{line}").map_err(|e| backend_err(e.to_string()))?;
            }
        }
        let output = child
            .wait_with_output()
            .map_err(|e| backend_err(e.to_string()))?;
        if !output.status.success() {
            return Err(backend_err(format!("exited with {}", output.status)));
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        let scores: Vec<f64> = stdout
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| backend_err(format!("bad score '{l}': {e}")))
            })
            .collect::<Result<_>>()?;
        if scores.len() != pairs.len() {
            return Err(backend_err(format!(
                "scored {} of {} pairs",
                scores.len(),
                pairs.len()
            )));
        }
        Ok(scores)
    }
}

/// Per candidate, the maximum scorer value over all references.
pub fn score_against_references(
    candidates: &[String],
    references: &[String],
    scorer: &dyn SimilarityScorer,
) -> Result<Vec<f64>> {
    if references.is_empty() {
        return Err(Error::InvalidArgument("empty reference list".into()));
    }
    if candidates.is_empty() {
        return Ok(Vec::new());
    }
    let mut pairs = Vec::with_capacity(candidates.len() * references.len());
    for candidate in candidates {
        for reference in references {
            pairs.push((candidate.clone(), reference.clone()));
        }
    }
    let flat = scorer.score_pairs(&pairs)?;
    if flat.len() != pairs.len() {
        return Err(Error::Backend {
            backend: scorer.name().to_string(),
            message: "scorer returned the wrong number of scores".into(),
        });
    }
    Ok(flat
        .chunks(references.len())
        .map(|chunk| chunk.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect())
}

/// Load a reference-instruction file: one instruction per line, '#'
/// comments, blank lines ignored. Empty files are an error (references
/// must be verified gold annotations).
pub fn load_reference_file(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let references: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_string())
        .collect();
    if references.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no reference instructions in {}",
            path.display()
        )));
    }
    Ok(references)
}

/// Frequency table of normalized instructions, most common first (ties
/// break lexicographically so the tally is deterministic).
pub fn tally_instructions(instructions: &[String]) -> Vec<(String, usize)> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for instruction in instructions {
        *counts.entry(scoring::normalize(instruction)).or_insert(0) += 1;
    }
    let mut tally: Vec<(String, usize)> = counts.into_iter().collect();
    tally.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    tally
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn self_match_scores_one() {
        let refs = strings(&["extract the first letter", "write the first letter"]);
        let scores = score_against_references(
            &strings(&["write the first letter"]),
            &refs,
            &UnigramF1Scorer,
        )
        .unwrap();
        assert_eq!(scores, vec![1.0]);
    }

    #[test]
    fn duplicate_references_leave_scores_unchanged() {
        let candidates = strings(&["write the first letter", "sum the numbers"]);
        let refs = strings(&["extract the first letter of the input word"]);
        let mut doubled = refs.clone();
        doubled.extend(refs.clone());
        let a = score_against_references(&candidates, &refs, &UnigramF1Scorer).unwrap();
        let b = score_against_references(&candidates, &doubled, &UnigramF1Scorer).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_over_references_worked_example() {
        // Best reference: "write the first letter of each word",
        // P = 4/4, R = 4/7, F1 = 8/11.
        let scores = score_against_references(
            &strings(&["write the first letter"]),
            &strings(&[
                "extract the first letter of the input word",
                "write the first letter of each word",
            ]),
            &UnigramF1Scorer,
        )
        .unwrap();
        assert!((scores[0] - 8.0 / 11.0).abs() < 1e-12, "got {}", scores[0]);
    }

    #[test]
    fn empty_reference_list_is_an_error() {
        let err = score_against_references(&strings(&["x"]), &[], &UnigramF1Scorer).unwrap_err();
        assert_eq!(err.category(), "invalid-argument");
    }

    #[test]
    fn tally_counts_normalized_instructions() {
        let tally =
            tally_instructions(&strings(&["Add 's'.", "add 's'", "Pluralize.", "add 's'!"]));
        assert_eq!(tally[0], ("add 's'".to_string(), 3));
        assert_eq!(tally[1], ("pluralize".to_string(), 1));
        assert!(tally_instructions(&[]).is_empty());
    }

    #[cfg(unix)]
    #[test]
    fn external_scorer_round_trips_through_a_process() {
        let scorer = ExternalProcessScorer {
            command: vec![
                "sh".to_string(),
                "-c".to_string(),
                "while read line; do echo 0.5; done".to_string(),
            ],
        };
        let scores =
            score_against_references(&strings(&["a", "b"]), &strings(&["x", "y", "z"]), &scorer)
                .unwrap();
        assert_eq!(scores, vec![0.5, 0.5]);

        // A scorer that misbehaves (wrong line count) is a hard error.
        let broken = ExternalProcessScorer {
            command: vec!["sh".to_string(), "-c".to_string(), "echo 0.5".to_string()],
        };
        assert!(
            score_against_references(&strings(&["a", "b"]), &strings(&["x"]), &broken).is_err()
        );
    }

    #[test]
    fn tally_is_order_invariant() {
        let mut forward = strings(&["a", "b", "a", "c", "b", "a"]);
        let tally_fwd = tally_instructions(&forward);
        forward.reverse();
        assert_eq!(tally_fwd, tally_instructions(&forward));
        assert_eq!(tally_fwd[0], ("a".to_string(), 3));
    }
}
